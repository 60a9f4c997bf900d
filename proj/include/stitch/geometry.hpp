#pragma once
#include <array>
#include <cmath>

#include "stitch/errors.hpp"

namespace stitch {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// 3x3 projective map, stored row-major and rescaled so the entry of largest
// magnitude is 1. All comparisons on homographies are scale-invariant.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  explicit Homography(const std::array<double, 9>& m) : m_(m) { canonicalize(); }

  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty) {
    return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1});
  }
  static Homography scale(double sx, double sy) {
    return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1});
  }

  double at(int r, int c) const { return m_[r * 3 + c]; }
  const std::array<double, 9>& data() const { return m_; }

  double det() const;

 private:
  void canonicalize();
  std::array<double, 9> m_;
};

// Rotation + uniform scale + translation, the 2x3 map
//   [ a -b tx ]
//   [ b  a ty ]
struct Similarity {
  double a = 1.0;
  double b = 0.0;
  double tx = 0.0;
  double ty = 0.0;
};

struct CylindricalParams {
  double f = 1.0;   // focal length, pixels
  double a0 = 0.0;  // cylinder center abscissa
  double b0 = 0.0;  // cylinder center ordinate
};

// Which side of the vertical partition line x = a0 receives the cylindrical
// correction. The other side keeps the plain homography.
enum class PartitionSide { CylLeftOfLine, CylRightOfLine };

struct HalfCylWarp {
  Homography h;
  CylindricalParams c;
  PartitionSide side = PartitionSide::CylRightOfLine;

  // Region test in post-homography coordinates. x == a0 belongs to the
  // homography region; both branches agree there anyway.
  bool in_cyl_region(double x) const {
    return side == PartitionSide::CylRightOfLine ? x > c.a0 : x < c.a0;
  }
};

Point2 apply_homography(const Homography& h, Point2 p);
Homography invert_homography(const Homography& h);
Homography compose(const Homography& outer, const Homography& inner);

Point2 apply_similarity(const Similarity& s, Point2 p);

Point2 cyl_forward(const CylindricalParams& c, Point2 p);
Point2 cyl_inverse(const CylindricalParams& c, Point2 q);

Point2 half_cyl_forward(const HalfCylWarp& t, Point2 p);
Point2 half_cyl_inverse(const HalfCylWarp& t, Point2 q);

}  // namespace stitch
