#pragma once
#include <utility>
#include <vector>

#include "stitch/geometry.hpp"

namespace stitch {

struct Dims {
  int width = 0;
  int height = 0;
};

// Vertical extents of the warped target sampled along canvas abscissas.
// Heights use the pixel-count convention: a column covering rows y0..y1
// has height y1 - y0 + 1.
struct ColumnHeights {
  std::vector<double> x;  // strictly increasing canvas abscissas
  std::vector<double> h;  // height at each abscissa, > 0
};

struct FocalSearchConfig {
  double f_min = 0.0;  // <= 0 means derive from the reference width
  double f_max = 0.0;
  double tolerance = 0.5;
  int grid_points = 64;
};

// Partition abscissa: 1 or w depending on where the warped target lands
// relative to the reference. Throws AmbiguousSide when the warped centroid
// falls within +-5% of the reference center.
std::pair<double, PartitionSide> choose_a0(const Homography& h, Dims ref_dims, Dims tgt_dims);

// Cylinder center ordinate from the target boundary row with minimal
// y-offset between its two warped endpoints; ties go to the smallest row.
double estimate_b0(const Homography& h, Dims tgt_dims);

// Heights of the warped target quadrilateral along tgt_dims.width uniformly
// spaced vertical lines spanning the non-overlap extent (partition line to
// the far edge). Throws EmptyNonOverlap when the warped target does not
// reach past the partition line.
ColumnHeights column_heights(const Homography& h, Dims tgt_dims, double a0, PartitionSide side);

// Heights at the partition-line end and the far end of the sampled columns.
std::pair<double, double> partition_and_far_heights(const ColumnHeights& ch, PartitionSide side);

// Desired average height: max(h, (h1 + hw + 2h) / 4).
double compute_hD(int h_t, double h1, double hw);

// Height of a column after the cylindrical correction,
//   h'' = f (h' - 1) / sqrt((x' - a0)^2 + f^2) + 1.
// Independent of the cylinder's vertical placement.
double height_after_cyl(double f, double x_prime, double a0, double h_prime);

struct FocalEstimate {
  double f = 0.0;
  bool degenerate = false;  // minimizer pinned at f_max, no bending needed
  double residual = 0.0;    // objective value at f
};

// Least-squares focal length over [f_min, f_max]: coarse grid scan, then
// golden-section refinement of the best bracket down to cfg.tolerance.
FocalEstimate estimate_focal(const ColumnHeights& ch, double a0, double hD,
                             const FocalSearchConfig& cfg);

double focal_objective(const ColumnHeights& ch, double a0, double hD, double f);

}  // namespace stitch
