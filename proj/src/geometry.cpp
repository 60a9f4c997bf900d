#include "stitch/geometry.hpp"

#include <algorithm>

namespace stitch {

const char* err_name(Err e) {
  switch (e) {
    case Err::DegenerateDepth: return "DegenerateDepth";
    case Err::SingularMatrix: return "SingularMatrix";
    case Err::OutOfRange: return "OutOfRange";
    case Err::TooFewMatches: return "TooFewMatches";
    case Err::NoConsensus: return "NoConsensus";
    case Err::DegenerateSample: return "DegenerateSample";
    case Err::DegenerateConfiguration: return "DegenerateConfiguration";
    case Err::AmbiguousSide: return "AmbiguousSide";
    case Err::EmptyNonOverlap: return "EmptyNonOverlap";
    case Err::ScaleTooSmall: return "ScaleTooSmall";
    case Err::InvalidBracket: return "InvalidBracket";
    case Err::NoOverlap: return "NoOverlap";
    case Err::EmptyCanvas: return "EmptyCanvas";
    case Err::InvalidOverlap: return "InvalidOverlap";
    case Err::VerticalPair: return "VerticalPair";
    case Err::IoError: return "IoError";
  }
  return "UnknownError";
}

void Homography::canonicalize() {
  int best = 0;
  for (int i = 1; i < 9; ++i)
    if (std::abs(m_[i]) > std::abs(m_[best])) best = i;
  double s = m_[best];
  if (s == 0.0) throw StitchError(Err::SingularMatrix, "all-zero homography");
  for (double& v : m_) v /= s;
}

double Homography::det() const {
  return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) -
         m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
         m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const auto& m = h.data();
  double w = m[6] * p.x + m[7] * p.y + m[8];
  if (std::abs(w) <= 1e-12)
    throw StitchError(Err::DegenerateDepth, "point on the horizon line");
  double X = m[0] * p.x + m[1] * p.y + m[2];
  double Y = m[3] * p.x + m[4] * p.y + m[5];
  return {X / w, Y / w};
}

Homography invert_homography(const Homography& h) {
  const auto& m = h.data();
  double d = h.det();
  // entries are canonically scaled to max magnitude 1, so |det| is relative
  if (std::abs(d) < 1e-12)
    throw StitchError(Err::SingularMatrix, "non-invertible homography");
  std::array<double, 9> adj = {
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
      m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  return Homography(adj);
}

Homography compose(const Homography& outer, const Homography& inner) {
  const auto& a = outer.data();
  const auto& b = inner.data();
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i * 3 + j] = a[i * 3] * b[j] + a[i * 3 + 1] * b[3 + j] + a[i * 3 + 2] * b[6 + j];
  return Homography(r);
}

Point2 apply_similarity(const Similarity& s, Point2 p) {
  return {s.a * p.x - s.b * p.y + s.tx, s.b * p.x + s.a * p.y + s.ty};
}

Point2 cyl_forward(const CylindricalParams& c, Point2 p) {
  double dx = p.x - c.a0;
  if (dx == 0.0) return {c.a0, p.y};  // fixed line, kept exact
  double xx = c.f * std::atan(dx / c.f) + c.a0;
  double yy = c.f * (p.y - c.b0) / std::sqrt(dx * dx + c.f * c.f) + c.b0;
  return {xx, yy};
}

Point2 cyl_inverse(const CylindricalParams& c, Point2 q) {
  double u = q.x - c.a0;
  if (std::abs(u) >= c.f * M_PI / 2.0)
    throw StitchError(Err::OutOfRange, "abscissa outside cylindrical image range");
  if (u == 0.0) return {c.a0, q.y};
  double dx = c.f * std::tan(u / c.f);
  double y = c.b0 + (q.y - c.b0) * std::sqrt(dx * dx + c.f * c.f) / c.f;
  return {c.a0 + dx, y};
}

Point2 half_cyl_forward(const HalfCylWarp& t, Point2 p) {
  Point2 q = apply_homography(t.h, p);
  return t.in_cyl_region(q.x) ? cyl_forward(t.c, q) : q;
}

Point2 half_cyl_inverse(const HalfCylWarp& t, Point2 q) {
  // the cylindrical x-map preserves the side of the partition line
  Point2 r = t.in_cyl_region(q.x) ? cyl_inverse(t.c, q) : q;
  return apply_homography(invert_homography(t.h), r);
}

}  // namespace stitch
