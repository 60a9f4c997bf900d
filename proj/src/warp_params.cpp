#include "stitch/warp_params.hpp"

#include <algorithm>
#include <cmath>

namespace stitch {

std::pair<double, PartitionSide> choose_a0(const Homography& h, Dims ref_dims, Dims tgt_dims) {
  Point2 corners[4] = {{1, 1},
                       {static_cast<double>(tgt_dims.width), 1},
                       {static_cast<double>(tgt_dims.width), static_cast<double>(tgt_dims.height)},
                       {1, static_cast<double>(tgt_dims.height)}};
  double cx = 0;
  for (const Point2& c : corners) cx += apply_homography(h, c).x;
  cx /= 4.0;
  double center = (1.0 + ref_dims.width) / 2.0;
  if (std::abs(cx - center) <= 0.05 * ref_dims.width)
    throw StitchError(Err::AmbiguousSide, "warped target centroid sits on the reference center");
  if (cx > center)
    return {static_cast<double>(ref_dims.width), PartitionSide::CylRightOfLine};
  return {1.0, PartitionSide::CylLeftOfLine};
}

double estimate_b0(const Homography& h, Dims tgt_dims) {
  double best_off = std::numeric_limits<double>::max();
  double best_mid = 0;
  for (int i = 1; i <= tgt_dims.height; ++i) {
    Point2 l = apply_homography(h, {1.0, static_cast<double>(i)});
    Point2 r = apply_homography(h, {static_cast<double>(tgt_dims.width), static_cast<double>(i)});
    double off = std::abs(l.y - r.y);
    if (off < best_off) {
      best_off = off;
      best_mid = (l.y + r.y) / 2.0;
    }
  }
  return best_mid;
}

namespace {

// Intersection of the vertical line x = c with the convex quad, via the
// y-intervals induced by the four edge half-planes.
bool vline_quad_extent(const Point2 quad[4], double c, double& y0, double& y1) {
  double lo = -std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::max();
  double area = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2& a = quad[i];
    const Point2& b = quad[(i + 1) % 4];
    area += a.x * b.y - b.x * a.y;
  }
  double orient = area >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < 4; ++i) {
    const Point2& a = quad[i];
    const Point2& b = quad[(i + 1) % 4];
    double ex = b.x - a.x, ey = b.y - a.y;
    // interior half-plane at x = c:  orient*ex*(y - a.y) >= orient*ey*(c - a.x)
    double coef = orient * ex;
    double rhs = orient * ey * (c - a.x);
    if (std::abs(ex) <= 1e-12 * (std::abs(ex) + std::abs(ey))) {
      if (rhs > 1e-9 * (std::abs(ey) + 1.0)) return false;  // line outside a vertical edge
      continue;
    }
    double bound = rhs / coef + a.y;
    if (coef > 0)
      lo = std::max(lo, bound);
    else
      hi = std::min(hi, bound);
  }
  if (lo > hi) return false;
  y0 = lo;
  y1 = hi;
  return true;
}

}  // namespace

ColumnHeights column_heights(const Homography& h, Dims tgt_dims, double a0, PartitionSide side) {
  Point2 quad[4];
  quad[0] = apply_homography(h, {1, 1});
  quad[1] = apply_homography(h, {static_cast<double>(tgt_dims.width), 1});
  quad[2] = apply_homography(
      h, {static_cast<double>(tgt_dims.width), static_cast<double>(tgt_dims.height)});
  quad[3] = apply_homography(h, {1, static_cast<double>(tgt_dims.height)});

  double xmin = quad[0].x, xmax = quad[0].x;
  for (int i = 1; i < 4; ++i) {
    xmin = std::min(xmin, quad[i].x);
    xmax = std::max(xmax, quad[i].x);
  }
  double far = side == PartitionSide::CylRightOfLine ? xmax : xmin;
  bool past = side == PartitionSide::CylRightOfLine ? far > a0 : far < a0;
  if (!past)
    throw StitchError(Err::EmptyNonOverlap, "warped target does not cross the partition line");

  const int n = tgt_dims.width;
  ColumnHeights ch;
  ch.x.reserve(n);
  ch.h.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    double c = a0 + t * (far - a0);  // ordered from the partition line outward
    double y0, y1;
    if (!vline_quad_extent(quad, c, y0, y1)) continue;
    if (y1 < y0) continue;
    ch.x.push_back(c);
    ch.h.push_back(y1 - y0 + 1.0);
  }
  if (side == PartitionSide::CylLeftOfLine) {
    std::reverse(ch.x.begin(), ch.x.end());
    std::reverse(ch.h.begin(), ch.h.end());
  }
  if (ch.x.empty())
    throw StitchError(Err::EmptyNonOverlap, "no column crosses the warped target");
  return ch;
}

std::pair<double, double> partition_and_far_heights(const ColumnHeights& ch, PartitionSide side) {
  if (side == PartitionSide::CylRightOfLine) return {ch.h.front(), ch.h.back()};
  return {ch.h.back(), ch.h.front()};
}

double compute_hD(int h_t, double h1, double hw) {
  return std::max(static_cast<double>(h_t), (h1 + hw + 2.0 * h_t) / 4.0);
}

double height_after_cyl(double f, double x_prime, double a0, double h_prime) {
  double d = x_prime - a0;
  return f * (h_prime - 1.0) / std::sqrt(d * d + f * f) + 1.0;
}

double focal_objective(const ColumnHeights& ch, double a0, double hD, double f) {
  double sse = 0;
  for (size_t i = 0; i < ch.x.size(); ++i) {
    double r = height_after_cyl(f, ch.x[i], a0, ch.h[i]) - hD;
    sse += r * r;
  }
  return sse;
}

FocalEstimate estimate_focal(const ColumnHeights& ch, double a0, double hD,
                             const FocalSearchConfig& cfg) {
  if (!(cfg.f_min < cfg.f_max))
    throw StitchError(Err::InvalidBracket, "f_min must be below f_max");
  const int n = std::max(cfg.grid_points, 2);
  std::vector<double> fs(n), vals(n);
  for (int i = 0; i < n; ++i) {
    fs[i] = cfg.f_min + (cfg.f_max - cfg.f_min) * i / (n - 1);
    vals[i] = focal_objective(ch, a0, hD, fs[i]);
  }
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (vals[i] < vals[best]) best = i;

  double lo = fs[std::max(0, best - 1)];
  double hi = fs[std::min(n - 1, best + 1)];

  // golden-section refinement of the bracket
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = focal_objective(ch, a0, hD, c);
  double fd = focal_objective(ch, a0, hD, d);
  while (hi - lo > cfg.tolerance) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = focal_objective(ch, a0, hD, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = focal_objective(ch, a0, hD, d);
    }
  }

  FocalEstimate out;
  out.f = (lo + hi) / 2.0;
  double vmid = focal_objective(ch, a0, hD, out.f);
  // never return a point worse than a probed one
  if (vals[best] < vmid) {
    out.f = fs[best];
    vmid = vals[best];
  }
  out.residual = vmid;
  out.degenerate = cfg.f_max - out.f <= cfg.tolerance;
  return out;
}

}  // namespace stitch
