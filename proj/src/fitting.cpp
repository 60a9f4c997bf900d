#include "stitch/fitting.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace stitch {

namespace {

struct NormXform {
  double cx, cy, s;  // p_norm = s * (p - centroid)
};

NormXform hartley(const std::vector<Point2>& pts) {
  double cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= pts.size();
  cy /= pts.size();
  double mean_dist = 0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= pts.size();
  double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
  return {cx, cy, s};
}

double tri_area2(Point2 a, Point2 b, Point2 c) {
  return std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

bool sample_degenerate(const std::vector<std::pair<Point2, Point2>>& pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n != 4) return false;  // larger sets are caught by the spectrum check
  for (int skip = 0; skip < 4; ++skip) {
    Point2 t[3], r[3];
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == skip) continue;
      t[k] = pairs[i].first;
      r[k] = pairs[i].second;
      ++k;
    }
    double span_t = 0, span_r = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        span_t = std::max(span_t, std::hypot(t[i].x - t[j].x, t[i].y - t[j].y));
        span_r = std::max(span_r, std::hypot(r[i].x - r[j].x, r[i].y - r[j].y));
      }
    if (span_t < 1e-9 || span_r < 1e-9) return true;
    if (tri_area2(t[0], t[1], t[2]) < 1e-9 * span_t * span_t) return true;
    if (tri_area2(r[0], r[1], r[2]) < 1e-9 * span_r * span_r) return true;
  }
  return false;
}

uint32_t uniform_below(std::mt19937& rng, uint32_t n) {
  // rejection sampling keeps the draw unbiased and independent of the
  // standard library's distribution internals
  uint32_t lim = UINT32_MAX - UINT32_MAX % n;
  uint32_t v;
  do {
    v = rng();
  } while (v >= lim);
  return v % n;
}

}  // namespace

Homography dlt_homography(const std::vector<std::pair<Point2, Point2>>& pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n < 4) throw StitchError(Err::DegenerateSample, "need at least 4 pairs");
  if (sample_degenerate(pairs))
    throw StitchError(Err::DegenerateSample, "collinear or coincident sample");

  std::vector<Point2> src(n), dst(n);
  for (int i = 0; i < n; ++i) {
    src[i] = pairs[i].first;
    dst[i] = pairs[i].second;
  }
  NormXform ns = hartley(src), nd = hartley(dst);

  Eigen::Matrix<double, 9, 9> ata = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < n; ++i) {
    double x = ns.s * (src[i].x - ns.cx), y = ns.s * (src[i].y - ns.cy);
    double u = nd.s * (dst[i].x - nd.cx), v = nd.s * (dst[i].y - nd.cy);
    Eigen::Matrix<double, 9, 1> r1, r2;
    r1 << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
    r2 << 0, 0, 0, x, y, 1, -v * x, -v * y, -v;
    ata += r1 * r1.transpose() + r2 * r2.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(ata);
  if (eig.info() != Eigen::Success)
    throw StitchError(Err::DegenerateSample, "eigendecomposition failed");
  // rank deficiency beyond the one-dimensional null space means the sample
  // does not determine a homography
  double scale = eig.eigenvalues()(8);
  if (n >= 4 && eig.eigenvalues()(1) < 1e-12 * std::max(scale, 1.0))
    throw StitchError(Err::DegenerateSample, "underdetermined sample");

  Eigen::Matrix<double, 9, 1> hv = eig.eigenvectors().col(0);
  Eigen::Matrix3d hn;
  hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);

  Eigen::Matrix3d ts, td_inv;
  ts << ns.s, 0, -ns.s * ns.cx, 0, ns.s, -ns.s * ns.cy, 0, 0, 1;
  td_inv << 1.0 / nd.s, 0, nd.cx, 0, 1.0 / nd.s, nd.cy, 0, 0, 1;
  Eigen::Matrix3d hm = td_inv * hn * ts;

  std::array<double, 9> out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r * 3 + c] = hm(r, c);
  return Homography(out);
}

std::pair<Homography, std::vector<uint8_t>> estimate_homography_ransac(MatchSet& m,
                                                                       const RansacConfig& cfg) {
  const int n = static_cast<int>(m.pairs.size());
  if (n < 4) throw StitchError(Err::NoConsensus, "fewer than 4 correspondences");

  std::mt19937 rng(cfg.seed);
  const double thr2 = cfg.threshold * cfg.threshold;

  int best_count = 0;
  double best_rmse = std::numeric_limits<double>::max();
  std::vector<uint8_t> best_mask;
  Homography best_h;

  int required = cfg.max_iters;
  for (int iter = 0; iter < required; ++iter) {
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = static_cast<int>(uniform_below(rng, static_cast<uint32_t>(n)));
        fresh = true;
        for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
      } while (!fresh);
    }
    std::vector<std::pair<Point2, Point2>> sample = {m.pairs[idx[0]], m.pairs[idx[1]],
                                                     m.pairs[idx[2]], m.pairs[idx[3]]};
    Homography h;
    try {
      h = dlt_homography(sample);
    } catch (const StitchError&) {
      continue;
    }

    int count = 0;
    double sse = 0;
    std::vector<uint8_t> mask(n, 0);
    for (int i = 0; i < n; ++i) {
      double e2;
      try {
        Point2 q = apply_homography(h, m.pairs[i].first);
        double dx = q.x - m.pairs[i].second.x, dy = q.y - m.pairs[i].second.y;
        e2 = dx * dx + dy * dy;
      } catch (const StitchError&) {
        continue;
      }
      if (e2 < thr2) {
        mask[i] = 1;
        ++count;
        sse += e2;
      }
    }
    if (count == 0) continue;
    double rmse = std::sqrt(sse / count);
    if (count > best_count || (count == best_count && rmse < best_rmse)) {
      best_count = count;
      best_rmse = rmse;
      best_mask = std::move(mask);
      best_h = h;
      double w = static_cast<double>(count) / n;
      double denom = std::log(1.0 - std::min(0.999999, w * w * w * w));
      if (denom < 0) {
        int need = static_cast<int>(std::ceil(std::log(1.0 - cfg.confidence) / denom));
        required = std::clamp(need, iter + 1, cfg.max_iters);
      }
    }
  }

  if (best_count < 4) throw StitchError(Err::NoConsensus, "no 4-inlier consensus found");

  std::vector<std::pair<Point2, Point2>> inliers;
  for (int i = 0; i < n; ++i)
    if (best_mask[i]) inliers.push_back(m.pairs[i]);
  Homography refit = best_h;
  try {
    refit = dlt_homography(inliers);
  } catch (const StitchError&) {
    // keep the raw hypothesis when the refit is degenerate
  }
  m.inlier = best_mask;
  return {refit, best_mask};
}

Similarity fit_similarity(const std::vector<std::pair<Point2, Point2>>& pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n < 2) throw StitchError(Err::DegenerateConfiguration, "need at least 2 pairs");
  double cx = 0, cy = 0, cu = 0, cv = 0;
  for (const auto& [p, q] : pairs) {
    cx += p.x;
    cy += p.y;
    cu += q.x;
    cv += q.y;
  }
  cx /= n;
  cy /= n;
  cu /= n;
  cv /= n;
  double sxx = 0, sxu = 0, sxv = 0;
  for (const auto& [p, q] : pairs) {
    double x = p.x - cx, y = p.y - cy, u = q.x - cu, v = q.y - cv;
    sxx += x * x + y * y;
    sxu += x * u + y * v;
    sxv += x * v - y * u;
  }
  if (sxx < 1e-12)
    throw StitchError(Err::DegenerateConfiguration, "source points coincide");
  Similarity s;
  s.a = sxu / sxx;
  s.b = sxv / sxx;
  s.tx = cu - s.a * cx + s.b * cy;
  s.ty = cv - s.b * cx - s.a * cy;
  return s;
}

double selection_scale(const Similarity& s) {
  double v = std::hypot(s.a, s.b);
  if (v <= 0)
    throw StitchError(Err::DegenerateConfiguration, "similarity has zero scale");
  return v;
}

double reprojection_rmse(const Homography& h, const MatchSet& m,
                         const std::vector<uint8_t>& mask) {
  double sse = 0;
  int count = 0;
  for (size_t i = 0; i < m.pairs.size(); ++i) {
    if (i < mask.size() && !mask[i]) continue;
    Point2 q = apply_homography(h, m.pairs[i].first);
    double dx = q.x - m.pairs[i].second.x, dy = q.y - m.pairs[i].second.y;
    sse += dx * dx + dy * dy;
    ++count;
  }
  return count ? std::sqrt(sse / count) : 0.0;
}

}  // namespace stitch
