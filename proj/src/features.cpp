#include "stitch/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stitch {

std::vector<float> luma_field(const ImageGrid& img) {
  std::vector<float> out(static_cast<size_t>(img.width) * img.height, 0.0f);
#pragma omp parallel for schedule(static)
  for (int y = 1; y <= img.height; ++y)
    for (int x = 1; x <= img.width; ++x)
      if (img.is_valid(x, y))
        out[static_cast<size_t>(y - 1) * img.width + (x - 1)] =
            static_cast<float>(luma(img, x, y));
  return out;
}

void gaussian_blur_field(std::vector<float>& field, int w, int h, double sigma) {
  int radius = static_cast<int>(std::ceil(2.5 * sigma));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
    sum += kernel[i + radius];
  }
  for (float& k : kernel) k = static_cast<float>(k / sum);

  std::vector<float> tmp(field.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) {
        int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * field[static_cast<size_t>(y) * w + xx];
      }
      tmp[static_cast<size_t>(y) * w + x] = static_cast<float>(acc);
    }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) {
        int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<size_t>(yy) * w + x];
      }
      field[static_cast<size_t>(y) * w + x] = static_cast<float>(acc);
    }
}

std::vector<float> harris_response(const std::vector<float>& gray, int w, int h,
                                   const DetectorConfig& cfg) {
  std::vector<float> smooth = gray;
  gaussian_blur_field(smooth, w, h, cfg.blur_sigma);

  auto idx = [w](int x, int y) { return static_cast<size_t>(y) * w + x; };
  std::vector<float> xx(gray.size(), 0.0f), yy(gray.size(), 0.0f), xy(gray.size(), 0.0f);
#pragma omp parallel for schedule(static)
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      float gx = 0.5f * (smooth[idx(x + 1, y)] - smooth[idx(x - 1, y)]);
      float gy = 0.5f * (smooth[idx(x, y + 1)] - smooth[idx(x, y - 1)]);
      xx[idx(x, y)] = gx * gx;
      yy[idx(x, y)] = gy * gy;
      xy[idx(x, y)] = gx * gy;
    }
  gaussian_blur_field(xx, w, h, cfg.integration_sigma);
  gaussian_blur_field(yy, w, h, cfg.integration_sigma);
  gaussian_blur_field(xy, w, h, cfg.integration_sigma);

  std::vector<float> resp(gray.size(), 0.0f);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      size_t i = idx(x, y);
      double tr = static_cast<double>(xx[i]) + yy[i];
      double det = static_cast<double>(xx[i]) * yy[i] - static_cast<double>(xy[i]) * xy[i];
      resp[i] = static_cast<float>(det - cfg.harris_k * tr * tr);
    }
  return resp;
}

namespace {

// Quadratic fit on the 3x3 response neighborhood; offset clamped to 0.75 px.
Point2 refine_peak(const std::vector<float>& r, int w, int x, int y) {
  auto v = [&](int dx, int dy) {
    return static_cast<double>(r[static_cast<size_t>(y + dy) * w + (x + dx)]);
  };
  double dx = 0.5 * (v(1, 0) - v(-1, 0));
  double dy = 0.5 * (v(0, 1) - v(0, -1));
  double dxx = v(1, 0) - 2 * v(0, 0) + v(-1, 0);
  double dyy = v(0, 1) - 2 * v(0, 0) + v(0, -1);
  double dxy = 0.25 * (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1));
  double det = dxx * dyy - dxy * dxy;
  double ox = 0, oy = 0;
  if (std::abs(det) > 1e-18) {
    ox = -(dyy * dx - dxy * dy) / det;
    oy = -(dxx * dy - dxy * dx) / det;
  }
  ox = std::clamp(ox, -0.75, 0.75);
  oy = std::clamp(oy, -0.75, 0.75);
  return {x + 1 + ox, y + 1 + oy};  // back to 1-based pixel coordinates
}

}  // namespace

std::vector<Feature> HarrisDetector::detect(const ImageGrid& img, const DetectorConfig& cfg) const {
  const int w = img.width, h = img.height;
  std::vector<float> gray = luma_field(img);
  std::vector<float> resp = harris_response(gray, w, h, cfg);

  float rmax = 0.0f;
#pragma omp parallel for schedule(static) reduction(max : rmax)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) rmax = std::max(rmax, resp[static_cast<size_t>(y) * w + x]);
  // a constant image has no corners at all
  double floor_resp = std::max(static_cast<double>(rmax) * cfg.quality, 1e-12);

  const int r = cfg.nms_radius;
  int border = static_cast<int>(
      std::ceil(cfg.descriptor_spacing * cfg.descriptor_grid / 2.0) + 2);
  struct Cand {
    float resp;
    int x, y;
  };
  std::vector<Cand> cands;
  for (int y = std::max(border, r); y < h - std::max(border, r); ++y)
    for (int x = std::max(border, r); x < w - std::max(border, r); ++x) {
      float v = resp[static_cast<size_t>(y) * w + x];
      if (v < floor_resp) continue;
      bool peak = true;
      for (int dy = -r; dy <= r && peak; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          float nb = resp[static_cast<size_t>(y + dy) * w + (x + dx)];
          // strict on one half of the window so equal plateaus keep one peak
          if (nb > v || (nb == v && (dy < 0 || (dy == 0 && dx < 0)))) {
            peak = false;
            break;
          }
        }
      if (peak) cands.push_back({v, x, y});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.resp != b.resp) return a.resp > b.resp;
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  if (static_cast<int>(cands.size()) > cfg.max_features) cands.resize(cfg.max_features);

  // descriptors come from the pre-smoothed luma field
  std::vector<float> smooth = gray;
  gaussian_blur_field(smooth, w, h, cfg.blur_sigma);
  ImageGrid smooth_img(w, h, 1);
  smooth_img.samples = smooth;
  smooth_img.valid = img.valid;

  const int g = cfg.descriptor_grid;
  const double sp = cfg.descriptor_spacing;
  std::vector<Feature> feats;
  feats.reserve(cands.size());
  for (const Cand& cd : cands) {
    Point2 pos = refine_peak(resp, w, cd.x, cd.y);
    std::vector<float> desc(static_cast<size_t>(g) * g);
    double mean = 0;
    bool ok = true;
    for (int j = 0; j < g && ok; ++j)
      for (int i = 0; i < g; ++i) {
        Point2 sp_pt{pos.x + (i - (g - 1) / 2.0) * sp, pos.y + (j - (g - 1) / 2.0) * sp};
        auto c = bilinear_sample(smooth_img, sp_pt);
        if (!c) {
          ok = false;
          break;
        }
        desc[static_cast<size_t>(j) * g + i] = static_cast<float>((*c)[0]);
        mean += (*c)[0];
      }
    if (!ok) continue;
    mean /= g * g;
    double norm = 0;
    for (float& d : desc) {
      d = static_cast<float>(d - mean);
      norm += static_cast<double>(d) * d;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-9) continue;  // flat patch carries no signal
    for (float& d : desc) d = static_cast<float>(d / norm);
    feats.push_back({pos, std::move(desc), 1.0, 0.0});
  }
  return feats;
}

std::unique_ptr<FeatureDetector> make_detector(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Harris: return std::make_unique<HarrisDetector>();
  }
  return std::make_unique<HarrisDetector>();
}

MatchSet match_features(const std::vector<Feature>& tgt, const std::vector<Feature>& ref,
                        double ratio) {
  MatchSet out;
  if (tgt.empty() || ref.empty()) return out;
  const int nt = static_cast<int>(tgt.size());
  const int nr = static_cast<int>(ref.size());

  auto nearest2 = [](const std::vector<Feature>& from, const Feature& q, int& best,
                     double& d1, double& d2) {
    best = -1;
    d1 = d2 = std::numeric_limits<double>::max();
    for (int j = 0; j < static_cast<int>(from.size()); ++j) {
      const auto& a = from[j].descriptor;
      const auto& b = q.descriptor;
      double d = 0;
      size_t n = std::min(a.size(), b.size());
      for (size_t k = 0; k < n; ++k) {
        double diff = static_cast<double>(a[k]) - b[k];
        d += diff * diff;
      }
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
  };

  std::vector<int> best_ref(nt, -1);
  std::vector<double> dist1(nt), dist2(nt);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i) nearest2(ref, tgt[i], best_ref[i], dist1[i], dist2[i]);

  std::vector<int> best_tgt(nr, -1);
  std::vector<double> rdist1(nr), rdist2(nr);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nr; ++j) nearest2(tgt, ref[j], best_tgt[j], rdist1[j], rdist2[j]);

  double r2 = ratio * ratio;  // distances are squared
  for (int i = 0; i < nt; ++i) {
    int j = best_ref[i];
    if (j < 0) continue;
    // with a single reference candidate the second distance stays at max
    // and the ratio test passes vacuously
    if (!(dist1[i] < r2 * dist2[i])) continue;
    if (best_tgt[j] != i) continue;
    out.pairs.emplace_back(tgt[i].position, ref[j].position);
  }
  out.inlier.assign(out.pairs.size(), 0);
  return out;
}

MatchSet detect_and_match(const ImageGrid& ref, const ImageGrid& tgt, const DetectorConfig& cfg) {
  if (ref.empty() || tgt.empty())
    throw StitchError(Err::TooFewMatches, "empty input image");
  auto det = make_detector(cfg.kind);
  std::vector<Feature> fr = det->detect(ref, cfg);
  std::vector<Feature> ft = det->detect(tgt, cfg);
  MatchSet m = match_features(ft, fr, cfg.ratio);
  if (m.pairs.size() < 4)
    throw StitchError(Err::TooFewMatches,
                      "only " + std::to_string(m.pairs.size()) + " candidate matches");
  return m;
}

}  // namespace stitch
