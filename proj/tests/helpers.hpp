#pragma once
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "stitch/geometry.hpp"
#include "stitch/image.hpp"

namespace testutil {

// relative L2 distance between canonicalized homographies
inline double matrix_distance(const stitch::Homography& a, const stitch::Homography& b) {
  const auto& ma = a.data();
  const auto& mb = b.data();
  double d = 0, n = 0;
  for (int i = 0; i < 9; ++i) {
    d += (ma[i] - mb[i]) * (ma[i] - mb[i]);
    n += mb[i] * mb[i];
  }
  return std::sqrt(d / n);
}

// mild perspective map roughly centered on a w x h image
inline stitch::Homography random_mild_homography(std::mt19937& rng, double w, double h) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double theta = 0.03 * u(rng);
  double s = 1.0 + 0.1 * u(rng);
  double px = 2e-4 * u(rng) / std::max(w, h) * 500;
  double py = 1e-4 * u(rng) / std::max(w, h) * 500;
  double tx = 0.2 * w * u(rng), ty = 0.2 * h * u(rng);
  return stitch::Homography({s * std::cos(theta), -s * std::sin(theta), tx,
                             s * std::sin(theta), s * std::cos(theta), ty, px, py, 1.0});
}

inline stitch::ImageGrid constant_image(int w, int h, int ch, float v) {
  stitch::ImageGrid img(w, h, ch);
  for (float& s : img.samples) s = v;
  return img;
}

inline double pixel_diff_max(const stitch::ImageGrid& a, const stitch::ImageGrid& b) {
  double m = 0;
  for (size_t i = 0; i < a.samples.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.samples[i]) - b.samples[i]));
  return m;
}

inline stitch::ImageGrid crop(const stitch::ImageGrid& img, int x0, int y0, int w, int h) {
  stitch::ImageGrid out(w, h, img.channels, false);
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x) {
      int sx = x0 + x - 1, sy = y0 + y - 1;
      if (!img.in_bounds(sx, sy) || !img.is_valid(sx, sy)) continue;
      for (int c = 0; c < img.channels; ++c)
        out.set(x, y, c, img.at(sx, sy, c));
      out.valid[out.pix(x, y)] = 1;
    }
  return out;
}

}  // namespace testutil
