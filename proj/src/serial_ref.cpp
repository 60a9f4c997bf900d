#include "stitch/serial_ref.hpp"

#include <algorithm>
#include <cmath>

#include "stitch/errors.hpp"

namespace stitch::serial {

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
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) {
        int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * field[static_cast<size_t>(y) * w + xx];
      }
      tmp[static_cast<size_t>(y) * w + x] = static_cast<float>(acc);
    }
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
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      size_t i = idx(x, y);
      double tr = static_cast<double>(xx[i]) + yy[i];
      double det = static_cast<double>(xx[i]) * yy[i] - static_cast<double>(xy[i]) * xy[i];
      resp[i] = static_cast<float>(det - cfg.harris_k * tr * tr);
    }
  return resp;
}

ImageGrid downscale(const ImageGrid& img, int factor) {
  if (factor < 1) throw StitchError(Err::OutOfRange, "downscale factor must be >= 1");
  if (factor == 1) return img;
  int ow = (img.width + factor - 1) / factor;
  int oh = (img.height + factor - 1) / factor;
  ImageGrid out(ow, oh, img.channels, false);

  for (int by = 1; by <= oh; ++by) {
    int ys = (by - 1) * factor + 1, ye = std::min(by * factor, img.height);
    for (int bx = 1; bx <= ow; ++bx) {
      int xs = (bx - 1) * factor + 1, xe = std::min(bx * factor, img.width);
      bool all_valid = true;
      double acc[4] = {0, 0, 0, 0};
      int count = 0;
      for (int y = ys; y <= ye; ++y)
        for (int x = xs; x <= xe; ++x) {
          size_t p = img.pix(x, y);
          if (!img.valid[p]) all_valid = false;
          for (int c = 0; c < img.channels; ++c)
            acc[c] += img.samples[p * img.channels + c];
          ++count;
        }
      if (!all_valid || count == 0) continue;
      size_t dst = out.pix(bx, by);
      for (int c = 0; c < img.channels; ++c)
        out.samples[dst * img.channels + c] = static_cast<float>(acc[c] / count);
      out.valid[dst] = 1;
    }
  }
  return out;
}

std::vector<double> seam_energy(const ImageGrid& a, const ImageGrid& b,
                                const std::vector<uint8_t>& mask) {
  size_t n = static_cast<size_t>(a.width) * a.height;
  std::vector<double> e(n, 1e6);
  for (int y = 1; y <= a.height; ++y)
    for (int x = 1; x <= a.width; ++x) {
      size_t p = a.pix(x, y);
      if (!mask[p]) continue;
      double s = 0;
      for (int c = 0; c < a.channels; ++c) {
        double d = static_cast<double>(a.samples[p * a.channels + c]) -
                   b.samples[p * a.channels + c];
        s += d * d;
      }
      e[p] = s;
    }
  return e;
}

ImageGrid render_homography(const ImageGrid& tgt, const Homography& h, const Canvas& cv) {
  ImageGrid out(cv.width(), cv.height(), tgt.channels, false);
  Homography hinv = invert_homography(h);
  const std::array<double, 9>& m = hinv.data();

  for (int y = 1; y <= out.height; ++y) {
    double ry = y + cv.min_y - 1;
    for (int x = 1; x <= out.width; ++x) {
      double rx = x + cv.min_x - 1;
      double w = m[6] * rx + m[7] * ry + m[8];
      if (std::abs(w) <= 1e-12) continue;
      Point2 p{(m[0] * rx + m[1] * ry + m[2]) / w, (m[3] * rx + m[4] * ry + m[5]) / w};
      auto color = bilinear_sample(tgt, p);
      if (!color) continue;
      size_t dst = out.pix(x, y);
      for (int c = 0; c < tgt.channels; ++c)
        out.samples[dst * tgt.channels + c] = static_cast<float>((*color)[c]);
      out.valid[dst] = 1;
    }
  }
  return out;
}

}  // namespace stitch::serial
