#include "stitch/image.hpp"

namespace stitch {

std::optional<Color> bilinear_sample(const ImageGrid& img, Point2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  double fx = std::floor(p.x), fy = std::floor(p.y);
  int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  double ax = p.x - fx, ay = p.y - fy;
  int x1 = ax == 0.0 ? x0 : x0 + 1;
  int y1 = ay == 0.0 ? y0 : y0 + 1;
  if (!img.in_bounds(x0, y0) || !img.in_bounds(x1, y1)) return std::nullopt;
  if (!img.is_valid(x0, y0) || !img.is_valid(x1, y0) ||
      !img.is_valid(x0, y1) || !img.is_valid(x1, y1))
    return std::nullopt;
  Color out{0, 0, 0, 0};
  double w00 = (1 - ax) * (1 - ay), w10 = ax * (1 - ay);
  double w01 = (1 - ax) * ay, w11 = ax * ay;
  for (int c = 0; c < img.channels; ++c) {
    out[c] = w00 * img.at(x0, y0, c) + w10 * img.at(x1, y0, c) +
             w01 * img.at(x0, y1, c) + w11 * img.at(x1, y1, c);
  }
  return out;
}

double luma(const ImageGrid& img, int x, int y) {
  if (img.channels == 1) return img.at(x, y, 0);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

}  // namespace stitch
