#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "stitch/geometry.hpp"

namespace stitch {

// Raster image with a validity mask. Intensities are reals in [0,1].
// Pixel centers sit at integer coordinates starting at 1: x in [1,w],
// y in [1,h], origin at the upper-left, y growing downward.
// Invalid pixels always carry intensity 0.
struct ImageGrid {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> samples;   // row-major, channel-interleaved
  std::vector<uint8_t> valid;   // one flag per pixel

  ImageGrid() = default;
  ImageGrid(int w, int h, int ch, bool all_valid = true)
      : width(w), height(h), channels(ch),
        samples(static_cast<size_t>(w) * h * ch, 0.0f),
        valid(static_cast<size_t>(w) * h, all_valid ? 1 : 0) {}

  size_t pix(int x, int y) const {
    return static_cast<size_t>(y - 1) * width + (x - 1);
  }
  float at(int x, int y, int c) const { return samples[pix(x, y) * channels + c]; }
  void set(int x, int y, int c, float v) { samples[pix(x, y) * channels + c] = v; }
  bool is_valid(int x, int y) const { return valid[pix(x, y)] != 0; }
  void set_valid(int x, int y, bool v) {
    valid[pix(x, y)] = v ? 1 : 0;
    if (!v)
      for (int c = 0; c < channels; ++c) set(x, y, c, 0.0f);
  }
  bool in_bounds(int x, int y) const {
    return x >= 1 && x <= width && y >= 1 && y <= height;
  }
  bool empty() const { return width <= 0 || height <= 0; }
};

// Up to 4 channels; entries beyond img.channels are zero.
using Color = std::array<double, 4>;

// Bilinear blend of the surrounding pixels. Supports with weight zero are not
// required, so exact integer coordinates reproduce stored pixels including on
// the last row/column. Returns nullopt when any contributing pixel is outside
// the image or invalid.
std::optional<Color> bilinear_sample(const ImageGrid& img, Point2 p);

// Rec.601 luma; single-channel images pass through.
double luma(const ImageGrid& img, int x, int y);

}  // namespace stitch
