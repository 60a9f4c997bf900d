#pragma once
#include <cstdint>
#include <vector>

#include "stitch/image.hpp"
#include "stitch/resample.hpp"
#include "stitch/warp_params.hpp"

namespace stitch {

// Inclusive pixel bounds in reference coordinates. Canvas pixel (1,1)
// corresponds to reference pixel (min_x, min_y).
struct Canvas {
  int min_x = 1, min_y = 1, max_x = 1, max_y = 1;
  int width() const { return max_x - min_x + 1; }
  int height() const { return max_y - min_y + 1; }
  double to_canvas_x(double rx) const { return rx - min_x + 1; }
  double to_canvas_y(double ry) const { return ry - min_y + 1; }
};

enum class Label : uint8_t { FromReference = 0, FromTarget = 1 };

struct SeamLabels {
  int width = 0, height = 0;
  std::vector<uint8_t> label;  // row-major, values from Label
  uint8_t at(int x, int y) const { return label[static_cast<size_t>(y - 1) * width + (x - 1)]; }
};

struct SeamOptions {
  bool ref_on_left = true;     // which side of the path keeps reference pixels
};

// Union of the reference rectangle, the homography-region part of the warped
// target and the strip extent, rounded outward to integers.
Canvas canvas_bounds(Dims ref_dims, Dims tgt_dims, const HalfCylWarp& warp,
                     const ResampledStrip* strip, bool homography_only);

// Copies the reference into canvas coordinates.
ImageGrid render_reference(const ImageGrid& ref, const Canvas& cv);

// Paints the warped target: backward homography lookup on the overlap side
// of the partition line, strip compositing on the other side. When
// homography_only is set the whole target is rendered through H.
ImageGrid render_target(const ImageGrid& tgt, const HalfCylWarp& warp,
                        const ResampledStrip* strip, const Canvas& cv,
                        bool homography_only);

// Box-filter downscale by an integer factor; partial edge blocks average
// whatever pixels are present. A result pixel is valid only when every
// contributing pixel is valid.
ImageGrid downscale(const ImageGrid& img, int factor);

// Per-pixel squared color difference, BIG outside the overlap mask.
std::vector<double> seam_energy(const ImageGrid& a, const ImageGrid& b,
                                const std::vector<uint8_t>& mask);

// One 0-based column per row, |col[r+1] - col[r]| <= 1.
struct SeamPath {
  std::vector<int> col;
  double cost = 0;
};

// Minimum-cost monotone vertical path through a row-major energy field.
// Ties resolve to the lexicographically smallest column sequence.
SeamPath dp_seam(const std::vector<double>& energy, int w, int h);

// Minimum-cost monotone vertical path (8-connected, one column step per
// row). Among equal-cost paths the leftmost one is chosen. Labels mark each
// pixel by its side of the path. Throws NoOverlap on an empty mask.
SeamLabels find_seam(const ImageGrid& a, const ImageGrid& b,
                     const std::vector<uint8_t>& mask, const SeamOptions& opts = {});

// Nearest-neighbor upscale of the label raster to the stated size.
SeamLabels upscale_labels(const SeamLabels& coarse, int factor, int full_w, int full_h);

// Hard cut along the labels; feather widens the cut into a short linear
// cross-fade where both sources are valid. (ox, oy) places the label raster
// on the canvas.
ImageGrid blend(const ImageGrid& ref_render, const ImageGrid& tgt_render,
                const SeamLabels& labels, int ox, int oy, bool feather);

}  // namespace stitch
