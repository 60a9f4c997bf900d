#pragma once
#include <vector>

#include "stitch/compositor.hpp"
#include "stitch/features.hpp"
#include "stitch/image.hpp"

// Plain single-threaded twins of the OpenMP kernels. They run the same
// arithmetic in the same per-pixel order, so outputs must match the parallel
// versions bit for bit. Used by the determinism tests and the kernel bench.
namespace stitch::serial {

void gaussian_blur_field(std::vector<float>& field, int w, int h, double sigma);

std::vector<float> harris_response(const std::vector<float>& gray, int w, int h,
                                   const DetectorConfig& cfg);

ImageGrid downscale(const ImageGrid& img, int factor);

std::vector<double> seam_energy(const ImageGrid& a, const ImageGrid& b,
                                const std::vector<uint8_t>& mask);

// Backward-homography render of the whole target onto the canvas.
ImageGrid render_homography(const ImageGrid& tgt, const Homography& h, const Canvas& cv);

}  // namespace stitch::serial
