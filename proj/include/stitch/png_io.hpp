#pragma once
#include <string>

#include "stitch/image.hpp"

namespace stitch {

// 8-bit PNG in, intensities scaled by 1/255. Gray and palette images expand
// to their natural channel count; an alpha channel becomes the validity mask
// (alpha == 0 -> invalid) and is dropped from the samples.
ImageGrid read_png(const std::string& path);

// 8-bit PNG out, value*255 rounded half-up. Invalid pixels are written as
// opaque black.
void write_png(const std::string& path, const ImageGrid& img);

// Validity mask as an 8-bit gray PNG (255 valid, 0 invalid).
void write_mask_png(const std::string& path, const ImageGrid& img);

}  // namespace stitch
