#include "stitch/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace stitch {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint8_t to_byte(float v) {
  double scaled = static_cast<double>(v) * 255.0 + 0.5;  // round half-up
  if (scaled < 0) scaled = 0;
  if (scaled > 255) scaled = 255;
  return static_cast<uint8_t>(scaled);
}

}  // namespace

ImageGrid read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw StitchError(Err::IoError, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw StitchError(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw StitchError(Err::IoError, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw StitchError(Err::IoError, "failed to decode " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  int nch = png_get_channels(png, info);
  std::vector<uint8_t> raw(static_cast<size_t>(w) * h * nch);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + static_cast<size_t>(y) * w * nch;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  bool has_alpha = (nch == 2 || nch == 4);
  int out_ch = has_alpha ? nch - 1 : nch;
  ImageGrid img(static_cast<int>(w), static_cast<int>(h), out_ch);
  for (int y = 1; y <= img.height; ++y) {
    for (int x = 1; x <= img.width; ++x) {
      const uint8_t* px = raw.data() + (static_cast<size_t>(y - 1) * w + (x - 1)) * nch;
      bool ok = !has_alpha || px[out_ch] > 0;
      if (!ok) {
        img.set_valid(x, y, false);
        continue;
      }
      for (int c = 0; c < out_ch; ++c) img.set(x, y, c, px[c] / 255.0f);
    }
  }
  return img;
}

namespace {

void write_png_bytes(const std::string& path, int w, int h, int nch,
                     const std::vector<uint8_t>& bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw StitchError(Err::IoError, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw StitchError(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw StitchError(Err::IoError, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw StitchError(Err::IoError, "failed to encode " + path);
  }
  png_init_io(png, fp.get());
  int color = nch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, w, h, 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<size_t>(y) * w * nch);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const std::string& path, const ImageGrid& img) {
  if (img.empty()) throw StitchError(Err::IoError, "empty image");
  int nch = img.channels >= 3 ? 3 : 1;
  std::vector<uint8_t> bytes(static_cast<size_t>(img.width) * img.height * nch, 0);
  for (int y = 1; y <= img.height; ++y)
    for (int x = 1; x <= img.width; ++x) {
      if (!img.is_valid(x, y)) continue;  // stays black
      uint8_t* px = bytes.data() + (static_cast<size_t>(y - 1) * img.width + (x - 1)) * nch;
      for (int c = 0; c < nch; ++c) px[c] = to_byte(img.at(x, y, std::min(c, img.channels - 1)));
    }
  write_png_bytes(path, img.width, img.height, nch, bytes);
}

void write_mask_png(const std::string& path, const ImageGrid& img) {
  std::vector<uint8_t> bytes(static_cast<size_t>(img.width) * img.height, 0);
  for (size_t i = 0; i < img.valid.size(); ++i) bytes[i] = img.valid[i] ? 255 : 0;
  write_png_bytes(path, img.width, img.height, 1, bytes);
}

}  // namespace stitch
