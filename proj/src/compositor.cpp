#include "stitch/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stitch/errors.hpp"

namespace stitch {
namespace {

constexpr double kSeamBig = 1e6;

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  void add(double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  bool empty() const { return x0 > x1; }
};

// keeps the part of the polygon with dir*(x - a0) <= 0 (the homography side)
std::vector<Point2> clip_to_homography_side(const std::vector<Point2>& poly, double a0, int dir) {
  std::vector<Point2> out;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    double da = dir * (a.x - a0);
    double db = dir * (b.x - a0);
    bool ia = da <= 0.0, ib = db <= 0.0;
    if (ia) out.push_back(a);
    if (ia != ib) {
      double s = da / (da - db);
      out.push_back(Point2{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
    }
  }
  return out;
}

}  // namespace

Canvas canvas_bounds(Dims ref_dims, Dims tgt_dims, const HalfCylWarp& warp,
                     const ResampledStrip* strip, bool homography_only) {
  if (ref_dims.width < 1 || ref_dims.height < 1)
    throw StitchError(Err::EmptyCanvas, "empty reference");

  Box box;
  box.add(1, 1);
  box.add(ref_dims.width, ref_dims.height);

  const int dir = warp.side == PartitionSide::CylRightOfLine ? 1 : -1;
  std::vector<Point2> quad = {
      apply_homography(warp.h, {1, 1}),
      apply_homography(warp.h, {static_cast<double>(tgt_dims.width), 1}),
      apply_homography(warp.h, {static_cast<double>(tgt_dims.width),
                                static_cast<double>(tgt_dims.height)}),
      apply_homography(warp.h, {1, static_cast<double>(tgt_dims.height)})};
  if (!homography_only) quad = clip_to_homography_side(quad, warp.c.a0, dir);
  for (const Point2& p : quad) box.add(p.x, p.y);

  if (strip && !strip->empty()) {
    int W = strip->image.width;
    box.add(warp.c.a0 + dir * 1.0, warp.c.b0);
    box.add(warp.c.a0 + dir * static_cast<double>(W), warp.c.b0);
    for (int y = 1; y <= strip->image.height; ++y)
      for (int x = 1; x <= strip->row_width[y - 1]; ++x)
        if (strip->image.is_valid(x, y)) {
          double o = strip->ord(x, y);
          box.add(warp.c.a0, o);
        }
  }

  if (box.empty()) throw StitchError(Err::EmptyCanvas, "nothing to render");

  Canvas cv;
  cv.min_x = static_cast<int>(std::floor(box.x0));
  cv.min_y = static_cast<int>(std::floor(box.y0));
  cv.max_x = static_cast<int>(std::ceil(box.x1));
  cv.max_y = static_cast<int>(std::ceil(box.y1));
  return cv;
}

ImageGrid render_reference(const ImageGrid& ref, const Canvas& cv) {
  ImageGrid out(cv.width(), cv.height(), ref.channels, false);
#pragma omp parallel for schedule(static)
  for (int y = 1; y <= out.height; ++y) {
    int ry = y + cv.min_y - 1;
    if (ry < 1 || ry > ref.height) continue;
    for (int x = 1; x <= out.width; ++x) {
      int rx = x + cv.min_x - 1;
      if (rx < 1 || rx > ref.width || !ref.is_valid(rx, ry)) continue;
      size_t src = ref.pix(rx, ry), dst = out.pix(x, y);
      for (int c = 0; c < ref.channels; ++c)
        out.samples[dst * ref.channels + c] = ref.samples[src * ref.channels + c];
      out.valid[dst] = 1;
    }
  }
  return out;
}

ImageGrid render_target(const ImageGrid& tgt, const HalfCylWarp& warp,
                        const ResampledStrip* strip, const Canvas& cv,
                        bool homography_only) {
  ImageGrid out(cv.width(), cv.height(), tgt.channels, false);
  Homography hinv = invert_homography(warp.h);
  const std::array<double, 9>& m = hinv.data();
  const int dir = warp.side == PartitionSide::CylRightOfLine ? 1 : -1;

#pragma omp parallel for schedule(static)
  for (int y = 1; y <= out.height; ++y) {
    double ry = y + cv.min_y - 1;
    for (int x = 1; x <= out.width; ++x) {
      double rx = x + cv.min_x - 1;
      if (!homography_only && warp.in_cyl_region(rx)) continue;
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

  if (homography_only || !strip || strip->empty()) return out;

  const int W = strip->image.width;
  const int H = strip->image.height;

#pragma omp parallel for schedule(static)
  for (int j = 0; j < W; ++j) {
    int cx = static_cast<int>(std::lround(cv.to_canvas_x(warp.c.a0 + dir * (j + 1.0))));
    if (cx < 1 || cx > out.width) continue;
    for (int t = 1; t < H; ++t) {
      if (strip->row_width[t - 1] <= j || strip->row_width[t] <= j) continue;
      if (!strip->image.is_valid(j + 1, t) || !strip->image.is_valid(j + 1, t + 1)) continue;
      double y0 = strip->ord(j + 1, t), y1 = strip->ord(j + 1, t + 1);
      double lo = std::min(y0, y1), hi = std::max(y0, y1);
      int cy0 = static_cast<int>(std::ceil(cv.to_canvas_y(lo)));
      int cy1 = static_cast<int>(std::floor(cv.to_canvas_y(hi)));
      cy0 = std::max(cy0, 1);
      cy1 = std::min(cy1, out.height);
      for (int cy = cy0; cy <= cy1; ++cy) {
        double ryy = cy + cv.min_y - 1;
        double alpha = y1 == y0 ? 0.0 : (ryy - y0) / (y1 - y0);
        double sx = strip->sx(j + 1, t) + alpha * (strip->sx(j + 1, t + 1) - strip->sx(j + 1, t));
        auto color = bilinear_sample(tgt, Point2{sx, t + alpha});
        if (!color) continue;
        size_t dst = out.pix(cx, cy);
        for (int c = 0; c < tgt.channels; ++c)
          out.samples[dst * tgt.channels + c] = static_cast<float>((*color)[c]);
        out.valid[dst] = 1;
      }
    }
  }
  return out;
}

ImageGrid downscale(const ImageGrid& img, int factor) {
  if (factor < 1) throw StitchError(Err::OutOfRange, "downscale factor must be >= 1");
  if (factor == 1) return img;
  int ow = (img.width + factor - 1) / factor;
  int oh = (img.height + factor - 1) / factor;
  ImageGrid out(ow, oh, img.channels, false);

#pragma omp parallel for schedule(static)
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
  std::vector<double> e(n, kSeamBig);
#pragma omp parallel for schedule(static)
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

SeamPath dp_seam(const std::vector<double>& energy, int w, int h) {
  // cost-to-go from each cell to the bottom row; reconstruction below always
  // takes the smallest column among minimal continuations, which yields the
  // lexicographically smallest minimal path
  std::vector<double> D(energy);
  for (int y = h - 2; y >= 0; --y)
    for (int x = 0; x < w; ++x) {
      double best = D[static_cast<size_t>(y + 1) * w + x];
      if (x > 0) best = std::min(best, D[static_cast<size_t>(y + 1) * w + x - 1]);
      if (x + 1 < w) best = std::min(best, D[static_cast<size_t>(y + 1) * w + x + 1]);
      D[static_cast<size_t>(y) * w + x] += best;
    }

  SeamPath path;
  path.col.resize(h);
  int cur = 0;
  for (int x = 1; x < w; ++x)
    if (D[x] < D[cur]) cur = x;
  path.col[0] = cur;
  path.cost = D[cur];
  for (int y = 1; y < h; ++y) {
    int best = -1;
    double bv = std::numeric_limits<double>::infinity();
    for (int dx = -1; dx <= 1; ++dx) {
      int x = cur + dx;
      if (x < 0 || x >= w) continue;
      double v = D[static_cast<size_t>(y) * w + x];
      if (v < bv) {
        bv = v;
        best = x;
      }
    }
    cur = best;
    path.col[y] = cur;
  }
  return path;
}

SeamLabels find_seam(const ImageGrid& a, const ImageGrid& b,
                     const std::vector<uint8_t>& mask, const SeamOptions& opts) {
  const int W = a.width, H = a.height;
  if (std::find(mask.begin(), mask.end(), uint8_t(1)) == mask.end())
    throw StitchError(Err::NoOverlap, "seam mask is empty");

  std::vector<double> e = seam_energy(a, b, mask);
  std::vector<int> path = dp_seam(e, W, H).col;

  SeamLabels labels;
  labels.width = W;
  labels.height = H;
  labels.label.resize(static_cast<size_t>(W) * H);
  uint8_t left = opts.ref_on_left ? static_cast<uint8_t>(Label::FromReference)
                                  : static_cast<uint8_t>(Label::FromTarget);
  uint8_t right = left ^ 1;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      labels.label[static_cast<size_t>(y) * W + x] = x <= path[y] ? left : right;
  return labels;
}

SeamLabels upscale_labels(const SeamLabels& coarse, int factor, int full_w, int full_h) {
  SeamLabels out;
  out.width = full_w;
  out.height = full_h;
  out.label.resize(static_cast<size_t>(full_w) * full_h);
  for (int y = 0; y < full_h; ++y) {
    int cy = std::min(y / factor, coarse.height - 1);
    for (int x = 0; x < full_w; ++x) {
      int cx = std::min(x / factor, coarse.width - 1);
      out.label[static_cast<size_t>(y) * full_w + x] =
          coarse.label[static_cast<size_t>(cy) * coarse.width + cx];
    }
  }
  return out;
}

ImageGrid blend(const ImageGrid& ref_render, const ImageGrid& tgt_render,
                const SeamLabels& labels, int ox, int oy, bool feather) {
  if (ref_render.width != tgt_render.width || ref_render.height != tgt_render.height ||
      ref_render.channels != tgt_render.channels)
    throw StitchError(Err::EmptyCanvas, "render size mismatch");

  const int W = ref_render.width, H = ref_render.height, C = ref_render.channels;
  ImageGrid out(W, H, C, false);
  const int radius = 3;

#pragma omp parallel for schedule(static)
  for (int y = 1; y <= H; ++y) {
    for (int x = 1; x <= W; ++x) {
      size_t p = out.pix(x, y);
      bool rv = ref_render.valid[p], tv = tgt_render.valid[p];
      if (!rv && !tv) continue;

      auto label_at = [&](int cx) -> int {
        int lx = cx - ox + 1, ly = y - oy + 1;
        if (lx < 1 || lx > labels.width || ly < 1 || ly > labels.height) return -1;
        return labels.at(lx, ly);
      };

      double wt;  // weight of the target image
      if (!rv)
        wt = 1.0;
      else if (!tv)
        wt = 0.0;
      else {
        int lab = label_at(x);
        if (lab < 0) lab = static_cast<int>(Label::FromReference);
        if (!feather)
          wt = lab == static_cast<int>(Label::FromTarget) ? 1.0 : 0.0;
        else {
          int sum = 0, cnt = 0;
          for (int dx = -radius; dx <= radius; ++dx) {
            int l = label_at(x + dx);
            if (l < 0) l = lab;
            sum += l;
            ++cnt;
          }
          wt = static_cast<double>(sum) / cnt;
        }
      }

      for (int c = 0; c < C; ++c) {
        double rvv = ref_render.samples[p * C + c];
        double tvv = tgt_render.samples[p * C + c];
        out.samples[p * C + c] = static_cast<float>((1.0 - wt) * rvv + wt * tvv);
      }
      out.valid[p] = 1;
    }
  }
  return out;
}

}  // namespace stitch
