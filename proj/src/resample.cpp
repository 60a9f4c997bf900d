#include "stitch/resample.hpp"

#include <cmath>
#include <numbers>

#include "stitch/errors.hpp"

namespace stitch {

SampleGrid build_sample_grid(Dims tgt_dims, double s) {
  SampleGrid g;
  g.s = s;
  g.N = static_cast<int>(std::floor(s * tgt_dims.width));
  if (g.N < 1) throw StitchError(Err::ScaleTooSmall, "sample grid has no columns");
  g.rows = tgt_dims.height;
  g.xs.resize(g.N);
  for (int i = 1; i <= g.N; ++i)
    g.xs[i - 1] = static_cast<double>(i) * tgt_dims.width / g.N;
  return g;
}

FilteredGrid filter_nonoverlap(const SampleGrid& g, const HalfCylWarp& t) {
  FilteredGrid out;
  out.grid = g;
  out.rows.resize(g.rows);

  for (int row = 1; row <= g.rows; ++row) {
    std::vector<Point2> warped(g.N);
    std::vector<char> keep(g.N, 0);
    for (int i = 0; i < g.N; ++i) {
      Point2 p{g.xs[i], static_cast<double>(row)};
      try {
        Point2 hp = apply_homography(t.h, p);
        if (!t.in_cyl_region(hp.x)) continue;
        warped[i] = cyl_forward(t.c, hp);
        keep[i] = 1;
      } catch (const StitchError&) {
        // points pushed past the horizon break the run
      }
    }

    int best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (int i = 0; i <= g.N; ++i) {
      if (i < g.N && keep[i]) {
        if (run_len == 0) run_start = i;
        ++run_len;
      } else {
        if (run_len > best_len) {
          best_len = run_len;
          best_start = run_start;
        }
        run_len = 0;
      }
    }

    FilteredRow& fr = out.rows[row - 1];
    fr.first = best_start;
    fr.warped.assign(warped.begin() + best_start, warped.begin() + best_start + best_len);
  }
  return out;
}

ResampledStrip resample_strip(const ImageGrid& tgt, const HalfCylWarp& t, const FilteredGrid& g) {
  ResampledStrip strip;
  strip.dir = t.side == PartitionSide::CylRightOfLine ? 1 : -1;
  strip.anchor = Point2{t.c.a0, t.c.b0};

  int W = 0;
  for (const FilteredRow& fr : g.rows) W = std::max(W, static_cast<int>(fr.warped.size()));
  const int H = g.grid.rows;
  strip.row_width.resize(H);
  for (int r = 0; r < H; ++r) strip.row_width[r] = static_cast<int>(g.rows[r].warped.size());
  if (W == 0) return strip;

  const double f = t.c.f;
  if (W >= f * std::numbers::pi / 2.0)
    throw StitchError(Err::OutOfRange, "strip wider than the cylindrical range");

  strip.image = ImageGrid(W, H, tgt.channels, false);
  strip.ordinate.assign(static_cast<size_t>(W) * H, 0.0);
  strip.src_x.assign(static_cast<size_t>(W) * H, 0.0);

  const std::array<double, 9>& m = t.h.data();

#pragma omp parallel for schedule(static)
  for (int row = 1; row <= H; ++row) {
    const double ty = row;
    const int n = strip.row_width[row - 1];
    for (int j = 0; j < n; ++j) {
      // placed canvas abscissa, then its preimage under C and H along row t
      double u = strip.dir * (j + 1);
      double qx = t.c.a0 + f * std::tan(u / f);
      double denom = m[0] - qx * m[6];
      double num = qx * (m[7] * ty + m[8]) - (m[1] * ty + m[2]);
      if (std::abs(denom) <= 1e-12 * (std::abs(m[0]) + std::abs(qx * m[6]))) continue;
      double sx = num / denom;
      double depth = m[6] * sx + m[7] * ty + m[8];
      if (std::abs(depth) <= 1e-12) continue;

      auto color = bilinear_sample(tgt, Point2{sx, ty});
      if (!color) continue;

      double xp = (m[0] * sx + m[1] * ty + m[2]) / depth;
      double yp = (m[3] * sx + m[4] * ty + m[5]) / depth;
      double dx = xp - t.c.a0;
      double yc = f * (yp - t.c.b0) / std::sqrt(dx * dx + f * f) + t.c.b0;

      size_t px = strip.image.pix(j + 1, row);
      for (int c = 0; c < tgt.channels; ++c)
        strip.image.samples[px * tgt.channels + c] = static_cast<float>((*color)[c]);
      strip.image.valid[px] = 1;
      strip.ordinate[px] = yc;
      strip.src_x[px] = sx;
    }
  }

  for (int row = 1; row <= H; ++row)
    if (strip.row_width[row - 1] > 0 && strip.image.is_valid(1, row)) {
      strip.anchor = Point2{t.c.a0, strip.ord(1, row)};
      break;
    }
  return strip;
}

}  // namespace stitch
