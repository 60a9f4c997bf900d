#pragma once
#include <vector>

#include "stitch/image.hpp"
#include "stitch/warp_params.hpp"

namespace stitch {

// Horizontal sample positions shared by every row: x_i = i*w/N for
// i = 1..N with N = floor(s*w).
struct SampleGrid {
  double s = 1.0;
  int N = 0;
  int rows = 0;                // one sample row per integer t in [1, rows]
  std::vector<double> xs;      // size N, strictly increasing
};

// Per-row contiguous run of samples whose warped image lands in the
// cylindrical region, with the recorded warped positions.
struct FilteredRow {
  int first = 0;               // 0-based index into SampleGrid::xs
  std::vector<Point2> warped;  // (x'', y'') per retained sample
};

struct FilteredGrid {
  SampleGrid grid;
  std::vector<FilteredRow> rows;  // rows[t-1] belongs to source row t
};

// The ratio-preserved non-overlap strip. Column j of the strip sits at
// canvas abscissa a0 + dir*(j+1); consecutive columns are exactly one pixel
// apart. Each strip pixel keeps the canvas ordinate it maps to and the
// source abscissa it was sampled from, which lets the compositor paint the
// canvas by inverse lookup without splatting.
struct ResampledStrip {
  ImageGrid image;             // rows = source rows, cols = widest run
  std::vector<int> row_width;  // retained samples per row
  std::vector<double> ordinate;  // canvas y per pixel, row-major
  std::vector<double> src_x;     // source abscissa per pixel, row-major
  Point2 anchor;               // (a0, topmost ordinate of the first column)
  int dir = 1;                 // +1 when the strip grows rightward

  double ord(int x, int y) const { return ordinate[image.pix(x, y)]; }
  double sx(int x, int y) const { return src_x[image.pix(x, y)]; }
  bool empty() const { return image.empty(); }
};

// Throws ScaleTooSmall when floor(s*w) < 1.
SampleGrid build_sample_grid(Dims tgt_dims, double s);

// Keeps, per row, the longest contiguous run of samples mapping into the
// cylindrical region. Empty runs are allowed.
FilteredGrid filter_nonoverlap(const SampleGrid& g, const HalfCylWarp& t);

// Builds the strip by inverse lookup: column j of row t samples the target
// at the unique point of source row t whose warped abscissa equals the
// placed position a0 + dir*(j+1). Forward-mapping the looked-up points
// reproduces the placed positions exactly.
ResampledStrip resample_strip(const ImageGrid& tgt, const HalfCylWarp& t, const FilteredGrid& g);

}  // namespace stitch
