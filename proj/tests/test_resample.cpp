#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "stitch/pipeline.hpp"
#include "stitch/resample.hpp"

using namespace stitch;

namespace {

HalfCylWarp make_warp(const Homography& h, double f, double a0, double b0,
                      PartitionSide side) {
  HalfCylWarp t;
  t.h = h;
  t.c = {f, a0, b0};
  t.side = side;
  return t;
}

constexpr double kStraightF = 1099511627776.0;  // 2^40, keeps tan/atan exact

}  // namespace

TEST_CASE("sample grid positions and count") {
  SampleGrid g = build_sample_grid({10, 7}, 0.85);
  CHECK(g.N == 8);
  CHECK(g.rows == 7);
  for (int i = 1; i <= 8; ++i) CHECK(g.xs[i - 1] == doctest::Approx(1.25 * i).epsilon(1e-12));

  SampleGrid full = build_sample_grid({10, 7}, 1.0);
  CHECK(full.N == 10);
  for (int i = 1; i <= 10; ++i) CHECK(full.xs[i - 1] == doctest::Approx(i).epsilon(1e-12));

  CHECK_THROWS_AS(build_sample_grid({10, 7}, 0.05), StitchError);
}

TEST_CASE("filter keeps the run past the partition line") {
  HalfCylWarp t = make_warp(Homography::identity(), kStraightF, 5.0, 0.0,
                            PartitionSide::CylRightOfLine);
  SampleGrid g = build_sample_grid({10, 3}, 1.0);
  FilteredGrid fg = filter_nonoverlap(g, t);
  REQUIRE(fg.rows.size() == 3);
  for (const FilteredRow& fr : fg.rows) {
    CHECK(fr.first == 5);
    REQUIRE(fr.warped.size() == 5);
    for (size_t k = 0; k < fr.warped.size(); ++k)
      CHECK(fr.warped[k].x == doctest::Approx(6.0 + k).epsilon(1e-9));
  }
}

TEST_CASE("horizon samples split runs and the longest run wins") {
  // depth 1 - 0.2 x vanishes at x = 5; beyond it abscissas turn negative
  Homography h({1, 0, 0, 0, 1, 0, -0.2, 0, 1});
  HalfCylWarp t = make_warp(h, kStraightF, -100.0, 0.0, PartitionSide::CylRightOfLine);

  FilteredGrid fg = filter_nonoverlap(build_sample_grid({10, 2}, 1.0), t);
  for (const FilteredRow& fr : fg.rows) {
    CHECK(fr.first == 5);
    CHECK(fr.warped.size() == 5);
  }

  // equal-length runs tie toward the earlier one
  FilteredGrid tie = filter_nonoverlap(build_sample_grid({9, 2}, 1.0), t);
  for (const FilteredRow& fr : tie.rows) {
    CHECK(fr.first == 0);
    CHECK(fr.warped.size() == 4);
  }
}

TEST_CASE("an untouched warp reproduces the source strip") {
  ImageGrid tgt = make_test_image(40, 30, 21);
  HalfCylWarp t = make_warp(Homography::identity(), kStraightF, 0.0, 0.0,
                            PartitionSide::CylRightOfLine);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({40, 30}, 1.0), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);

  REQUIRE(strip.image.width == 40);
  REQUIRE(strip.image.height == 30);
  CHECK(strip.dir == 1);
  CHECK(strip.image.samples == tgt.samples);
  for (int y = 1; y <= 30; ++y)
    for (int x = 1; x <= 40; ++x) {
      CHECK(strip.image.is_valid(x, y));
      CHECK(strip.ord(x, y) == doctest::Approx(y).epsilon(1e-12));
      CHECK(strip.sx(x, y) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("constant images stay constant under bending") {
  ImageGrid tgt = testutil::constant_image(60, 40, 1, 0.6f);
  HalfCylWarp t = make_warp(Homography::identity(), 200.0, 0.0, 0.0,
                            PartitionSide::CylRightOfLine);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({60, 40}, 1.0), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);
  REQUIRE(!strip.empty());
  int valid = 0;
  for (int y = 1; y <= strip.image.height; ++y)
    for (int x = 1; x <= strip.image.width; ++x)
      if (strip.image.is_valid(x, y)) {
        CHECK(strip.image.at(x, y, 0) == 0.6f);
        ++valid;
      }
  CHECK(valid > 40 * 40);
}

TEST_CASE("a stretching warp resamples a ramp onto a finer grid") {
  const int w = 50, h = 8;
  ImageGrid tgt(w, h, 1);
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x) tgt.set(x, y, 0, static_cast<float>(x) / w);

  HalfCylWarp t = make_warp(Homography::scale(2, 1), kStraightF, 0.0, 0.0,
                            PartitionSide::CylRightOfLine);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({w, h}, 2.0), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);

  REQUIRE(strip.image.width == 2 * w);
  // column 1 pulls from source x = 0.5, before the first pixel
  CHECK(!strip.image.is_valid(1, 4));
  for (int j = 2; j <= 2 * w; ++j) {
    REQUIRE(strip.image.is_valid(j, 4));
    CHECK(strip.image.at(j, 4, 0) ==
          doctest::Approx(static_cast<double>(j) / (2 * w)).epsilon(1e-6));
  }
}

TEST_CASE("retained width matches the scaled visible width") {
  // x' = 0.8 x + 100, line at 120: visible 175 source columns, 140 samples
  Homography h({0.8, 0, 100, 0, 1, 0, 0, 0, 1});
  HalfCylWarp t = make_warp(h, 500.0, 120.0, 0.0, PartitionSide::CylRightOfLine);
  ImageGrid tgt = make_test_image(200, 50, 31);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({200, 50}, 0.8), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);

  REQUIRE(strip.image.width == 140);
  for (int r = 0; r < 50; ++r) CHECK(strip.row_width[r] == 140);

  // bending pushes the outermost lookups past the source edge
  for (int j = 1; j <= 135; ++j) CHECK(strip.image.is_valid(j, 25));
  for (int j = 138; j <= 140; ++j) CHECK(!strip.image.is_valid(j, 25));
}

TEST_CASE("strip pixels sit exactly one canvas pixel apart") {
  Homography h({0.8, 0, 100, 0, 1, 0, 1e-4, 0, 1});
  HalfCylWarp t = make_warp(h, 400.0, 120.0, 10.0, PartitionSide::CylRightOfLine);
  ImageGrid tgt = make_test_image(200, 50, 33);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({200, 50}, 0.8), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);
  REQUIRE(!strip.empty());

  int checked = 0;
  for (int y = 1; y <= strip.image.height; y += 7)
    for (int x = 1; x <= strip.image.width; ++x) {
      if (!strip.image.is_valid(x, y)) continue;
      Point2 fwd = half_cyl_forward(t, {strip.sx(x, y), static_cast<double>(y)});
      CHECK(fwd.x == doctest::Approx(120.0 + x).epsilon(1e-9));
      CHECK(fwd.y == doctest::Approx(strip.ord(x, y)).epsilon(1e-9));
      ++checked;
    }
  CHECK(checked > 500);
}

TEST_CASE("runs wider than the cylindrical range are rejected") {
  Homography h({0.8, 0, 100, 0, 1, 0, 0, 0, 1});
  HalfCylWarp t = make_warp(h, 50.0, 120.0, 0.0, PartitionSide::CylRightOfLine);
  ImageGrid tgt = make_test_image(200, 50, 35);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({200, 50}, 0.8), t);
  CHECK_THROWS_AS(resample_strip(tgt, t, fg), StitchError);
}

TEST_CASE("a warp entirely inside the overlap yields an empty strip") {
  HalfCylWarp t = make_warp(Homography::identity(), kStraightF, 100.0, 0.0,
                            PartitionSide::CylRightOfLine);
  ImageGrid tgt = make_test_image(10, 5, 37);
  FilteredGrid fg = filter_nonoverlap(build_sample_grid({10, 5}, 1.0), t);
  ResampledStrip strip = resample_strip(tgt, t, fg);
  CHECK(strip.empty());
  for (int r = 0; r < 5; ++r) CHECK(strip.row_width[r] == 0);
}
