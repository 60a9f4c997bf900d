#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "stitch/pipeline.hpp"
#include "stitch/png_io.hpp"

using namespace stitch;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / "hcstitch_tests";
  fs::create_directories(d);
  return d;
}

StitchReport zero_times(StitchReport r) {
  r.warp_time_s = r.seam_time_s = r.total_time_s = 0;
  return r;
}

}  // namespace

TEST_CASE("test images are reproducible by seed") {
  ImageGrid a = make_test_image(160, 120, 42);
  ImageGrid b = make_test_image(160, 120, 42);
  ImageGrid c = make_test_image(160, 120, 43);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("synthetic layout window geometry") {
  SynthLayout lo = synth_layout({1000, 700}, 0.3);
  CHECK(lo.window_w == 550);
  CHECK(lo.window_h == 636);
  CHECK(lo.ox == 32);
  CHECK(lo.shift == doctest::Approx(0.7 * 550).epsilon(1e-12));

  CHECK_THROWS_AS(synth_layout({1000, 700}, 0.05), StitchError);
  CHECK_THROWS_AS(synth_layout({1000, 700}, 0.95), StitchError);
  CHECK_THROWS_AS(synth_layout({100, 80}, 0.5), StitchError);
}

TEST_CASE("a pure shift pair is a pair of exact crops") {
  // 832 wide at 0.5 overlap gives window 512 and shift 256; powers of two
  // keep the resampling lookups on integer coordinates
  ImageGrid src = make_test_image(832, 700, 3);
  SynthLayout lo = synth_layout({832, 700}, 0.5);
  REQUIRE(lo.window_w == 512);
  REQUIRE(lo.shift == 256.0);

  SyntheticPair pair = make_synthetic_pair(src, Homography::translation(256, 0), 0.5);
  ImageGrid ref_want = testutil::crop(src, 33, 33, 512, 636);
  ImageGrid tgt_want = testutil::crop(src, 289, 33, 512, 636);
  CHECK(pair.ref.samples == ref_want.samples);
  CHECK(pair.tgt.samples == tgt_want.samples);
  CHECK(pair.ref.valid == ref_want.valid);
  CHECK(pair.tgt.valid == tgt_want.valid);
}

TEST_CASE("the pipeline recovers a synthetic warp") {
  ImageGrid src = make_test_image(1100, 800, 7);
  SynthLayout lo = synth_layout({1100, 800}, 0.45);
  Homography h_true = synth_homography(lo, 2e-4, 7);
  SyntheticPair pair = make_synthetic_pair(src, h_true, 0.45);

  StitchConfig cfg;
  cfg.seed = 7;
  StitchOutput out = run_stitch_images(pair.ref, pair.tgt, cfg);

  CHECK(out.report.alignment_rmse_px < 0.5);
  CHECK(testutil::matrix_distance(Homography(out.report.homography), h_true) < 1e-3);
  CHECK(out.report.inlier_count >= 10);

  // the reference must arrive unharmed
  const Canvas& cv = out.canvas;
  for (int y = 1; y <= pair.ref.height; ++y)
    for (int x = 1; x <= pair.ref.width; ++x) {
      if (!pair.ref.is_valid(x, y)) continue;
      int cx = static_cast<int>(cv.to_canvas_x(x));
      int cy = static_cast<int>(cv.to_canvas_y(y));
      REQUIRE(out.image.is_valid(cx, cy));
    }

  CHECK(out.report.scale == doctest::Approx(std::sqrt(
            out.report.sim_a * out.report.sim_a + out.report.sim_b * out.report.sim_b))
            .epsilon(1e-15));
  CHECK((out.report.a0 == 1.0 || out.report.a0 == pair.ref.width));
  REQUIRE(!out.report.degenerate_focal);
  CHECK(out.report.focal >= pair.ref.width / 8.0);
  CHECK(out.report.focal <= 8.0 * pair.ref.width);
  CHECK(out.sample_columns ==
        static_cast<int>(std::floor(out.report.scale * pair.tgt.width)));
}

TEST_CASE("repeated runs are identical apart from wall time") {
  ImageGrid src = make_test_image(900, 640, 11);
  SynthLayout lo = synth_layout({900, 640}, 0.4);
  SyntheticPair pair = make_synthetic_pair(src, synth_homography(lo, 2e-4, 11), 0.4);

  StitchConfig cfg;
  cfg.seed = 11;
  StitchOutput a = run_stitch_images(pair.ref, pair.tgt, cfg);
  StitchOutput b = run_stitch_images(pair.ref, pair.tgt, cfg);

  CHECK(a.image.samples == b.image.samples);
  CHECK(a.image.valid == b.image.valid);
  CHECK(a.labels.label == b.labels.label);
  CHECK(report_json(zero_times(a.report)) == report_json(zero_times(b.report)));
}

TEST_CASE("values stay continuous across the partition column") {
  // smooth field, identity homography, strong bending: any rendering break
  // at the line would show up as a jump exceeding the field's gradient
  const int w = 300, h = 200;
  ImageGrid tgt(w, h, 1);
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x) tgt.set(x, y, 0, (x + y) / 2000.0f);

  HalfCylWarp warp;
  warp.h = Homography::identity();
  warp.c = {300.0, 150.0, 100.0};
  warp.side = PartitionSide::CylRightOfLine;

  FilteredGrid fg = filter_nonoverlap(build_sample_grid({w, h}, 1.0), warp);
  ResampledStrip strip = resample_strip(tgt, warp, fg);
  Canvas cv = canvas_bounds({w, h}, {w, h}, warp, &strip, false);
  ImageGrid out = render_target(tgt, warp, &strip, cv, false);

  const float jump = 2.0f / 255.0f;
  int checked = 0;
  for (int y = 1; y <= out.height; ++y) {
    for (int cx = static_cast<int>(cv.to_canvas_x(150));
         cx < static_cast<int>(cv.to_canvas_x(280)); ++cx) {
      if (!out.is_valid(cx, y) || !out.is_valid(cx + 1, y)) continue;
      CHECK(std::abs(out.at(cx, y, 0) - out.at(cx + 1, y, 0)) < jump);
      ++checked;
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("degenerate stages map to their exit codes") {
  ImageGrid img = make_test_image(300, 240, 5);

  // identical frames leave the partition side ambiguous
  try {
    StitchConfig cfg;
    run_stitch_images(img, img, cfg);
    FAIL("expected a staged failure");
  } catch (const StagedError& e) {
    CHECK(e.exit_code() == 4);
    CHECK(e.code() == Err::AmbiguousSide);
  }

  // a vertical offset pair is rejected during registration
  ImageGrid top = testutil::crop(img, 1, 1, 300, 200);
  ImageGrid bottom = testutil::crop(img, 1, 41, 300, 200);
  try {
    StitchConfig cfg;
    run_stitch_images(top, bottom, cfg);
    FAIL("expected a staged failure");
  } catch (const StagedError& e) {
    CHECK(e.exit_code() == 3);
    CHECK(e.code() == Err::VerticalPair);
  }
}

TEST_CASE("file driver reports staged exit codes") {
  fs::path dir = temp_dir();
  fs::path out = dir / "out.png";
  StitchConfig cfg;

  CHECK(run_stitch((dir / "missing.png").string(), (dir / "missing.png").string(),
                   out.string(), "", cfg) == 2);

  ImageGrid img = make_test_image(300, 240, 5);
  fs::path same = dir / "same.png";
  write_png(same.string(), img);
  CHECK(run_stitch(same.string(), same.string(), out.string(), "", cfg) == 4);

  ImageGrid flat = testutil::constant_image(240, 200, 3, 0.5f);
  fs::path flat_p = dir / "flat.png";
  write_png(flat_p.string(), flat);
  CHECK(run_stitch(flat_p.string(), flat_p.string(), out.string(), "", cfg) == 3);

  fs::path top_p = dir / "top.png", bottom_p = dir / "bottom.png";
  write_png(top_p.string(), testutil::crop(img, 1, 1, 300, 200));
  write_png(bottom_p.string(), testutil::crop(img, 1, 41, 300, 200));
  CHECK(run_stitch(top_p.string(), bottom_p.string(), out.string(), "", cfg) == 3);
}

TEST_CASE("the file driver writes the image and the metrics") {
  ImageGrid src = make_test_image(900, 640, 13);
  SynthLayout lo = synth_layout({900, 640}, 0.4);
  SyntheticPair pair = make_synthetic_pair(src, synth_homography(lo, 2e-4, 13), 0.4);

  fs::path dir = temp_dir();
  fs::path ref_p = dir / "ref.png", tgt_p = dir / "tgt.png";
  fs::path out_p = dir / "stitched.png", met_p = dir / "metrics.json";
  write_png(ref_p.string(), pair.ref);
  write_png(tgt_p.string(), pair.tgt);

  StitchConfig cfg;
  cfg.seed = 13;
  REQUIRE(run_stitch(ref_p.string(), tgt_p.string(), out_p.string(), met_p.string(),
                     cfg) == 0);

  ImageGrid stitched = read_png(out_p.string());
  CHECK(stitched.width >= pair.ref.width);
  CHECK(stitched.height >= pair.ref.height);

  std::ifstream f(met_p);
  REQUIRE(f.good());
  nlohmann::json j = nlohmann::json::parse(f);
  const char* keys[] = {"homography", "similarity",        "scale",
                        "a0",         "b0",                "focal",
                        "degenerate_focal",                "inlier_count",
                        "alignment_rmse_px",               "warp_time_s",
                        "seam_time_s",                     "total_time_s"};
  CHECK(j.size() == 12);
  for (const char* k : keys) CHECK(j.contains(k));
  REQUIRE(j["homography"].is_array());
  CHECK(j["homography"].size() == 9);
  for (const char* k : {"a", "b", "tx", "ty"}) CHECK(j["similarity"].contains(k));
  CHECK(j["inlier_count"].get<int>() >= 10);
  CHECK(j["alignment_rmse_px"].get<double>() < 1.0);
  CHECK(j["total_time_s"].get<double>() > 0.0);
}

TEST_CASE("timing rows carry both seam columns") {
  StitchConfig cfg;
  cfg.seed = 3;
  std::vector<TimingRow> rows = timing_report({{320, 280}}, cfg, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].width == 320);
  CHECK(rows[0].height == 280);
  CHECK(rows[0].warp_time_s > 0.0);
  CHECK(rows[0].total_full_s > 0.0);
  CHECK(rows[0].total_resized_s > 0.0);
  CHECK(rows[0].speedup == doctest::Approx(rows[0].total_full_s / rows[0].total_resized_s));

  nlohmann::json table = nlohmann::json::parse(timing_json(rows));
  REQUIRE(table.is_array());
  CHECK(table[0]["width"] == 320);
  CHECK(table[0].contains("total_full_s"));
  CHECK(table[0].contains("total_resized_s"));

  SUBCASE("scale one makes the columns measure the same configuration") {
    cfg.seam_scale = 1;
    std::vector<TimingRow> same = timing_report({{320, 280}}, cfg, 2);
    CHECK(same[0].speedup > 0.5);
    CHECK(same[0].speedup < 2.0);
  }
}
