#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stitch/pipeline.hpp"
#include "stitch/png_io.hpp"

namespace {

std::vector<stitch::Dims> parse_resolutions(const std::string& spec) {
  std::vector<stitch::Dims> out;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    int w = 0, h = 0;
    if (std::sscanf(tok.c_str(), "%dx%d", &w, &h) != 2 || w < 64 || h < 64)
      throw CLI::ValidationError("--resolutions", "expected WxH entries, got '" + tok + "'");
    out.push_back({w, h});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run_synth(const std::string& image, double overlap, double perspective,
              unsigned seed, const std::string& dir) {
  try {
    stitch::ImageGrid src;
    try {
      src = stitch::read_png(image);
    } catch (const stitch::StitchError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    stitch::SynthLayout lo = stitch::synth_layout({src.width, src.height}, overlap);
    stitch::Homography h = stitch::synth_homography(lo, perspective, seed);
    stitch::SyntheticPair pair = stitch::make_synthetic_pair(src, h, overlap);

    std::filesystem::create_directories(dir);
    stitch::write_png(dir + "/ref.png", pair.ref);
    stitch::write_png(dir + "/tgt.png", pair.tgt);
    nlohmann::json j;
    j["h_true"] = pair.h_true.data();
    std::ofstream f(dir + "/truth.json", std::ios::binary);
    if (!f) throw stitch::StitchError(stitch::Err::IoError, "cannot write " + dir + "/truth.json");
    f << j.dump(2) << "\n";
    return 0;
  } catch (const stitch::StitchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case stitch::Err::IoError: return 2;
      case stitch::Err::InvalidOverlap: return 4;
      default: return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_bench(const std::string& resolutions, const std::string& metrics) {
  try {
    std::vector<stitch::Dims> dims = parse_resolutions(resolutions);
    stitch::StitchConfig cfg;
    std::vector<stitch::TimingRow> rows = stitch::timing_report(dims, cfg, 3);

    std::printf("%10s %12s %14s %16s %9s\n", "size", "warp (s)", "total full (s)",
                "total resized (s)", "speedup");
    for (const stitch::TimingRow& r : rows)
      std::printf("%4dx%-5d %12.3f %14.3f %16.3f %9.2f\n", r.width, r.height,
                  r.warp_time_s, r.total_full_s, r.total_resized_s, r.speedup);

    if (!metrics.empty()) {
      std::ofstream f(metrics, std::ios::binary);
      if (!f) throw stitch::StitchError(stitch::Err::IoError, "cannot write " + metrics);
      f << stitch::timing_json(rows);
    }
    return 0;
  } catch (const stitch::StitchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == stitch::Err::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-image stitching with a ratio-preserving half-cylindrical warp"};
  app.require_subcommand(1);

  auto* st = app.add_subcommand("stitch", "stitch a target image onto a reference");
  std::string ref, tgt, out, metrics, inter;
  int seam_scale = 8;
  unsigned seed = 0;
  bool feather = false;
  double ransac_threshold = 3.0, f_max = 0.0;
  st->add_option("ref", ref, "reference image (PNG)")->required();
  st->add_option("target", tgt, "target image (PNG)")->required();
  st->add_option("-o,--output", out, "output PNG")->required();
  st->add_option("--seam-scale", seam_scale, "seam search downscale factor")
      ->check(CLI::PositiveNumber);
  st->add_option("--seed", seed, "RNG seed");
  st->add_option("--metrics", metrics, "write a JSON report here");
  st->add_option("--save-intermediate", inter, "dump stage images into this directory");
  st->add_flag("--feather", feather, "3px linear feather across the seam");
  st->add_option("--ransac-threshold", ransac_threshold, "inlier threshold, pixels")
      ->check(CLI::PositiveNumber);
  st->add_option("--f-max", f_max, "upper bound of the focal search, pixels");

  auto* sy = app.add_subcommand("synth", "generate a synthetic pair with ground truth");
  std::string simage, sdir;
  double overlap = 0.3, perspective = 2e-4;
  unsigned sseed = 0;
  sy->add_option("image", simage, "source image (PNG)")->required();
  sy->add_option("--overlap", overlap, "overlap fraction in (0.05, 0.95)")->required();
  sy->add_option("--perspective", perspective, "perspective magnitude")->required();
  sy->add_option("--seed", sseed, "RNG seed")->required();
  sy->add_option("-o,--output", sdir, "output directory")->required();

  auto* be = app.add_subcommand("bench", "timing table on synthetic pairs");
  std::string resolutions = "1500x2000,1920x2560,2448x3264", bmetrics;
  be->add_option("--resolutions", resolutions, "comma-separated WxH list");
  be->add_option("--metrics", bmetrics, "write the JSON table here");

  CLI11_PARSE(app, argc, argv);

  if (st->parsed()) {
    stitch::StitchConfig cfg;
    cfg.seam_scale = seam_scale;
    cfg.seed = seed;
    cfg.feather = feather;
    cfg.save_intermediate = inter;
    cfg.ransac.threshold = ransac_threshold;
    cfg.focal_search.f_max = f_max;
    return stitch::run_stitch(ref, tgt, out, metrics, cfg);
  }
  if (sy->parsed()) return run_synth(simage, overlap, perspective, sseed, sdir);
  return run_bench(resolutions, bmetrics);
}
