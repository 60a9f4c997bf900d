#pragma once
#include <array>
#include <string>
#include <vector>

#include "stitch/compositor.hpp"
#include "stitch/features.hpp"
#include "stitch/fitting.hpp"
#include "stitch/image.hpp"
#include "stitch/resample.hpp"
#include "stitch/warp_params.hpp"

namespace stitch {

struct StitchConfig {
  int seam_scale = 8;
  RansacConfig ransac;
  FocalSearchConfig focal_search;
  DetectorConfig detector;
  bool feather = false;
  std::string save_intermediate;  // empty disables the dumps
  uint32_t seed = 0;
};

struct StitchReport {
  std::array<double, 9> homography{1, 0, 0, 0, 1, 0, 0, 0, 1};
  double sim_a = 1, sim_b = 0, sim_tx = 0, sim_ty = 0;
  double scale = 1;
  double a0 = 1, b0 = 1;
  double focal = 0;
  bool degenerate_focal = false;
  int inlier_count = 0;
  double alignment_rmse_px = 0;
  double warp_time_s = 0, seam_time_s = 0, total_time_s = 0;
};

struct StitchOutput {
  ImageGrid image;       // blended canvas
  StitchReport report;
  Canvas canvas;
  HalfCylWarp warp;
  int sample_columns = 0;   // N of the resampler grid, 0 when degenerate
  SeamLabels labels;        // full-resolution labels over the overlap box
  int overlap_x = 0, overlap_y = 0;  // canvas position of the overlap box
};

// A pipeline failure tagged with the CLI exit code of its stage:
// 2 I/O, 3 registration, 4 parameter estimation, 5 rendering.
class StagedError : public StitchError {
 public:
  StagedError(int exit_code, const StitchError& inner)
      : StitchError(inner), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

// The full pipeline on in-memory images: detect/match, RANSAC homography,
// similarity scale, cylinder parameters, half-cylindrical render with the
// ratio-preserved strip, downscaled seam, blend. Throws StagedError.
StitchOutput run_stitch_images(const ImageGrid& ref, const ImageGrid& tgt,
                               const StitchConfig& cfg);

// File-level wrapper: loads the inputs, runs the pipeline, writes the output
// PNG and the optional metrics JSON. Returns a process exit code and prints
// a diagnostic to stderr on failure.
int run_stitch(const std::string& ref_path, const std::string& tgt_path,
               const std::string& out_path, const std::string& metrics_path,
               const StitchConfig& cfg);

std::string report_json(const StitchReport& r);

// Procedurally textured test image: smooth gradient base with seeded random
// rectangles and discs, plenty of corners at every scale.
ImageGrid make_test_image(int width, int height, uint32_t seed, int channels = 3);

struct SynthLayout {
  int window_w = 0, window_h = 0;  // crop size of both windows
  int ox = 0, oy = 0;              // integer offset of the reference window
  double shift = 0;                // horizontal window displacement
};

// Window geometry for a given source size and overlap fraction.
// Throws InvalidOverlap outside (0.05, 0.95).
SynthLayout synth_layout(Dims src, double overlap_fraction);

// Ground-truth map for a synthetic pair: horizontal shift from the layout
// composed with a small seeded rotation, the given uniform scale and a
// perspective term about the window center. h_true maps target coordinates
// onto reference coordinates.
Homography synth_homography(const SynthLayout& lo, double perspective, uint32_t seed,
                            double scale = 1.0);

struct SyntheticPair {
  ImageGrid ref;
  ImageGrid tgt;
  Homography h_true;  // target -> reference
};

// Crops the reference window and resamples the target window through
// h_true^-1, so h_true maps the target back onto reference coordinates.
SyntheticPair make_synthetic_pair(const ImageGrid& src, const Homography& h_true,
                                  double overlap_fraction);

struct TimingRow {
  int width = 0, height = 0;
  double warp_time_s = 0;      // at cfg.seam_scale
  double total_full_s = 0;     // seam at full resolution
  double total_resized_s = 0;  // seam at cfg.seam_scale
  double speedup = 0;          // total_full_s / total_resized_s
};

// Synthetic-pair timing at each resolution, averaged over `runs` passes.
std::vector<TimingRow> timing_report(const std::vector<Dims>& resolutions,
                                     const StitchConfig& cfg, int runs = 3);

std::string timing_json(const std::vector<TimingRow>& rows);

}  // namespace stitch
