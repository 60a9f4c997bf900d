#include "stitch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"
#include "stitch/png_io.hpp"

namespace stitch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImageGrid crop_grid(const ImageGrid& img, int x0, int y0, int w, int h) {
  ImageGrid out(w, h, img.channels, false);
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x) {
      int sx = x0 + x - 1, sy = y0 + y - 1;
      if (!img.in_bounds(sx, sy) || !img.is_valid(sx, sy)) continue;
      size_t src = img.pix(sx, sy), dst = out.pix(x, y);
      for (int c = 0; c < img.channels; ++c)
        out.samples[dst * img.channels + c] = img.samples[src * img.channels + c];
      out.valid[dst] = 1;
    }
  return out;
}

void paint(ImageGrid& img, int x, int y, float r, float g, float b) {
  if (!img.in_bounds(x, y)) return;
  size_t p = img.pix(x, y);
  img.valid[p] = 1;
  if (img.channels >= 3) {
    img.samples[p * img.channels + 0] = r;
    img.samples[p * img.channels + 1] = g;
    img.samples[p * img.channels + 2] = b;
  } else {
    img.samples[p * img.channels] = g;
  }
}

void draw_line(ImageGrid& img, Point2 a, Point2 b, float r, float g, float bl) {
  int steps = static_cast<int>(std::ceil(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    paint(img, static_cast<int>(std::lround(a.x + t * (b.x - a.x))),
          static_cast<int>(std::lround(a.y + t * (b.y - a.y))), r, g, bl);
  }
}

ImageGrid match_overlay(const ImageGrid& ref, const ImageGrid& tgt, const MatchSet& m,
                        const std::vector<uint8_t>& inliers) {
  int w = ref.width + tgt.width;
  int h = std::max(ref.height, tgt.height);
  int ch = std::max(ref.channels, 3);
  ImageGrid out(w, h, ch, false);
  auto put = [&](const ImageGrid& src, int xoff) {
    for (int y = 1; y <= src.height; ++y)
      for (int x = 1; x <= src.width; ++x) {
        if (!src.is_valid(x, y)) continue;
        double v = luma(src, x, y);
        paint(out, x + xoff, y, static_cast<float>(v), static_cast<float>(v),
              static_cast<float>(v));
      }
  };
  put(ref, 0);
  put(tgt, ref.width);
  for (size_t i = 0; i < m.pairs.size(); ++i) {
    bool in = i < inliers.size() && inliers[i];
    Point2 pr = m.pairs[i].second;
    Point2 pt{m.pairs[i].first.x + ref.width, m.pairs[i].first.y};
    if (in)
      draw_line(out, pr, pt, 0.1f, 0.9f, 0.1f);
    else
      draw_line(out, pr, pt, 0.9f, 0.1f, 0.1f);
  }
  return out;
}

void dump_intermediates(const std::string& dir, const ImageGrid& ref, const ImageGrid& tgt,
                        const MatchSet& matches, const std::vector<uint8_t>& inliers,
                        const HalfCylWarp& warp, const ImageGrid& tgt_render,
                        const Canvas& cv, const ImageGrid& blended, const SeamLabels& labels,
                        int ox, int oy) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StitchError(Err::IoError, "cannot create " + dir);

  write_png(dir + "/matches.png", match_overlay(ref, tgt, matches, inliers));

  Canvas cvh = canvas_bounds({ref.width, ref.height}, {tgt.width, tgt.height}, warp,
                             nullptr, true);
  write_png(dir + "/warped_homography.png",
            render_target(tgt, warp, nullptr, cvh, true));
  write_png(dir + "/warped_selected.png", tgt_render);

  ImageGrid seam = blended;
  for (int ly = 1; ly <= labels.height; ++ly)
    for (int lx = 1; lx < labels.width; ++lx)
      if (labels.at(lx, ly) != labels.at(lx + 1, ly)) {
        paint(seam, lx + ox - 1, ly + oy - 1, 1.0f, 0.0f, 0.0f);
        paint(seam, lx + ox, ly + oy - 1, 1.0f, 0.0f, 0.0f);
      }
  write_png(dir + "/seam.png", seam);
  write_mask_png(dir + "/mask.png", blended);
  (void)cv;
}

}  // namespace

StitchOutput run_stitch_images(const ImageGrid& ref, const ImageGrid& tgt,
                               const StitchConfig& cfg) {
  auto t_total = Clock::now();
  StitchOutput out;
  Dims ref_dims{ref.width, ref.height}, tgt_dims{tgt.width, tgt.height};

  MatchSet matches;
  Homography H;
  std::vector<uint8_t> inliers;
  try {
    matches = detect_and_match(ref, tgt, cfg.detector);
    RansacConfig rc = cfg.ransac;
    rc.seed = cfg.seed;
    std::tie(H, inliers) = estimate_homography_ransac(matches, rc);
    out.report.alignment_rmse_px = reprojection_rmse(H, matches, inliers);

    double dx = 0, dy = 0;
    int n = 0;
    for (size_t i = 0; i < matches.pairs.size(); ++i)
      if (inliers[i]) {
        dx += matches.pairs[i].second.x - matches.pairs[i].first.x;
        dy += matches.pairs[i].second.y - matches.pairs[i].first.y;
        ++n;
      }
    out.report.inlier_count = n;
    if (n > 0 && std::abs(dy / n) > std::abs(dx / n))
      throw StitchError(Err::VerticalPair, "estimated displacement is predominantly vertical");
  } catch (const StagedError&) {
    throw;
  } catch (const StitchError& e) {
    throw StagedError(3, e);
  }

  Similarity sim;
  double s = 1, a0 = 1, b0 = 1, hD = 0;
  PartitionSide side = PartitionSide::CylRightOfLine;
  FocalEstimate fe;
  SampleGrid grid;
  try {
    std::vector<std::pair<Point2, Point2>> in_pairs;
    for (size_t i = 0; i < matches.pairs.size(); ++i)
      if (inliers[i]) in_pairs.push_back(matches.pairs[i]);
    sim = fit_similarity(in_pairs);
    s = selection_scale(sim);
    std::tie(a0, side) = choose_a0(H, ref_dims, tgt_dims);
    b0 = estimate_b0(H, tgt_dims);
    ColumnHeights ch = column_heights(H, tgt_dims, a0, side);
    auto [h1, hw] = partition_and_far_heights(ch, side);
    hD = compute_hD(tgt.height, h1, hw);
    FocalSearchConfig fc = cfg.focal_search;
    if (fc.f_min <= 0) fc.f_min = ref.width / 8.0;
    if (fc.f_max <= 0) fc.f_max = 8.0 * ref.width;
    fe = estimate_focal(ch, a0, hD, fc);
    if (!fe.degenerate) {
      grid = build_sample_grid(tgt_dims, s);
      out.sample_columns = grid.N;
    }
  } catch (const StitchError& e) {
    throw StagedError(4, e);
  }

  out.report.homography = H.data();
  out.report.sim_a = sim.a;
  out.report.sim_b = sim.b;
  out.report.sim_tx = sim.tx;
  out.report.sim_ty = sim.ty;
  out.report.scale = s;
  out.report.a0 = a0;
  out.report.b0 = b0;
  out.report.focal = fe.f;
  out.report.degenerate_focal = fe.degenerate;

  try {
    out.warp = HalfCylWarp{H, CylindricalParams{fe.f, a0, b0}, side};

    auto t_warp = Clock::now();
    ResampledStrip strip;
    if (!fe.degenerate) {
      FilteredGrid fg = filter_nonoverlap(grid, out.warp);
      strip = resample_strip(tgt, out.warp, fg);
    }
    out.canvas = canvas_bounds(ref_dims, tgt_dims, out.warp,
                               fe.degenerate ? nullptr : &strip, fe.degenerate);
    ImageGrid ref_render = render_reference(ref, out.canvas);
    ImageGrid tgt_render =
        render_target(tgt, out.warp, fe.degenerate ? nullptr : &strip, out.canvas, fe.degenerate);
    out.report.warp_time_s = seconds_since(t_warp);

    auto t_seam = Clock::now();
    int bx0 = out.canvas.width() + 1, by0 = out.canvas.height() + 1, bx1 = 0, by1 = 0;
    for (int y = 1; y <= out.canvas.height(); ++y)
      for (int x = 1; x <= out.canvas.width(); ++x)
        if (ref_render.is_valid(x, y) && tgt_render.is_valid(x, y)) {
          bx0 = std::min(bx0, x);
          by0 = std::min(by0, y);
          bx1 = std::max(bx1, x);
          by1 = std::max(by1, y);
        }
    if (bx1 < bx0) throw StitchError(Err::NoOverlap, "renders do not overlap");
    int bw = bx1 - bx0 + 1, bh = by1 - by0 + 1;

    ImageGrid a = crop_grid(ref_render, bx0, by0, bw, bh);
    ImageGrid b = crop_grid(tgt_render, bx0, by0, bw, bh);
    ImageGrid ads = downscale(a, cfg.seam_scale);
    ImageGrid bds = downscale(b, cfg.seam_scale);
    std::vector<uint8_t> mask(ads.valid.size());
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = ads.valid[i] && bds.valid[i];
    SeamOptions so;
    so.ref_on_left = side == PartitionSide::CylRightOfLine;
    SeamLabels coarse = find_seam(ads, bds, mask, so);
    out.labels = upscale_labels(coarse, cfg.seam_scale, bw, bh);
    out.overlap_x = bx0;
    out.overlap_y = by0;
    out.report.seam_time_s = seconds_since(t_seam);

    out.image = blend(ref_render, tgt_render, out.labels, bx0, by0, cfg.feather);

    if (!cfg.save_intermediate.empty())
      dump_intermediates(cfg.save_intermediate, ref, tgt, matches, inliers, out.warp,
                         tgt_render, out.canvas, out.image, out.labels, bx0, by0);
  } catch (const StagedError&) {
    throw;
  } catch (const StitchError& e) {
    throw StagedError(e.code() == Err::IoError ? 2 : 5, e);
  }

  out.report.total_time_s = seconds_since(t_total);
  return out;
}

std::string report_json(const StitchReport& r) {
  nlohmann::json j;
  j["homography"] = r.homography;
  j["similarity"] = {{"a", r.sim_a}, {"b", r.sim_b}, {"tx", r.sim_tx}, {"ty", r.sim_ty}};
  j["scale"] = r.scale;
  j["a0"] = r.a0;
  j["b0"] = r.b0;
  j["focal"] = r.focal;
  j["degenerate_focal"] = r.degenerate_focal;
  j["inlier_count"] = r.inlier_count;
  j["alignment_rmse_px"] = r.alignment_rmse_px;
  j["warp_time_s"] = r.warp_time_s;
  j["seam_time_s"] = r.seam_time_s;
  j["total_time_s"] = r.total_time_s;
  return j.dump(2) + "\n";
}

int run_stitch(const std::string& ref_path, const std::string& tgt_path,
               const std::string& out_path, const std::string& metrics_path,
               const StitchConfig& cfg) {
  try {
    ImageGrid ref, tgt;
    try {
      ref = read_png(ref_path);
      tgt = read_png(tgt_path);
    } catch (const StitchError& e) {
      throw StagedError(2, e);
    }

    StitchOutput so = run_stitch_images(ref, tgt, cfg);

    try {
      write_png(out_path, so.image);
      if (!metrics_path.empty()) {
        std::ofstream f(metrics_path, std::ios::binary);
        if (!f) throw StitchError(Err::IoError, "cannot write " + metrics_path);
        f << report_json(so.report);
      }
    } catch (const StitchError& e) {
      throw StagedError(2, e);
    }
    return 0;
  } catch (const StagedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

ImageGrid make_test_image(int width, int height, uint32_t seed, int channels) {
  ImageGrid img(width, height, channels);
  for (int y = 1; y <= height; ++y)
    for (int x = 1; x <= width; ++x) {
      size_t p = img.pix(x, y);
      double g0 = 0.2 + 0.5 * (x - 1.0) / std::max(1, width - 1);
      double g1 = 0.2 + 0.5 * (y - 1.0) / std::max(1, height - 1);
      double g2 = 0.2 + 0.5 * (x + y - 2.0) / std::max(1, width + height - 2);
      double g[3] = {g0, g1, g2};
      for (int c = 0; c < channels; ++c)
        img.samples[p * channels + c] = static_cast<float>(g[c % 3]);
    }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int shapes = std::clamp(width * height / 1500, 120, 2000);
  int smax = std::max(6, std::min(width, height) / 12);
  for (int i = 0; i < shapes; ++i) {
    int cx = 1 + static_cast<int>(unit(rng) * (width - 1));
    int cy = 1 + static_cast<int>(unit(rng) * (height - 1));
    int sx = 3 + static_cast<int>(unit(rng) * (smax - 3));
    int sy = 3 + static_cast<int>(unit(rng) * (smax - 3));
    float col[4] = {static_cast<float>(unit(rng)), static_cast<float>(unit(rng)),
                    static_cast<float>(unit(rng)), 0.0f};
    bool disc = unit(rng) < 0.5;
    int r2 = sx * sx;
    for (int y = std::max(1, cy - sy); y <= std::min(height, cy + sy); ++y)
      for (int x = std::max(1, cx - sx); x <= std::min(width, cx + sx); ++x) {
        if (disc) {
          int ddx = x - cx, ddy = y - cy;
          if (ddx * ddx + ddy * ddy > r2) continue;
        }
        size_t p = img.pix(x, y);
        for (int c = 0; c < channels; ++c) img.samples[p * channels + c] = col[c % 3];
      }
  }
  return img;
}

SynthLayout synth_layout(Dims src, double overlap_fraction) {
  if (!(overlap_fraction > 0.05 && overlap_fraction < 0.95))
    throw StitchError(Err::InvalidOverlap, "overlap fraction outside (0.05, 0.95)");
  const int margin = 32;
  SynthLayout lo;
  lo.window_w = static_cast<int>(std::floor((src.width - 2 * margin) / (2.0 - overlap_fraction)));
  lo.window_h = src.height - 2 * margin;
  lo.ox = margin;
  lo.oy = margin;
  lo.shift = (1.0 - overlap_fraction) * lo.window_w;
  if (lo.window_w < 32 || lo.window_h < 32)
    throw StitchError(Err::InvalidOverlap, "source too small for the requested overlap");
  return lo;
}

Homography synth_homography(const SynthLayout& lo, double perspective, uint32_t seed,
                            double scale) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double theta = 0.015 * u(rng);
  double px = perspective * u(rng);
  double py = 0.3 * perspective * u(rng);
  double dy = 2.0 * u(rng);

  double cx = (1.0 + lo.window_w) / 2.0, cy = (1.0 + lo.window_h) / 2.0;
  Homography center_out = Homography::translation(cx + lo.shift, cy + dy);
  Homography core({scale * std::cos(theta), -scale * std::sin(theta), 0,
                   scale * std::sin(theta), scale * std::cos(theta), 0, px, py, 1});
  Homography center_in = Homography::translation(-cx, -cy);
  return compose(center_out, compose(core, center_in));
}

SyntheticPair make_synthetic_pair(const ImageGrid& src, const Homography& h_true,
                                  double overlap_fraction) {
  SynthLayout lo = synth_layout({src.width, src.height}, overlap_fraction);
  SyntheticPair pair;
  pair.h_true = h_true;
  pair.ref = crop_grid(src, lo.ox + 1, lo.oy + 1, lo.window_w, lo.window_h);

  ImageGrid tgt(lo.window_w, lo.window_h, src.channels, false);
  const std::array<double, 9>& m = h_true.data();
#pragma omp parallel for schedule(static)
  for (int y = 1; y <= tgt.height; ++y)
    for (int x = 1; x <= tgt.width; ++x) {
      double w = m[6] * x + m[7] * y + m[8];
      if (std::abs(w) <= 1e-12) continue;
      Point2 p{(m[0] * x + m[1] * y + m[2]) / w + lo.ox,
               (m[3] * x + m[4] * y + m[5]) / w + lo.oy};
      auto c = bilinear_sample(src, p);
      if (!c) continue;
      size_t dst = tgt.pix(x, y);
      for (int ch = 0; ch < src.channels; ++ch)
        tgt.samples[dst * src.channels + ch] = static_cast<float>((*c)[ch]);
      tgt.valid[dst] = 1;
    }
  pair.tgt = std::move(tgt);
  return pair;
}

std::vector<TimingRow> timing_report(const std::vector<Dims>& resolutions,
                                     const StitchConfig& cfg, int runs) {
  std::vector<TimingRow> rows;
  const int margin = 32;
  const double ov = 0.3;
  for (const Dims& d : resolutions) {
    int W = 2 * margin + static_cast<int>(std::ceil(d.width * (2.0 - ov))) + 1;
    int H = d.height + 2 * margin;
    TimingRow row;
    for (int r = 0; r < runs; ++r) {
      uint32_t seed = cfg.seed + static_cast<uint32_t>(r);
      ImageGrid src = make_test_image(W, H, seed);
      SynthLayout lo = synth_layout({W, H}, ov);
      SyntheticPair pair = make_synthetic_pair(src, synth_homography(lo, 2e-4, seed), ov);
      row.width = pair.ref.width;
      row.height = pair.ref.height;

      StitchConfig c1 = cfg;
      c1.save_intermediate.clear();
      c1.seed = seed;
      StitchConfig cfull = c1;
      cfull.seam_scale = 1;

      StitchOutput o1 = run_stitch_images(pair.ref, pair.tgt, c1);
      StitchOutput o2 = run_stitch_images(pair.ref, pair.tgt, cfull);
      row.warp_time_s += o1.report.warp_time_s;
      row.total_resized_s += o1.report.total_time_s;
      row.total_full_s += o2.report.total_time_s;
    }
    row.warp_time_s /= runs;
    row.total_resized_s /= runs;
    row.total_full_s /= runs;
    row.speedup = row.total_resized_s > 0 ? row.total_full_s / row.total_resized_s : 0;
    rows.push_back(row);
  }
  return rows;
}

std::string timing_json(const std::vector<TimingRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const TimingRow& r : rows)
    j.push_back({{"width", r.width},
                 {"height", r.height},
                 {"warp_time_s", r.warp_time_s},
                 {"total_full_s", r.total_full_s},
                 {"total_resized_s", r.total_resized_s},
                 {"speedup", r.speedup}});
  return j.dump(2) + "\n";
}

}  // namespace stitch
