#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "stitch/features.hpp"
#include "stitch/geometry.hpp"

namespace stitch {

struct RansacConfig {
  double threshold = 3.0;  // reprojection, pixels
  int max_iters = 2000;
  double confidence = 0.995;
  uint32_t seed = 0;
};

// Normalized DLT least-squares homography mapping pair.first -> pair.second.
// For 4 exact generic pairs the reprojection at the sample is < 1e-6 px.
// Throws DegenerateSample on collinear or coincident configurations.
Homography dlt_homography(const std::vector<std::pair<Point2, Point2>>& pairs);

// Seeded RANSAC over the match set; returns the refit homography and writes
// the winning hypothesis' inlier mask back into the MatchSet. Hypothesis ties
// break by lower inlier RMSE, then by earlier iteration, so the result is
// bit-reproducible for a fixed seed.
std::pair<Homography, std::vector<uint8_t>> estimate_homography_ransac(MatchSet& m,
                                                                       const RansacConfig& cfg);

// Closed-form least squares for the 4-parameter similarity.
Similarity fit_similarity(const std::vector<std::pair<Point2, Point2>>& pairs);

// Pixel-selection scale sqrt(a^2 + b^2).
double selection_scale(const Similarity& s);

// Root-mean-square of ||H(p_t) - p_r|| over the flagged pairs.
double reprojection_rmse(const Homography& h, const MatchSet& m,
                         const std::vector<uint8_t>& mask);

}  // namespace stitch
