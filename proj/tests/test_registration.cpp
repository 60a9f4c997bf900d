#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "stitch/features.hpp"
#include "stitch/fitting.hpp"
#include "stitch/pipeline.hpp"

using namespace stitch;

namespace {

std::vector<std::pair<Point2, Point2>> map_points(const Homography& h,
                                                  const std::vector<Point2>& pts) {
  std::vector<std::pair<Point2, Point2>> out;
  for (const Point2& p : pts) out.emplace_back(p, apply_homography(h, p));
  return out;
}

std::vector<Point2> random_points(std::mt19937& rng, int n, double w, double h) {
  std::uniform_real_distribution<double> ux(1, w), uy(1, h);
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({ux(rng), uy(rng)});
  return pts;
}

}  // namespace

TEST_CASE("dlt recovers a translation from four points") {
  Homography t = Homography::translation(5, -3);
  auto pairs = map_points(t, {{1, 1}, {100, 1}, {100, 80}, {1, 80}});
  Homography est = dlt_homography(pairs);
  CHECK(testutil::matrix_distance(est, t) < 1e-9);
}

TEST_CASE("dlt recovers a projective map from noise-free points") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Homography h = testutil::random_mild_homography(rng, 640, 480);
    auto pairs = map_points(h, random_points(rng, 12, 640, 480));
    Homography est = dlt_homography(pairs);
    CHECK(testutil::matrix_distance(est, h) < 1e-8);
  }
}

TEST_CASE("dlt rejects collinear samples") {
  std::vector<std::pair<Point2, Point2>> pairs;
  for (double x : {1.0, 2.0, 3.0, 4.0})
    pairs.emplace_back(Point2{x, 2 * x + 1}, Point2{x + 5, 2 * x + 4});
  CHECK_THROWS_AS(dlt_homography(pairs), StitchError);
}

TEST_CASE("ransac on exact correspondences keeps everything") {
  std::mt19937 rng(43);
  Homography h = testutil::random_mild_homography(rng, 800, 600);
  MatchSet m;
  for (const auto& pr : map_points(h, random_points(rng, 100, 800, 600)))
    m.pairs.push_back(pr);
  m.inlier.assign(m.pairs.size(), 0);

  RansacConfig cfg;
  cfg.seed = 7;
  auto [est, mask] = estimate_homography_ransac(m, cfg);
  CHECK(testutil::matrix_distance(est, h) < 1e-8);
  CHECK(std::count(mask.begin(), mask.end(), 1) == 100);
  CHECK(reprojection_rmse(est, m, mask) < 1e-8);
}

TEST_CASE("ransac isolates a 30 percent outlier fraction") {
  std::mt19937 rng(47);
  Homography h = testutil::random_mild_homography(rng, 800, 600);
  MatchSet m;
  for (const auto& pr : map_points(h, random_points(rng, 70, 800, 600)))
    m.pairs.push_back(pr);
  std::uniform_real_distribution<double> off(30, 200), sign(-1, 1);
  for (const auto& pr : map_points(h, random_points(rng, 30, 800, 600))) {
    Point2 bad = pr.second;
    bad.x += off(rng) * (sign(rng) < 0 ? -1 : 1);
    bad.y += off(rng) * (sign(rng) < 0 ? -1 : 1);
    m.pairs.emplace_back(pr.first, bad);
  }
  m.inlier.assign(m.pairs.size(), 0);

  RansacConfig cfg;
  cfg.seed = 9;
  auto [est, mask] = estimate_homography_ransac(m, cfg);
  CHECK(testutil::matrix_distance(est, h) < 1e-6);
  for (int i = 0; i < 70; ++i) CHECK(mask[i] == 1);
  for (int i = 70; i < 100; ++i) CHECK(mask[i] == 0);
}

TEST_CASE("ransac needs at least four pairs") {
  MatchSet m;
  m.pairs = {{{1, 1}, {2, 2}}, {{3, 1}, {4, 2}}, {{1, 5}, {2, 6}}};
  m.inlier.assign(3, 0);
  RansacConfig cfg;
  CHECK_THROWS_AS(estimate_homography_ransac(m, cfg), StitchError);
}

TEST_CASE("ransac is reproducible for a fixed seed") {
  std::mt19937 rng(53);
  Homography h = testutil::random_mild_homography(rng, 640, 480);
  MatchSet m;
  for (const auto& pr : map_points(h, random_points(rng, 40, 640, 480)))
    m.pairs.push_back(pr);
  std::uniform_real_distribution<double> off(20, 90);
  for (int i = 0; i < 20; ++i) {
    auto pr = m.pairs[i % 40];
    pr.second.x += off(rng);
    m.pairs.push_back(pr);
  }
  m.inlier.assign(m.pairs.size(), 0);

  RansacConfig cfg;
  cfg.seed = 1234;
  MatchSet m2 = m;
  auto [h1, mask1] = estimate_homography_ransac(m, cfg);
  auto [h2, mask2] = estimate_homography_ransac(m2, cfg);
  CHECK(h1.data() == h2.data());
  CHECK(mask1 == mask2);
}

TEST_CASE("similarity fit is exact on similarity data") {
  // p -> (-2y + 3, 2x - 1): quarter turn with scale 2
  std::vector<std::pair<Point2, Point2>> pairs;
  for (Point2 p : {Point2{1, 1}, Point2{5, 2}, Point2{-3, 7}, Point2{0, 4}})
    pairs.emplace_back(p, Point2{-2 * p.y + 3, 2 * p.x - 1});
  Similarity s = fit_similarity(pairs);
  CHECK(s.a == doctest::Approx(0).epsilon(1e-12));
  CHECK(s.b == doctest::Approx(2).epsilon(1e-12));
  CHECK(s.tx == doctest::Approx(3).epsilon(1e-12));
  CHECK(s.ty == doctest::Approx(-1).epsilon(1e-12));
  CHECK(selection_scale(s) == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("similarity fit rejects degenerate inputs") {
  std::vector<std::pair<Point2, Point2>> one = {{{1, 1}, {2, 2}}};
  CHECK_THROWS_AS(fit_similarity(one), StitchError);
  std::vector<std::pair<Point2, Point2>> same = {{{3, 3}, {2, 2}}, {{3, 3}, {2.5, 2}}};
  CHECK_THROWS_AS(fit_similarity(same), StitchError);
}

TEST_CASE("similarity scale tracks the homography scale") {
  std::mt19937 rng(59);
  for (double scale : {0.8, 1.0, 1.25}) {
    Homography h({scale, 0, 30, 0, scale, -12, 0, 0, 1});
    auto pairs = map_points(h, random_points(rng, 25, 500, 400));
    Similarity s = fit_similarity(pairs);
    CHECK(selection_scale(s) == doctest::Approx(scale).epsilon(1e-9));
  }
}

TEST_CASE("reprojection rmse on a known offset") {
  MatchSet m;
  for (int i = 0; i < 10; ++i) {
    double off = i < 5 ? 1.0 : 0.0;
    m.pairs.push_back({{10.0 + i, 20.0}, {10.0 + i + off, 20.0}});
  }
  std::vector<uint8_t> mask(10, 1);
  CHECK(reprojection_rmse(Homography::identity(), m, mask) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("detector finds repeatable corners and matches a shifted view") {
  ImageGrid img = make_test_image(420, 320, 77);
  ImageGrid a = testutil::crop(img, 1, 1, 380, 320);
  ImageGrid b = testutil::crop(img, 11, 1, 380, 320);

  DetectorConfig cfg;
  MatchSet m = detect_and_match(a, b, cfg);
  REQUIRE(m.pairs.size() >= 20);

  std::vector<double> dx, dy;
  for (const auto& pr : m.pairs) {
    dx.push_back(pr.second.x - pr.first.x);
    dy.push_back(pr.second.y - pr.first.y);
  }
  std::sort(dx.begin(), dx.end());
  std::sort(dy.begin(), dy.end());
  CHECK(std::abs(dx[dx.size() / 2] - 10.0) < 0.5);
  CHECK(std::abs(dy[dy.size() / 2]) < 0.5);
}

TEST_CASE("self matching is the identity") {
  ImageGrid img = make_test_image(300, 240, 99);
  DetectorConfig cfg;
  MatchSet m = detect_and_match(img, img, cfg);
  REQUIRE(m.pairs.size() >= 30);
  for (const auto& pr : m.pairs) {
    CHECK(pr.first.x == doctest::Approx(pr.second.x).epsilon(1e-9));
    CHECK(pr.first.y == doctest::Approx(pr.second.y).epsilon(1e-9));
  }
}

TEST_CASE("featureless images raise TooFewMatches") {
  ImageGrid flat = testutil::constant_image(200, 150, 3, 0.5f);
  DetectorConfig cfg;
  CHECK_THROWS_AS(detect_and_match(flat, flat, cfg), StitchError);
}

TEST_CASE("detected features stay inside the descriptor border") {
  ImageGrid img = make_test_image(256, 256, 5);
  HarrisDetector det;
  DetectorConfig cfg;
  auto feats = det.detect(img, cfg);
  REQUIRE(!feats.empty());
  CHECK(static_cast<int>(feats.size()) <= cfg.max_features);
  for (const Feature& f : feats) {
    CHECK(f.position.x > 8);
    CHECK(f.position.x < 249);
    CHECK(f.position.y > 8);
    CHECK(f.position.y < 249);
    CHECK(f.descriptor.size() == size_t(cfg.descriptor_grid) * cfg.descriptor_grid);
  }
}
