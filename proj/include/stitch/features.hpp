#pragma once
#include <memory>
#include <utility>
#include <vector>

#include "stitch/image.hpp"

namespace stitch {

struct Feature {
  Point2 position;
  std::vector<float> descriptor;
  double scale = 1.0;
  double orientation = 0.0;
};

// Point correspondences between target and reference. Inlier flags are only
// meaningful after robust estimation has run.
struct MatchSet {
  std::vector<std::pair<Point2, Point2>> pairs;  // (p_target, p_reference)
  std::vector<uint8_t> inlier;
};

enum class DetectorKind { Harris };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::Harris;
  int max_features = 1500;
  double quality = 0.01;        // keep responses above quality * max response
  int nms_radius = 4;
  double blur_sigma = 1.2;      // pre-smoothing for gradients and descriptors
  double integration_sigma = 2.0;
  double harris_k = 0.04;
  int descriptor_grid = 10;     // descriptor is grid x grid samples
  double descriptor_spacing = 2.0;
  double ratio = 0.8;           // nearest/second-nearest distance ratio
};

class FeatureDetector {
 public:
  virtual ~FeatureDetector() = default;
  virtual std::vector<Feature> detect(const ImageGrid& img, const DetectorConfig& cfg) const = 0;
};

// Harris corner response with non-max suppression, quadratic subpixel
// refinement, and a mean-free L2-normalized intensity patch descriptor.
class HarrisDetector : public FeatureDetector {
 public:
  std::vector<Feature> detect(const ImageGrid& img, const DetectorConfig& cfg) const override;
};

std::unique_ptr<FeatureDetector> make_detector(DetectorKind kind);

// Ratio-test plus mutual-nearest-neighbor matching. Uses only relative
// distances, so rescaling every descriptor by a positive constant leaves the
// result unchanged.
MatchSet match_features(const std::vector<Feature>& tgt, const std::vector<Feature>& ref,
                        double ratio);

// Detect in both images and match target against reference.
// Throws TooFewMatches when fewer than 4 candidates survive.
MatchSet detect_and_match(const ImageGrid& ref, const ImageGrid& tgt, const DetectorConfig& cfg);

// Luma field of the image as a flat w*h buffer (0-based row-major),
// invalid pixels as 0.
std::vector<float> luma_field(const ImageGrid& img);

// Separable Gaussian blur of a flat field, radius ceil(2.5*sigma).
void gaussian_blur_field(std::vector<float>& field, int w, int h, double sigma);

// Harris corner response of a luma field; the OpenMP kernel used by the
// detector. stitch::serial holds the reference implementation.
std::vector<float> harris_response(const std::vector<float>& gray, int w, int h,
                                   const DetectorConfig& cfg);

}  // namespace stitch
