#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "tokeval/image.hpp"

namespace tokeval {

enum class DegradeKind { kGaussianBlur, kGaussianNoise, kJpeg, kOcclusion, kPhotometric };
enum class PhotometricKind { kSharpen, kContrast, kBrightness, kSaturation };

/// One pixel-space distortion. Legal parameter ranges:
///   blur sigma [0.5, 3.0], noise sigma [0.01, 0.1] (fraction of 255),
///   jpeg quality [10, 90], occlusion area fraction [0.10, 0.40],
///   photometric factor [0.5, 1.5].
struct DegradeSpec {
  DegradeKind kind = DegradeKind::kGaussianBlur;
  PhotometricKind photometric = PhotometricKind::kBrightness;
  double parameter = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

Image gaussian_blur(const Image& img, double sigma);
Image gaussian_noise(const Image& img, double sigma, std::uint64_t seed);
Image occlude(const Image& img, double fraction, std::uint64_t seed);
Image photometric(const Image& img, PhotometricKind kind, double factor);
Image jpeg_roundtrip(const Image& img, int quality);

Image apply_degradation(const Image& img, const DegradeSpec& spec);

/// Severity in [0.05, 0.30], linear in the parameter over its legal range
/// (jpeg decreasing in quality, photometric in |factor - 1|).
double severity_of(const DegradeSpec& spec);

/// Names accepted on the command line: blur, noise, jpeg, occlusion,
/// sharpen, contrast, brightness, saturation.
std::optional<DegradeSpec> parse_degrade_kind(std::string_view name);
std::string_view degrade_name(const DegradeSpec& spec);

}  // namespace tokeval
