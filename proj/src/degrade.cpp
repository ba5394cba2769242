#include "tokeval/degrade.hpp"

// clang-format off
#include <cstdio>
#include <csetjmp>
#include <jpeglib.h>
// clang-format on

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tokeval/error.hpp"
#include "tokeval/geometry.hpp"
#include "tokeval/rng.hpp"

namespace tokeval {
namespace {

void check_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    fail(ErrorCode::kOutOfRange, std::string(what) + " " + std::to_string(v) +
                                     " outside [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

// Separable blur with clamped borders, kept in floating point.
std::vector<double> blur_planes(const Image& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = img.width, h = img.height;
  std::vector<double> tmp(img.pixels.size()), out(img.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int xx = std::clamp(x + i, 0, w - 1);
          acc += k[i + r] * img.at(xx, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int yy = std::clamp(y + i, 0, h - 1);
          acc += k[i + r] * tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
        }
        out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  return out;
}

Image from_planes(const Image& like, const std::vector<double>& values) {
  Image out(like.width, like.height);
  for (std::size_t i = 0; i < values.size(); ++i) out.pixels[i] = to_channel(values[i]);
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf escape;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->escape, 1);
}

// Plain C control flow only between setjmp and the matching longjmp.
bool jpeg_encode(const Image& img, int quality, unsigned char** buffer,
                 unsigned long* size, char* message) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.escape)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, buffer, size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_compress(&cinfo, TRUE);
  const int stride = img.width * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.pixels.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

bool jpeg_decode(const unsigned char* data, unsigned long size, Image& out, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.escape)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, size);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  if (static_cast<int>(cinfo.output_width) != out.width ||
      static_cast<int>(cinfo.output_height) != out.height || cinfo.output_components != 3) {
    std::snprintf(message, JMSG_LENGTH_MAX, "decoded geometry mismatch");
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  const int stride = out.width * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace

void DegradeSpec::validate() const {
  switch (kind) {
    case DegradeKind::kGaussianBlur: return check_range(parameter, 0.5, 3.0, "blur sigma");
    case DegradeKind::kGaussianNoise: return check_range(parameter, 0.01, 0.1, "noise sigma");
    case DegradeKind::kJpeg:
      check_range(parameter, 10, 90, "jpeg quality");
      if (parameter != std::floor(parameter)) {
        fail(ErrorCode::kOutOfRange, "jpeg quality must be an integer");
      }
      return;
    case DegradeKind::kOcclusion: return check_range(parameter, 0.10, 0.40, "occlusion fraction");
    case DegradeKind::kPhotometric: return check_range(parameter, 0.5, 1.5, "photometric factor");
  }
}

Image gaussian_blur(const Image& img, double sigma) {
  check_range(sigma, 0.5, 3.0, "blur sigma");
  return from_planes(img, blur_planes(img, sigma));
}

Image gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  check_range(sigma, 0.01, 0.1, "noise sigma");
  Rng rng(seed);
  const double stddev = 255.0 * sigma;
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.pixels[i] = to_channel(img.pixels[i] + rng.normal(0.0, stddev));
  }
  return out;
}

Image occlude(const Image& img, double fraction, std::uint64_t seed) {
  check_range(fraction, 0.10, 0.40, "occlusion fraction");
  Rng rng(seed);
  const auto area = static_cast<std::int64_t>(
      std::round(fraction * static_cast<double>(img.width) * img.height));
  Image out = img;
  if (area == 0) return out;
  const Rect r = sample_rectangle(img.width, img.height, area, rng);
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = 0;
    }
  }
  return out;
}

Image photometric(const Image& img, PhotometricKind kind, double factor) {
  check_range(factor, 0.5, 1.5, "photometric factor");
  std::vector<double> values(img.pixels.size());
  switch (kind) {
    case PhotometricKind::kBrightness:
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = img.pixels[i] * factor;
      break;
    case PhotometricKind::kContrast:
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = (img.pixels[i] - 128.0) * factor + 128.0;
      }
      break;
    case PhotometricKind::kSaturation:
      for (std::size_t i = 0; i < values.size(); i += 3) {
        const double luma = 0.299 * img.pixels[i] + 0.587 * img.pixels[i + 1] +
                            0.114 * img.pixels[i + 2];
        for (int c = 0; c < 3; ++c) values[i + c] = luma + factor * (img.pixels[i + c] - luma);
      }
      break;
    case PhotometricKind::kSharpen: {
      const auto blurred = blur_planes(img, 1.0);
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = img.pixels[i] + (factor - 1.0) * (img.pixels[i] - blurred[i]);
      }
      break;
    }
  }
  return from_planes(img, values);
}

Image jpeg_roundtrip(const Image& img, int quality) {
  check_range(quality, 10, 90, "jpeg quality");
  require(img.width > 0 && img.height > 0, ErrorCode::kInvalidArgument, "empty image");
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {0};
  const bool encoded = jpeg_encode(img, quality, &buffer, &size, message);
  if (!encoded) {
    std::free(buffer);
    fail(ErrorCode::kCodec, std::string("jpeg encode failed: ") + message);
  }
  Image out(img.width, img.height);
  const bool decoded = jpeg_decode(buffer, size, out, message);
  std::free(buffer);
  if (!decoded) fail(ErrorCode::kCodec, std::string("jpeg decode failed: ") + message);
  return out;
}

Image apply_degradation(const Image& img, const DegradeSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DegradeKind::kGaussianBlur: return gaussian_blur(img, spec.parameter);
    case DegradeKind::kGaussianNoise: return gaussian_noise(img, spec.parameter, spec.seed);
    case DegradeKind::kJpeg: return jpeg_roundtrip(img, static_cast<int>(spec.parameter));
    case DegradeKind::kOcclusion: return occlude(img, spec.parameter, spec.seed);
    case DegradeKind::kPhotometric: return photometric(img, spec.photometric, spec.parameter);
  }
  fail(ErrorCode::kInvalidArgument, "unknown degradation kind");
}

double severity_of(const DegradeSpec& spec) {
  spec.validate();
  constexpr double kLow = 0.05, kHigh = 0.30;
  double t = 0.0;
  switch (spec.kind) {
    case DegradeKind::kGaussianBlur: t = (spec.parameter - 0.5) / 2.5; break;
    case DegradeKind::kGaussianNoise: t = (spec.parameter - 0.01) / 0.09; break;
    case DegradeKind::kJpeg: t = (90.0 - spec.parameter) / 80.0; break;
    case DegradeKind::kOcclusion: t = (spec.parameter - 0.10) / 0.30; break;
    case DegradeKind::kPhotometric: t = std::abs(spec.parameter - 1.0) / 0.5; break;
  }
  return kLow + (kHigh - kLow) * std::clamp(t, 0.0, 1.0);
}

std::optional<DegradeSpec> parse_degrade_kind(std::string_view name) {
  DegradeSpec s;
  if (name == "blur") {
    s.kind = DegradeKind::kGaussianBlur;
  } else if (name == "noise") {
    s.kind = DegradeKind::kGaussianNoise;
  } else if (name == "jpeg") {
    s.kind = DegradeKind::kJpeg;
  } else if (name == "occlusion") {
    s.kind = DegradeKind::kOcclusion;
  } else if (name == "sharpen" || name == "contrast" || name == "brightness" ||
             name == "saturation") {
    s.kind = DegradeKind::kPhotometric;
    s.photometric = name == "sharpen"    ? PhotometricKind::kSharpen
                    : name == "contrast" ? PhotometricKind::kContrast
                    : name == "brightness" ? PhotometricKind::kBrightness
                                           : PhotometricKind::kSaturation;
  } else {
    return std::nullopt;
  }
  return s;
}

std::string_view degrade_name(const DegradeSpec& spec) {
  switch (spec.kind) {
    case DegradeKind::kGaussianBlur: return "blur";
    case DegradeKind::kGaussianNoise: return "noise";
    case DegradeKind::kJpeg: return "jpeg";
    case DegradeKind::kOcclusion: return "occlusion";
    case DegradeKind::kPhotometric:
      switch (spec.photometric) {
        case PhotometricKind::kSharpen: return "sharpen";
        case PhotometricKind::kContrast: return "contrast";
        case PhotometricKind::kBrightness: return "brightness";
        case PhotometricKind::kSaturation: return "saturation";
      }
  }
  return "unknown";
}

}  // namespace tokeval
