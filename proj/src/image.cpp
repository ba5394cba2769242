#include "tokeval/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "tokeval/error.hpp"

namespace tokeval {
namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Reads the next whitespace-delimited PNM header field, skipping comments.
int pnm_field(std::istream& in, const std::string& path) {
  int c = in.get();
  while (true) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    break;
  }
  if (c == EOF || !std::isdigit(c)) fail(ErrorCode::kMalformedHeader, "bad PPM header in " + path);
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    if (v > (1L << 24)) fail(ErrorCode::kMalformedHeader, "PPM field too large in " + path);
    c = in.get();
  }
  // exactly one whitespace byte terminates the field
  if (c == EOF || !std::isspace(c)) fail(ErrorCode::kMalformedHeader, "bad PPM header in " + path);
  return static_cast<int>(v);
}

}  // namespace

std::uint8_t to_channel(double v) {
  const double c = std::clamp(v, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::round(c));
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '6') {
    fail(ErrorCode::kBadMagic, "not a binary PPM (P6): " + path.string());
  }
  const int w = pnm_field(in, path.string());
  const int h = pnm_field(in, path.string());
  const int maxval = pnm_field(in, path.string());
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    fail(ErrorCode::kMalformedHeader, "unsupported PPM geometry in " + path.string());
  }
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    fail(ErrorCode::kTruncated, "truncated PPM payload in " + path.string());
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) p = to_channel(p * 255.0 / maxval);
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) fail(ErrorCode::kIo, "write failed on " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    fail(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&png);
    fail(ErrorCode::kCodec, "cannot decode PNG " + path.string() + ": " + png.message);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    fail(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " + png.message);
  }
}

bool is_image_path(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  return ext == ".png" || ext == ".ppm";
}

Image load_image(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  fail(ErrorCode::kInvalidArgument, "unsupported image extension: " + path.string());
}

void save_image(const std::filesystem::path& path, const Image& img) {
  const auto ext = lower_ext(path);
  if (ext == ".png") return write_png(path, img);
  if (ext == ".ppm") return write_ppm(path, img);
  fail(ErrorCode::kInvalidArgument, "unsupported image extension: " + path.string());
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    fail(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_path(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

}  // namespace tokeval
