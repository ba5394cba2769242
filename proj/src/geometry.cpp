#include "tokeval/geometry.hpp"

#include <cmath>
#include <limits>

#include "tokeval/error.hpp"

namespace tokeval {
namespace {

constexpr double kMinAspect = 0.5;
constexpr double kMaxAspect = 2.0;

bool aspect_ok(int w, int h) {
  const double a = static_cast<double>(w) / h;
  return a >= kMinAspect && a <= kMaxAspect;
}

}  // namespace

Rect rectangle_shape(int width, int height, std::int64_t area, double target_aspect) {
  require(width > 0 && height > 0, ErrorCode::kInvalidArgument, "empty frame");
  require(area > 0, ErrorCode::kInvalidArgument, "rectangle area must be positive");
  require(area <= std::int64_t{width} * height, ErrorCode::kInvalidArgument,
          "rectangle area exceeds frame");
  const double log_target = std::log(target_aspect);

  Rect best;
  double best_score = std::numeric_limits<double>::infinity();
  // pass 0: exact area, legal aspect; pass 1: exact area, closest to square
  for (int pass = 0; pass < 2 && best.w == 0; ++pass) {
    const double goal = pass == 0 ? log_target : 0.0;
    for (int w = 1; w <= width; ++w) {
      if (area % w != 0) continue;
      const std::int64_t h = area / w;
      if (h > height) continue;
      if (pass == 0 && !aspect_ok(w, static_cast<int>(h))) continue;
      const double score = std::abs(std::log(static_cast<double>(w) / h) - goal);
      if (score < best_score) {
        best_score = score;
        best = {0, 0, w, static_cast<int>(h)};
      }
    }
  }
  if (best.w != 0) return best;

  // No exact factorisation fits: largest rectangle with area below target.
  for (int pass = 0; pass < 2 && best.w == 0; ++pass) {
    std::int64_t best_area = 0;
    for (int w = 1; w <= width; ++w) {
      const int h = static_cast<int>(std::min<std::int64_t>(height, area / w));
      if (h <= 0) continue;
      if (pass == 0 && !aspect_ok(w, h)) continue;
      const std::int64_t a = std::int64_t{w} * h;
      const double score = std::abs(std::log(static_cast<double>(w) / h));
      if (a > best_area || (a == best_area && score < best_score)) {
        best_area = a;
        best_score = score;
        best = {0, 0, w, h};
      }
    }
  }
  return best;
}

Rect sample_rectangle(int width, int height, std::int64_t area, Rng& rng) {
  const double aspect = std::exp(rng.uniform(std::log(kMinAspect), std::log(kMaxAspect)));
  Rect r = rectangle_shape(width, height, area, aspect);
  r.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - r.w + 1)));
  r.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - r.h + 1)));
  return r;
}

}  // namespace tokeval
