#pragma once

#include <cstdint>

#include "tokeval/rng.hpp"

namespace tokeval {

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const { return std::int64_t{w} * h; }
  bool overlaps(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool operator==(const Rect&) const = default;
};

/// Shape (w, h) of a rectangle with exactly `area` cells inside a
/// `width` x `height` frame, with aspect w/h as close as possible to
/// `target_aspect`. Preference order: exact area with aspect in [0.5, 2];
/// exact area with any aspect; otherwise the largest rectangle of area below
/// `area` that fits (aspect-legal ones first).
Rect rectangle_shape(int width, int height, std::int64_t area, double target_aspect);

/// Seeded rectangle of the given area: aspect log-uniform on [0.5, 2], then a
/// uniform top-left corner among the positions that keep it inside the frame.
Rect sample_rectangle(int width, int height, std::int64_t area, Rng& rng);

}  // namespace tokeval
