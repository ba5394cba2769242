#include "tokeval/toy_tokenizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tokeval/error.hpp"

namespace tokeval {

PaletteCodebook::PaletteCodebook(std::uint32_t k) {
  require(k >= 2, ErrorCode::kInvalidArgument, "palette size must be >= 2");
  side_ = 1;
  while (std::uint64_t{side_} * side_ * side_ < k) ++side_;
  levels_.resize(side_);
  for (std::uint32_t i = 0; i < side_; ++i) {
    levels_[i] = static_cast<std::uint8_t>(std::round(i * 255.0 / (side_ - 1)));
  }
  entries_.reserve(k);
  for (std::uint32_t r = 0; r < side_ && entries_.size() < k; ++r) {
    for (std::uint32_t g = 0; g < side_ && entries_.size() < k; ++g) {
      for (std::uint32_t b = 0; b < side_ && entries_.size() < k; ++b) {
        entries_.push_back({levels_[r], levels_[g], levels_[b]});
      }
    }
  }
}

TokenId PaletteCodebook::nearest(double r, double g, double b) const {
  // Per-channel nearest level gives the nearest point of the full lattice;
  // it is also the answer for the truncated palette whenever it survived the
  // truncation. Choosing the lower level on per-channel ties yields the
  // lowest index among all tied lattice points.
  auto channel = [&](double v) {
    const double t = v * (side_ - 1) / 255.0;
    const int base = static_cast<int>(std::floor(t));
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = base - 1; i <= base + 1; ++i) {
      if (i < 0 || i >= static_cast<int>(side_)) continue;
      const double d = (v - levels_[i]) * (v - levels_[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return static_cast<std::uint64_t>(best);
  };
  const std::uint64_t idx = (channel(r) * side_ + channel(g)) * side_ + channel(b);
  if (idx < entries_.size()) return static_cast<TokenId>(idx);
  return nearest_brute(r, g, b);
}

TokenId PaletteCodebook::nearest_brute(double r, double g, double b) const {
  TokenId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double dr = r - entries_[i][0], dg = g - entries_[i][1], db = b - entries_[i][2];
    const double d = dr * dr + dg * dg + db * db;
    if (d < best_d) {
      best_d = d;
      best = static_cast<TokenId>(i);
    }
  }
  return best;
}

PaletteCodebook build_palette(std::uint32_t k) { return PaletteCodebook(k); }

TokenSequence tokenize(const Image& img, const GridLayout& layout,
                       const PaletteCodebook& palette) {
  require(layout.rows > 0 && layout.cols > 0, ErrorCode::kInvalidArgument,
          "grid must be non-empty");
  if (img.width % static_cast<int>(layout.cols) != 0 ||
      img.height % static_cast<int>(layout.rows) != 0) {
    fail(ErrorCode::kInvalidArgument,
         "image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
             " is not divisible by grid " + std::to_string(layout.rows) + "x" +
             std::to_string(layout.cols));
  }
  const int pw = img.width / static_cast<int>(layout.cols);
  const int ph = img.height / static_cast<int>(layout.rows);
  const double inv = 1.0 / (static_cast<double>(pw) * ph);
  TokenSequence seq;
  seq.reserve(layout.cells());
  for (std::uint32_t gy = 0; gy < layout.rows; ++gy) {
    for (std::uint32_t gx = 0; gx < layout.cols; ++gx) {
      std::uint64_t sum[3] = {0, 0, 0};
      for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
          for (int c = 0; c < 3; ++c) {
            sum[c] += img.at(static_cast<int>(gx) * pw + x, static_cast<int>(gy) * ph + y, c);
          }
        }
      }
      seq.push_back(palette.nearest(sum[0] * inv, sum[1] * inv, sum[2] * inv));
    }
  }
  return seq;
}

}  // namespace tokeval
