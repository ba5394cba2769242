#include "tokeval/cmms/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokeval/error.hpp"
#include "tokeval/geometry.hpp"
#include "tokeval/rng.hpp"

namespace tokeval::cmms {
namespace {

constexpr int kPlacementTries = 16;

std::int64_t block_area(const GridLayout& layout, double fraction) {
  if (!(fraction > 0.0 && fraction <= kMaxSeverity)) {
    fail(ErrorCode::kOutOfRange,
         "swap fraction " + std::to_string(fraction) + " outside (0, 0.3]");
  }
  const auto area = static_cast<std::int64_t>(
      std::round(fraction * static_cast<double>(layout.cells())));
  require(area > 0, ErrorCode::kOutOfRange, "swap block area rounds to 0");
  return area;
}

void check_layout(const TokenSequence& seq, const GridLayout& layout) {
  require(layout.rows > 0 && layout.cols > 0, ErrorCode::kInvalidArgument, "empty grid");
  require(seq.size() == layout.cells(), ErrorCode::kLengthMismatch,
          "sequence length does not match grid");
}

void swap_blocks(TokenSequence& a, TokenSequence& b, const Rect& ra, const Rect& rb, int cols) {
  for (int dy = 0; dy < ra.h; ++dy) {
    for (int dx = 0; dx < ra.w; ++dx) {
      std::swap(a[static_cast<std::size_t>(ra.y + dy) * cols + ra.x + dx],
                b[static_cast<std::size_t>(rb.y + dy) * cols + rb.x + dx]);
    }
  }
}

int separation(const Rect& a, const Rect& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

}  // namespace

void CorruptionSpec::validate() const {
  if (!(p_uniform >= 0.0 && p_uniform <= kMaxSeverity)) {
    fail(ErrorCode::kOutOfRange, "p_uniform outside [0, 0.3]");
  }
  if (!(swap_fraction >= 0.0 && swap_fraction <= kMaxSeverity)) {
    fail(ErrorCode::kOutOfRange, "swap_fraction outside [0, 0.3]");
  }
  if (pixel) pixel->validate();
}

TokenSequence corrupt_tokens(const TokenSequence& seq, double p, std::uint32_t codebook_size,
                             std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kOutOfRange, "corruption p outside [0, 1]");
  require(codebook_size >= 1, ErrorCode::kInvalidArgument, "empty codebook");
  Rng rng(seed);
  TokenSequence out = seq;
  for (auto& id : out) {
    if (rng.uniform() < p) id = static_cast<TokenId>(rng.below(codebook_size));
  }
  return out;
}

std::pair<TokenSequence, TokenSequence> fragment_swap(const TokenSequence& a,
                                                      const TokenSequence& b,
                                                      const GridLayout& layout, double fraction,
                                                      std::uint64_t seed) {
  check_layout(a, layout);
  check_layout(b, layout);
  const auto area = block_area(layout, fraction);
  Rng rng(seed);
  const Rect r = sample_rectangle(static_cast<int>(layout.cols), static_cast<int>(layout.rows),
                                  area, rng);
  std::pair<TokenSequence, TokenSequence> out{a, b};
  swap_blocks(out.first, out.second, r, r, static_cast<int>(layout.cols));
  return out;
}

TokenSequence fragment_swap_within(const TokenSequence& a, const GridLayout& layout,
                                   double fraction, std::uint64_t seed) {
  check_layout(a, layout);
  const auto area = block_area(layout, fraction);
  const int cols = static_cast<int>(layout.cols), rows = static_cast<int>(layout.rows);
  Rng rng(seed);
  const Rect first = sample_rectangle(cols, rows, area, rng);
  const int want = (std::max(rows, cols) + 1) / 2;

  auto place = [&](int x, int y) { return Rect{x, y, first.w, first.h}; };
  Rect ra = first, rb{};
  int best_sep = -1;
  for (int t = 0; t < kPlacementTries && best_sep < want; ++t) {
    const Rect cand = place(static_cast<int>(rng.below(static_cast<std::uint64_t>(cols - first.w + 1))),
                            static_cast<int>(rng.below(static_cast<std::uint64_t>(rows - first.h + 1))));
    if (cand.overlaps(first)) continue;
    const int sep = separation(first, cand);
    if (sep > best_sep) {
      best_sep = sep;
      rb = cand;
    }
  }
  if (best_sep < want) {
    // exhaustive search over both placements for the widest separation
    for (int y1 = 0; y1 + first.h <= rows; ++y1) {
      for (int x1 = 0; x1 + first.w <= cols; ++x1) {
        const Rect p1 = place(x1, y1);
        for (int y2 = 0; y2 + first.h <= rows; ++y2) {
          for (int x2 = 0; x2 + first.w <= cols; ++x2) {
            const Rect p2 = place(x2, y2);
            if (p1.overlaps(p2)) continue;
            const int sep = separation(p1, p2);
            if (sep > best_sep) {
              best_sep = sep;
              ra = p1;
              rb = p2;
            }
          }
        }
      }
    }
  }
  require(best_sep >= 0, ErrorCode::kOutOfRange,
          "swap block too large to place twice without overlap");
  TokenSequence out = a;
  swap_blocks(out, out, ra, rb, cols);
  return out;
}

double quality_target(double p_eff) {
  if (!(p_eff >= 0.0 && p_eff <= kMaxSeverity)) {
    fail(ErrorCode::kOutOfRange, "severity " + std::to_string(p_eff) + " outside [0, 0.3]");
  }
  return std::exp(-kQualityDecay * p_eff);
}

double effective_severity(double p_uniform, double swap_fraction, double pixel_severity) {
  return std::min(kMaxSeverity, p_uniform + swap_fraction + pixel_severity);
}

CorruptedSample corrupt_sample(const TokenSequence& seq, const CorruptionSpec& spec,
                               std::uint32_t codebook_size, const GridLayout& layout,
                               const TokenSequence* partner) {
  spec.validate();
  CorruptedSample out;
  out.tokens = corrupt_tokens(seq, spec.p_uniform, codebook_size, derive_seed(spec.seed, 0));
  if (spec.swap_fraction > 0.0) {
    const std::uint64_t swap_seed = derive_seed(spec.seed, 1);
    if (partner) {
      out.tokens = fragment_swap(out.tokens, *partner, layout, spec.swap_fraction, swap_seed).first;
    } else {
      out.tokens = fragment_swap_within(out.tokens, layout, spec.swap_fraction, swap_seed);
    }
  }
  const double pixel = spec.pixel ? severity_of(*spec.pixel) : 0.0;
  out.p_eff = effective_severity(spec.p_uniform, spec.swap_fraction, pixel);
  out.target = quality_target(out.p_eff);
  return out;
}

}  // namespace tokeval::cmms
