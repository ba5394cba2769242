#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "tokeval/degrade.hpp"
#include "tokeval/token_io.hpp"

namespace tokeval::cmms {

inline constexpr double kMaxSeverity = 0.3;
inline constexpr double kQualityDecay = 20.0;

/// Degradations applied to one token sequence. Pixel distortions happen
/// before tokenisation; only their severity enters here.
struct CorruptionSpec {
  double p_uniform = 0.0;      // [0, 0.3]
  double swap_fraction = 0.0;  // [0, 0.3]
  std::optional<DegradeSpec> pixel;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Each position is independently redrawn uniformly from [0, K) with
/// probability p; the redraw may land on the original token.
TokenSequence corrupt_tokens(const TokenSequence& seq, double p, std::uint32_t codebook_size,
                             std::uint64_t seed);

/// Exchanges one grid block of round(fraction * N) cells, at the same seeded
/// location, between two sequences. fraction must lie in (0, 0.3].
std::pair<TokenSequence, TokenSequence> fragment_swap(const TokenSequence& a,
                                                      const TokenSequence& b,
                                                      const GridLayout& layout, double fraction,
                                                      std::uint64_t seed);

/// Exchanges two equally shaped, non-overlapping blocks inside one sequence.
/// Block centres are kept at least max(R, C)/2 apart (Chebyshev) when one of
/// 16 seeded draws achieves it; otherwise the placement with the largest
/// separation is used.
TokenSequence fragment_swap_within(const TokenSequence& a, const GridLayout& layout,
                                   double fraction, std::uint64_t seed);

/// q(p) = exp(-20 p) on [0, 0.3].
double quality_target(double p_eff);

/// min(0.3, p_uniform + swap_fraction + pixel severity).
double effective_severity(double p_uniform, double swap_fraction, double pixel_severity);

struct CorruptedSample {
  TokenSequence tokens;
  double target = 1.0;
  double p_eff = 0.0;
};

/// Uniform corruption, then an optional fragment swap (with `partner` when
/// given, inside the sequence otherwise), then the quality target of the
/// combined severity.
CorruptedSample corrupt_sample(const TokenSequence& seq, const CorruptionSpec& spec,
                               std::uint32_t codebook_size, const GridLayout& layout,
                               const TokenSequence* partner = nullptr);

}  // namespace tokeval::cmms
