#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tokeval/image.hpp"
#include "tokeval/token_io.hpp"

namespace tokeval {

using Rgb = std::array<std::uint8_t, 3>;

/// K colours on a near-cubic RGB lattice, used as a deterministic stand-in
/// for a learned codebook.
class PaletteCodebook {
 public:
  explicit PaletteCodebook(std::uint32_t k);

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  const std::vector<Rgb>& entries() const { return entries_; }
  Codebook codebook() const { return {size()}; }

  /// Index of the nearest entry (squared RGB distance), lowest index on ties.
  TokenId nearest(double r, double g, double b) const;

 private:
  TokenId nearest_brute(double r, double g, double b) const;

  std::uint32_t side_;
  std::vector<std::uint8_t> levels_;
  std::vector<Rgb> entries_;
};

/// Lattice side s = smallest integer with s^3 >= K, levels round(i*255/(s-1)),
/// entries in lexicographic (r, g, b) order truncated to the first K.
PaletteCodebook build_palette(std::uint32_t k);

/// Patch-mean quantisation: the image is split into rows x cols equal patches
/// and each patch becomes the palette index nearest its mean colour. Tokens
/// are emitted row-major.
TokenSequence tokenize(const Image& img, const GridLayout& layout,
                       const PaletteCodebook& palette);

}  // namespace tokeval
