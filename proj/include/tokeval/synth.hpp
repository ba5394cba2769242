#pragma once

#include <cstdint>
#include <vector>

#include "tokeval/image.hpp"
#include "tokeval/token_io.hpp"

namespace tokeval {

/// Procedural scene: a two-tone vertical gradient with a handful of flat
/// coloured rectangles and ellipses on top. Sharp edges and large flat areas
/// give token statistics that react visibly to blur, noise and occlusion.
Image synthetic_image(int width, int height, std::uint64_t seed);

std::vector<Image> synthetic_images(std::size_t count, int width, int height,
                                    std::uint64_t seed);

struct StructuredTokenParams {
  double skew = 3.0;    // region tokens are floor(K * u^skew), favouring low ids
  double jitter = 0.1;  // per-cell chance of stepping to an adjacent id
  int min_regions = 2;
  int max_regions = 5;
};

/// Spatially coherent token grids: each sequence is a Voronoi partition of
/// the grid into a few regions, each filled with one skew-distributed token.
TokenDataset structured_tokens(std::size_t count, std::uint32_t codebook_size,
                               GridLayout layout, std::uint64_t seed,
                               const StructuredTokenParams& params = {});

/// Every token drawn independently from a Zipf law P(v) proportional to
/// (v + 1)^-exponent over [0, K). No spatial structure.
TokenDataset iid_tokens(std::size_t count, std::uint32_t codebook_size, GridLayout layout,
                        double exponent, std::uint64_t seed);

}  // namespace tokeval
