#include "tokeval/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "tokeval/error.hpp"
#include "tokeval/rng.hpp"

namespace tokeval {
namespace {

// Muted natural colours: foliage, sky, soil, stone, skin, water.
constexpr std::array<std::array<int, 3>, 12> kScenePalette{{
    {34, 139, 34}, {107, 142, 35}, {135, 206, 235}, {70, 130, 180},
    {139, 69, 19}, {160, 82, 45}, {128, 128, 128}, {192, 192, 192},
    {233, 196, 160}, {250, 235, 215}, {25, 25, 112}, {220, 20, 60},
}};

std::array<double, 3> jittered(Rng& rng, double spread) {
  const auto& base = kScenePalette[rng.below(kScenePalette.size())];
  return {base[0] + rng.uniform(-spread, spread), base[1] + rng.uniform(-spread, spread),
          base[2] + rng.uniform(-spread, spread)};
}

}  // namespace

Image synthetic_image(int width, int height, std::uint64_t seed) {
  require(width > 0 && height > 0, ErrorCode::kInvalidArgument, "empty image size");
  Rng rng(seed);
  Image img(width, height);
  const auto top = jittered(rng, 20.0);
  const auto bottom = jittered(rng, 20.0);
  for (int y = 0; y < height; ++y) {
    const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_channel((1 - t) * top[c] + t * bottom[c]);
    }
  }
  const int shapes = 3 + static_cast<int>(rng.below(4));
  for (int s = 0; s < shapes; ++s) {
    const auto color = jittered(rng, 25.0);
    const bool ellipse = rng.bernoulli(0.5);
    const double cx = rng.uniform(0.0, width), cy = rng.uniform(0.0, height);
    const double rx = rng.uniform(0.08, 0.35) * width, ry = rng.uniform(0.08, 0.35) * height;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0
                                    : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_channel(color[c]);
      }
    }
  }
  return img;
}

std::vector<Image> synthetic_images(std::size_t count, int width, int height,
                                    std::uint64_t seed) {
  std::vector<Image> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(synthetic_image(width, height, derive_seed(seed, i)));
  }
  return out;
}

TokenDataset structured_tokens(std::size_t count, std::uint32_t codebook_size,
                               GridLayout layout, std::uint64_t seed,
                               const StructuredTokenParams& params) {
  require(codebook_size >= 2, ErrorCode::kInvalidArgument, "codebook size must be >= 2");
  require(layout.rows > 0 && layout.cols > 0, ErrorCode::kInvalidArgument, "empty grid");
  require(params.min_regions >= 1 && params.max_regions >= params.min_regions,
          ErrorCode::kInvalidArgument, "bad region count range");
  TokenDataset ds;
  ds.codebook.size = codebook_size;
  ds.seq_len = static_cast<std::uint32_t>(layout.cells());
  ds.layout = layout;
  ds.sequences.reserve(count);

  const int rows = static_cast<int>(layout.rows), cols = static_cast<int>(layout.cols);
  Rng rng(seed);
  for (std::size_t s = 0; s < count; ++s) {
    const int regions =
        params.min_regions +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_regions - params.min_regions + 1)));
    std::vector<std::array<double, 2>> centers(regions);
    std::vector<TokenId> tokens(regions);
    for (int r = 0; r < regions; ++r) {
      centers[r] = {rng.uniform(0.0, cols), rng.uniform(0.0, rows)};
      const double u = std::pow(rng.uniform(), params.skew);
      tokens[r] = std::min<TokenId>(codebook_size - 1,
                                    static_cast<TokenId>(u * codebook_size));
    }
    TokenSequence seq(ds.seq_len);
    for (int y = 0; y < rows; ++y) {
      for (int x = 0; x < cols; ++x) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int r = 0; r < regions; ++r) {
          const double dx = x + 0.5 - centers[r][0], dy = y + 0.5 - centers[r][1];
          const double d = dx * dx + dy * dy;
          if (d < best_d) {
            best_d = d;
            best = r;
          }
        }
        TokenId t = tokens[best];
        if (rng.bernoulli(params.jitter)) {
          t = rng.bernoulli(0.5) ? (t + 1 < codebook_size ? t + 1 : t) : (t > 0 ? t - 1 : t);
        }
        seq[static_cast<std::size_t>(y) * cols + x] = t;
      }
    }
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

TokenDataset iid_tokens(std::size_t count, std::uint32_t codebook_size, GridLayout layout,
                        double exponent, std::uint64_t seed) {
  require(codebook_size >= 1, ErrorCode::kInvalidArgument, "codebook size must be >= 1");
  require(layout.rows > 0 && layout.cols > 0, ErrorCode::kInvalidArgument, "empty grid");
  require(std::isfinite(exponent) && exponent >= 0, ErrorCode::kInvalidArgument,
          "zipf exponent must be finite and >= 0");
  std::vector<double> cdf(codebook_size);
  double total = 0;
  for (std::uint32_t v = 0; v < codebook_size; ++v) {
    cdf[v] = total += std::pow(v + 1.0, -exponent);
  }
  TokenDataset ds;
  ds.codebook.size = codebook_size;
  ds.seq_len = static_cast<std::uint32_t>(layout.cells());
  ds.layout = layout;
  ds.sequences.resize(count, TokenSequence(ds.seq_len));
  Rng rng(seed);
  for (auto& seq : ds.sequences) {
    for (auto& t : seq) {
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * total);
      t = static_cast<TokenId>(std::min<std::ptrdiff_t>(it - cdf.begin(), codebook_size - 1));
    }
  }
  return ds;
}

}  // namespace tokeval
