#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tokeval {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

struct Codebook {
  std::uint32_t size = 0;  // K

  bool operator==(const Codebook&) const = default;
};

struct GridLayout {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  std::uint64_t cells() const { return std::uint64_t{rows} * cols; }
  bool operator==(const GridLayout&) const = default;
};

/// Fixed-length token sequences over a codebook. Sequences are stored in
/// dataset order; all statistics treat that order as irrelevant.
struct TokenDataset {
  Codebook codebook;
  std::uint32_t seq_len = 0;  // N
  std::optional<GridLayout> layout;
  std::vector<TokenSequence> sequences;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }

  /// Throws Error if any dataset invariant is violated.
  void validate() const;

  /// Same codebook, length and layout, no sequences.
  TokenDataset empty_like() const;

  bool operator==(const TokenDataset&) const = default;
};

/// Dense row-major feature vectors of a common dimension.
struct FeatureSet {
  std::uint32_t dim = 0;
  std::vector<double> values;  // count * dim

  std::size_t count() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  void push_back(std::span<const double> v);

  bool operator==(const FeatureSet&) const = default;
};

enum class TokenFormat { kBinary, kText };

// CHTK binary: "CHTK", 0x01, K u32, N u32, rows u32, cols u32, count u64,
// then count*N ids as u32. All integers little-endian.
std::uint64_t write_tokens(const TokenDataset& dataset, std::ostream& sink);
TokenDataset read_tokens(std::istream& source);
TokenDataset read_tokens(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_tokens(const TokenDataset& dataset);

// Text: "#chtk codebook=K seqlen=N grid=RxC", then one sequence per line.
void write_tokens_text(const TokenDataset& dataset, std::ostream& sink);
TokenDataset read_tokens_text(std::istream& source);

// CHFV binary: "CHFV", 0x01, dim u32, count u64, then count*dim f64.
std::uint64_t write_features(const FeatureSet& features, std::ostream& sink);
FeatureSet read_features(std::istream& source);
FeatureSet read_features(std::span<const std::uint8_t> bytes);

/// Reads either token format, picked by the leading bytes.
TokenDataset load_tokens(const std::filesystem::path& path);
void save_tokens(const std::filesystem::path& path, const TokenDataset& dataset,
                 TokenFormat format = TokenFormat::kBinary);
FeatureSet load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const FeatureSet& features);

}  // namespace tokeval
