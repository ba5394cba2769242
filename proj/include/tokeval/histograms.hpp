#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokeval/token_io.hpp"

namespace tokeval {

/// Token frequencies over a dataset. Counts are kept as integers so that
/// merging shards is exact; probabilities are derived on demand.
class UnigramHistogram {
 public:
  explicit UnigramHistogram(Codebook codebook = {}) : counts_(codebook.size, 0) {}

  std::uint32_t codebook_size() const { return static_cast<std::uint32_t>(counts_.size()); }
  std::uint64_t total_count() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  void add(const TokenSequence& seq);
  void merge(const UnigramHistogram& other);

  /// probs[v] = count(v) / total. Throws on an empty histogram.
  std::vector<double> probs() const;

  bool operator==(const UnigramHistogram&) const = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct Displacement {
  int dx = 0;  // column offset
  int dy = 0;  // row offset

  bool operator==(const Displacement&) const = default;
};

class DisplacementSet {
 public:
  DisplacementSet() = default;
  /// Throws unless non-empty, no zero offset and no pair {d, -d} or duplicate.
  explicit DisplacementSet(std::vector<Displacement> displacements);

  /// {(1,0), (0,1)}: right and down neighbours.
  static DisplacementSet right_down();
  /// Comma-separated list of `right`, `down`, `diag`, `antidiag` or `dx:dy`.
  static DisplacementSet parse(std::string_view spec);

  const std::vector<Displacement>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  bool operator==(const DisplacementSet&) const = default;

 private:
  std::vector<Displacement> items_;
};

/// Unordered token pair {u, v}, u <= v, packed for hashing.
inline std::uint64_t pair_key(std::uint32_t u, std::uint32_t v) {
  return u <= v ? (std::uint64_t{u} << 32 | v) : (std::uint64_t{v} << 32 | u);
}

struct PairProbability {
  std::uint32_t u = 0;  // u <= v
  std::uint32_t v = 0;
  double prob = 0.0;
};

/// Symmetrised co-occurrence statistics for each displacement. Per-displacement
/// counts are stored for unordered pairs (n(u,v) + n(v,u)) along with that
/// displacement's number of valid pairs Z.
class SparseCooccurrence {
 public:
  SparseCooccurrence() = default;
  SparseCooccurrence(Codebook codebook, DisplacementSet displacements);

  const DisplacementSet& displacements() const { return displacements_; }
  std::uint32_t codebook_size() const { return codebook_size_; }
  /// Sum of valid pair counts Z over all displacements.
  std::uint64_t pair_total() const;
  const std::vector<std::uint64_t>& pair_counts_per_displacement() const { return z_; }

  void add(const TokenSequence& seq, const GridLayout& layout);
  void merge(const SparseCooccurrence& other);

  /// Observed unordered pairs sorted by (u, v) with
  /// prob = (1/|D|) * sum_d count_d(u,v) / Z_d.
  std::vector<PairProbability> distribution() const;

  bool operator==(const SparseCooccurrence&) const = default;

 private:
  std::uint32_t codebook_size_ = 0;
  DisplacementSet displacements_;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> counts_;
  std::vector<std::uint64_t> z_;
};

/// Unigram histogram of all tokens in the dataset. Shards of the dataset are
/// accumulated on `threads` workers and merged; the result does not depend on
/// the thread count.
UnigramHistogram unigram(const TokenDataset& dataset, unsigned threads = 1);
SparseCooccurrence cooccurrence(const TokenDataset& dataset, const DisplacementSet& disp,
                                unsigned threads = 1);

UnigramHistogram merge_unigram(const UnigramHistogram& a, const UnigramHistogram& b);
SparseCooccurrence merge_cooc(const SparseCooccurrence& a, const SparseCooccurrence& b);

// `token prob` / `u v prob` lines for inspection.
void write_histogram_text(const UnigramHistogram& h, std::ostream& out);
void write_cooccurrence_text(const SparseCooccurrence& c, std::ostream& out);

}  // namespace tokeval
