#include "tokeval/histograms.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>

#include "tokeval/error.hpp"
#include "tokeval/parallel.hpp"

namespace tokeval {
namespace {

template <class Acc, class Make>
Acc sharded(const TokenDataset& dataset, unsigned threads, Make make) {
  const std::size_t shards = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, dataset.size()));
  std::vector<Acc> parts(shards, make());
  parallel_for(shards, threads, [&](std::size_t s) {
    const std::size_t begin = dataset.size() * s / shards;
    const std::size_t end = dataset.size() * (s + 1) / shards;
    for (std::size_t i = begin; i < end; ++i) parts[s].add(dataset.sequences[i]);
  });
  Acc out = std::move(parts[0]);
  for (std::size_t s = 1; s < shards; ++s) out.merge(parts[s]);
  return out;
}

bool parse_int(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

void UnigramHistogram::add(const TokenSequence& seq) {
  for (TokenId id : seq) {
    if (id >= counts_.size()) {
      fail(ErrorCode::kTokenOutOfRange, "token id " + std::to_string(id) + " outside codebook");
    }
    ++counts_[id];
  }
  total_ += seq.size();
}

void UnigramHistogram::merge(const UnigramHistogram& other) {
  if (other.counts_.size() != counts_.size()) {
    fail(ErrorCode::kIncompatible, "cannot merge histograms over different codebooks");
  }
  for (std::size_t v = 0; v < counts_.size(); ++v) counts_[v] += other.counts_[v];
  total_ += other.total_;
}

std::vector<double> UnigramHistogram::probs() const {
  require(total_ > 0, ErrorCode::kInvalidDataset, "histogram has no counts");
  std::vector<double> p(counts_.size());
  const double total = static_cast<double>(total_);
  for (std::size_t v = 0; v < counts_.size(); ++v) p[v] = static_cast<double>(counts_[v]) / total;
  return p;
}

DisplacementSet::DisplacementSet(std::vector<Displacement> displacements)
    : items_(std::move(displacements)) {
  require(!items_.empty(), ErrorCode::kInvalidArgument, "displacement set is empty");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& d = items_[i];
    require(d.dx != 0 || d.dy != 0, ErrorCode::kInvalidArgument, "zero displacement");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& e = items_[j];
      if (d == e || (d.dx == -e.dx && d.dy == -e.dy)) {
        fail(ErrorCode::kInvalidArgument,
             "displacement (" + std::to_string(d.dx) + "," + std::to_string(d.dy) +
                 ") duplicates an existing one or its negation");
      }
    }
  }
}

DisplacementSet DisplacementSet::right_down() { return DisplacementSet({{1, 0}, {0, 1}}); }

DisplacementSet DisplacementSet::parse(std::string_view spec) {
  std::vector<Displacement> out;
  while (!spec.empty()) {
    const auto comma = std::min(spec.find(','), spec.size());
    const std::string_view item = spec.substr(0, comma);
    if (item == "right") {
      out.push_back({1, 0});
    } else if (item == "down") {
      out.push_back({0, 1});
    } else if (item == "diag") {
      out.push_back({1, 1});
    } else if (item == "antidiag") {
      out.push_back({-1, 1});
    } else {
      const auto colon = item.find(':');
      Displacement d;
      if (colon == std::string_view::npos || !parse_int(item.substr(0, colon), d.dx) ||
          !parse_int(item.substr(colon + 1), d.dy)) {
        fail(ErrorCode::kInvalidArgument, "bad displacement '" + std::string(item) + "'");
      }
      out.push_back(d);
    }
    spec.remove_prefix(std::min(comma + 1, spec.size()));
  }
  return DisplacementSet(std::move(out));
}

SparseCooccurrence::SparseCooccurrence(Codebook codebook, DisplacementSet displacements)
    : codebook_size_(codebook.size),
      displacements_(std::move(displacements)),
      counts_(displacements_.size()),
      z_(displacements_.size(), 0) {}

std::uint64_t SparseCooccurrence::pair_total() const {
  std::uint64_t total = 0;
  for (auto z : z_) total += z;
  return total;
}

void SparseCooccurrence::add(const TokenSequence& seq, const GridLayout& layout) {
  require(seq.size() == layout.cells(), ErrorCode::kLengthMismatch,
          "sequence length does not match grid");
  const int rows = static_cast<int>(layout.rows), cols = static_cast<int>(layout.cols);
  for (std::size_t d = 0; d < displacements_.size(); ++d) {
    const auto [dx, dy] = displacements_.items()[d];
    const int x0 = std::max(0, -dx), x1 = std::min(cols, cols - dx);
    const int y0 = std::max(0, -dy), y1 = std::min(rows, rows - dy);
    if (x0 >= x1 || y0 >= y1) {
      fail(ErrorCode::kInvalidArgument, "displacement (" + std::to_string(dx) + "," +
                                            std::to_string(dy) + ") leaves no valid pairs on a " +
                                            std::to_string(rows) + "x" + std::to_string(cols) +
                                            " grid");
    }
    auto& table = counts_[d];
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const TokenId a = seq[static_cast<std::size_t>(y) * cols + x];
        const TokenId b = seq[static_cast<std::size_t>(y + dy) * cols + (x + dx)];
        if (a >= codebook_size_ || b >= codebook_size_) {
          fail(ErrorCode::kTokenOutOfRange, "token id outside codebook");
        }
        ++table[pair_key(a, b)];
      }
    }
    z_[d] += static_cast<std::uint64_t>(x1 - x0) * static_cast<std::uint64_t>(y1 - y0);
  }
}

void SparseCooccurrence::merge(const SparseCooccurrence& other) {
  if (other.codebook_size_ != codebook_size_ || !(other.displacements_ == displacements_)) {
    fail(ErrorCode::kIncompatible,
         "cannot merge co-occurrence statistics with different codebooks or displacements");
  }
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    for (const auto& [key, n] : other.counts_[d]) counts_[d][key] += n;
    z_[d] += other.z_[d];
  }
}

std::vector<PairProbability> SparseCooccurrence::distribution() const {
  std::vector<std::uint64_t> keys;
  for (const auto& table : counts_) {
    for (const auto& entry : table) keys.push_back(entry.first);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (auto z : z_) require(z > 0, ErrorCode::kInvalidDataset, "co-occurrence has no pairs");

  const double inv_d = 1.0 / static_cast<double>(counts_.size());
  std::vector<PairProbability> out;
  out.reserve(keys.size());
  for (auto key : keys) {
    double p = 0.0;
    for (std::size_t d = 0; d < counts_.size(); ++d) {
      const auto it = counts_[d].find(key);
      if (it != counts_[d].end()) {
        p += static_cast<double>(it->second) / static_cast<double>(z_[d]);
      }
    }
    out.push_back({static_cast<std::uint32_t>(key >> 32),
                   static_cast<std::uint32_t>(key & 0xffffffffu), p * inv_d});
  }
  return out;
}

UnigramHistogram unigram(const TokenDataset& dataset, unsigned threads) {
  require(!dataset.empty(), ErrorCode::kInvalidDataset, "unigram of an empty dataset");
  return sharded<UnigramHistogram>(dataset, threads,
                                   [&] { return UnigramHistogram(dataset.codebook); });
}

namespace {

struct CoocShard {
  SparseCooccurrence acc;
  GridLayout layout;
  void add(const TokenSequence& seq) { acc.add(seq, layout); }
  void merge(const CoocShard& o) { acc.merge(o.acc); }
};

}  // namespace

SparseCooccurrence cooccurrence(const TokenDataset& dataset, const DisplacementSet& disp,
                                unsigned threads) {
  require(dataset.layout.has_value(), ErrorCode::kInvalidDataset,
          "co-occurrence requires a grid layout");
  require(!dataset.empty(), ErrorCode::kInvalidDataset, "co-occurrence of an empty dataset");
  const GridLayout layout = *dataset.layout;
  // surface an unusable displacement before any work is sharded
  SparseCooccurrence probe(dataset.codebook, disp);
  probe.add(dataset.sequences.front(), layout);
  return sharded<CoocShard>(dataset, threads, [&] {
           return CoocShard{SparseCooccurrence(dataset.codebook, disp), layout};
         }).acc;
}

UnigramHistogram merge_unigram(const UnigramHistogram& a, const UnigramHistogram& b) {
  UnigramHistogram out = a;
  out.merge(b);
  return out;
}

SparseCooccurrence merge_cooc(const SparseCooccurrence& a, const SparseCooccurrence& b) {
  SparseCooccurrence out = a;
  out.merge(b);
  return out;
}

void write_histogram_text(const UnigramHistogram& h, std::ostream& out) {
  const auto p = h.probs();
  char buf[64];
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (h.counts()[v] == 0) continue;
    std::snprintf(buf, sizeof(buf), "%zu %.17g\n", v, p[v]);
    out << buf;
  }
}

void write_cooccurrence_text(const SparseCooccurrence& c, std::ostream& out) {
  char buf[96];
  for (const auto& e : c.distribution()) {
    std::snprintf(buf, sizeof(buf), "%u %u %.17g\n", e.u, e.v, e.prob);
    out << buf;
  }
}

}  // namespace tokeval
