#include "tokeval/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "tokeval/error.hpp"

namespace tokeval {
namespace {

double plogp_sum(const std::vector<std::uint64_t>& counts, double total) {
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double token_entropy(const TokenDataset& dataset) {
  const auto p = unigram(dataset).probs();
  return entropy(p);
}

double adjacent_mi(const TokenDataset& dataset, const DisplacementSet& disp) {
  require(dataset.layout.has_value(), ErrorCode::kInvalidDataset,
          "adjacent mutual information requires a grid layout");
  require(!dataset.empty(), ErrorCode::kInvalidDataset, "empty dataset");
  const int rows = static_cast<int>(dataset.layout->rows);
  const int cols = static_cast<int>(dataset.layout->cols);
  const std::size_t k = dataset.codebook.size;

  double mi_sum = 0.0;
  for (const auto& [dx, dy] : disp.items()) {
    const int x0 = std::max(0, -dx), x1 = std::min(cols, cols - dx);
    const int y0 = std::max(0, -dy), y1 = std::min(rows, rows - dy);
    require(x0 < x1 && y0 < y1, ErrorCode::kInvalidArgument,
            "displacement leaves no valid pairs on the grid");
    std::vector<std::uint64_t> left(k, 0), right(k, 0);
    std::unordered_map<std::uint64_t, std::uint64_t> joint;
    std::uint64_t total = 0;
    for (const auto& seq : dataset.sequences) {
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const TokenId a = seq[static_cast<std::size_t>(y) * cols + x];
          const TokenId b = seq[static_cast<std::size_t>(y + dy) * cols + (x + dx)];
          ++left[a];
          ++right[b];
          ++joint[std::uint64_t{a} << 32 | b];
          ++total;
        }
      }
    }
    // sorted for a fixed summation order
    std::vector<std::uint64_t> joint_counts;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> items(joint.begin(), joint.end());
    std::sort(items.begin(), items.end());
    joint_counts.reserve(items.size());
    for (const auto& [key, n] : items) joint_counts.push_back(n);
    const double t = static_cast<double>(total);
    const double mi = plogp_sum(left, t) + plogp_sum(right, t) - plogp_sum(joint_counts, t);
    mi_sum += std::max(mi, 0.0);
  }
  return mi_sum / static_cast<double>(disp.size());
}

}  // namespace tokeval
