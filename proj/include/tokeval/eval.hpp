#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokeval/histograms.hpp"

namespace tokeval {

enum class Direction { kHigherBetter, kLowerBetter };
enum class NmseMode { kMinMax, kZScore };

std::optional<Direction> parse_direction(std::string_view name);

/// Mean ranks (1-based), ties get the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. A constant ranking on either side
/// returns 0 and sets *degenerate when given.
double spearman(std::span<const double> a, std::span<const double> b,
                bool* degenerate = nullptr);

/// Kendall tau-b with tie corrections; degenerate inputs as for spearman.
double kendall(std::span<const double> a, std::span<const double> b,
               bool* degenerate = nullptr);

/// Mean squared difference after aligning direction (the metric is negated
/// when lower is better) and normalising each list (min-max by default).
double nmse(std::span<const double> metric, std::span<const double> human, Direction direction,
            NmseMode mode = NmseMode::kMinMax);

/// Fraction of pairs with distinct human scores ordered the same way by the
/// direction-adjusted metric; metric ties score 0.5.
double pairwise_accuracy(std::span<const double> metric, std::span<const double> human,
                         Direction direction);

struct CorrelationReport {
  double spearman = 0.0;
  double kendall = 0.0;
  double nmse = 0.0;
  double pairwise_accuracy = 0.0;
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

CorrelationReport correlate(std::span<const double> metric, std::span<const double> human,
                            Direction direction, NmseMode mode = NmseMode::kMinMax);

/// `id value` lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, double>> read_scores(const std::filesystem::path& path);

/// Joins two score lists on id, keeping the order of `a`. Throws when the id
/// sets differ or an id repeats.
std::pair<std::vector<double>, std::vector<double>> align_scores(
    const std::vector<std::pair<std::string, double>>& a,
    const std::vector<std::pair<std::string, double>>& b);

enum class SweepMetric { kChd, kFrechetUnigram };

std::optional<SweepMetric> parse_sweep_metric(std::string_view name);

struct SweepResult {
  std::vector<std::size_t> sample_sizes;
  std::vector<double> means;
  std::vector<double> stddevs;  // sample standard deviation over repeats; 0 for one repeat
};

struct SweepOptions {
  std::vector<std::size_t> sizes;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  SweepMetric metric = SweepMetric::kChd;
  DisplacementSet displacements = DisplacementSet::right_down();
  unsigned threads = 1;
};

/// For each size, `repeats` seeded subsample pairs (without replacement) from
/// both datasets, the metric on each pair, then mean and stddev.
SweepResult sample_sweep(const TokenDataset& real, const TokenDataset& gen,
                         const SweepOptions& options);

/// Fréchet distance between Gaussians fitted to per-sequence unigram
/// frequency vectors (dimension K).
double frechet_unigram(const TokenDataset& real, const TokenDataset& gen);

}  // namespace tokeval
