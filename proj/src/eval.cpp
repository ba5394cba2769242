#include "tokeval/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tokeval/baselines.hpp"
#include "tokeval/distances.hpp"
#include "tokeval/error.hpp"
#include "tokeval/parallel.hpp"
#include "tokeval/rng.hpp"

namespace tokeval {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kLengthMismatch, "score lists differ in length (" +
                                         std::to_string(a.size()) + " vs " +
                                         std::to_string(b.size()) + ")");
  }
  require(a.size() >= 2, ErrorCode::kInvalidArgument, "need at least 2 paired scores");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::isfinite(a[i]) && std::isfinite(b[i]), ErrorCode::kNonFinite,
            "non-finite score");
  }
}

double pearson(const std::vector<double>& a, const std::vector<double>& b, bool* degenerate) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> aligned(std::span<const double> metric, Direction direction) {
  std::vector<double> out(metric.begin(), metric.end());
  if (direction == Direction::kLowerBetter) {
    for (double& v : out) v = -v;
  }
  return out;
}

std::vector<double> normalise(std::vector<double> v, NmseMode mode) {
  if (mode == NmseMode::kMinMax) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, range = *hi - *lo;
    require(range > 0.0, ErrorCode::kInvalidArgument, "N-MSE undefined for a constant list");
    for (double& x : v) x = (x - a) / range;
  } else {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    require(sd > 0.0, ErrorCode::kInvalidArgument, "N-MSE undefined for a constant list");
    for (double& x : v) x = (x - mean) / sd;
  }
  return v;
}

TokenDataset subsample(const TokenDataset& ds, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  TokenDataset out = ds.empty_like();
  out.sequences.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.sequences.push_back(ds.sequences[idx[i]]);
  return out;
}

}  // namespace

std::optional<Direction> parse_direction(std::string_view name) {
  if (name == "higher" || name == "higher_better") return Direction::kHigherBetter;
  if (name == "lower" || name == "lower_better") return Direction::kLowerBetter;
  return std::nullopt;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  check_pair(a, b);
  return pearson(average_ranks(a), average_ranks(b), degenerate);
}

double kendall(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  check_pair(a, b);
  const std::size_t n = a.size();
  double concordant = 0.0, discordant = 0.0, ties_a = 0.0, ties_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0) ties_a += 1.0;
      if (db == 0.0) ties_b += 1.0;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0.0) == (db > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((n0 - ties_a) * (n0 - ties_b));
  if (denom == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  return std::clamp((concordant - discordant) / denom, -1.0, 1.0);
}

double nmse(std::span<const double> metric, std::span<const double> human, Direction direction,
            NmseMode mode) {
  check_pair(metric, human);
  const auto m = normalise(aligned(metric, direction), mode);
  const auto h = normalise(std::vector<double>(human.begin(), human.end()), mode);
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += (m[i] - h[i]) * (m[i] - h[i]);
  return s / static_cast<double>(m.size());
}

double pairwise_accuracy(std::span<const double> metric, std::span<const double> human,
                         Direction direction) {
  check_pair(metric, human);
  const auto m = aligned(metric, direction);
  double score = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double dh = human[i] - human[j];
      if (dh == 0.0) continue;
      ++pairs;
      const double dm = m[i] - m[j];
      if (dm == 0.0) {
        score += 0.5;
      } else if ((dm > 0.0) == (dh > 0.0)) {
        score += 1.0;
      }
    }
  }
  require(pairs > 0, ErrorCode::kInvalidArgument,
          "pairwise accuracy needs at least one pair with distinct reference scores");
  return score / static_cast<double>(pairs);
}

CorrelationReport correlate(std::span<const double> metric, std::span<const double> human,
                            Direction direction, NmseMode mode) {
  CorrelationReport r;
  r.n = metric.size();
  const auto m = aligned(metric, direction);
  bool deg = false;
  r.spearman = spearman(m, human, &deg);
  if (deg) r.warnings.emplace_back("spearman: zero rank variance, reported as 0");
  r.kendall = kendall(m, human, &deg);
  if (deg) r.warnings.emplace_back("kendall: all pairs tied, reported as 0");
  r.nmse = nmse(metric, human, direction, mode);
  r.pairwise_accuracy = pairwise_accuracy(metric, human, direction);
  return r;
}

std::vector<std::pair<std::string, double>> read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string id, value, extra;
    ls >> id >> value;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size() ||
        (ls >> extra)) {
      fail(ErrorCode::kMalformedLine,
           path.string() + ":" + std::to_string(line_no) + ": expected 'id value'");
    }
    if (!std::isfinite(v)) {
      fail(ErrorCode::kNonFinite, path.string() + ":" + std::to_string(line_no) +
                                      ": non-finite score");
    }
    out.emplace_back(std::move(id), v);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> align_scores(
    const std::vector<std::pair<std::string, double>>& a,
    const std::vector<std::pair<std::string, double>>& b) {
  std::unordered_map<std::string, double> lookup;
  for (const auto& [id, v] : b) {
    if (!lookup.emplace(id, v).second) fail(ErrorCode::kMalformedLine, "duplicate id " + id);
  }
  require(a.size() == b.size(), ErrorCode::kIncompatible, "score files list different ids");
  std::pair<std::vector<double>, std::vector<double>> out;
  std::unordered_set<std::string> seen;
  for (const auto& [id, v] : a) {
    if (!seen.insert(id).second) fail(ErrorCode::kMalformedLine, "duplicate id " + id);
    const auto it = lookup.find(id);
    if (it == lookup.end()) fail(ErrorCode::kIncompatible, "id " + id + " missing from one file");
    out.first.push_back(v);
    out.second.push_back(it->second);
  }
  return out;
}

std::optional<SweepMetric> parse_sweep_metric(std::string_view name) {
  if (name == "chd") return SweepMetric::kChd;
  if (name == "frechet-unigram" || name == "frechet-on-unigram") {
    return SweepMetric::kFrechetUnigram;
  }
  return std::nullopt;
}

double frechet_unigram(const TokenDataset& real, const TokenDataset& gen) {
  require(real.codebook == gen.codebook && real.seq_len == gen.seq_len,
          ErrorCode::kIncompatible, "datasets differ in codebook or sequence length");
  // Tokens never observed in either set have zero mean and covariance on both
  // sides and drop out of the distance, so only the joint support is kept.
  std::vector<std::int64_t> column(real.codebook.size, -1);
  std::uint32_t dim = 0;
  for (const auto* ds : {&real, &gen}) {
    for (const auto& seq : ds->sequences) {
      for (TokenId id : seq) {
        if (column[id] < 0) column[id] = dim++;
      }
    }
  }
  auto features = [&](const TokenDataset& ds) {
    FeatureSet fs;
    fs.dim = std::max<std::uint32_t>(dim, 1);
    fs.values.assign(ds.size() * fs.dim, 0.0);
    const double inv = 1.0 / ds.seq_len;
    for (std::size_t s = 0; s < ds.size(); ++s) {
      for (TokenId id : ds.sequences[s]) fs.values[s * fs.dim + column[id]] += inv;
    }
    return fs;
  };
  return frechet_distance(fit_gaussian(features(real)), fit_gaussian(features(gen)));
}

SweepResult sample_sweep(const TokenDataset& real, const TokenDataset& gen,
                         const SweepOptions& options) {
  require(!options.sizes.empty(), ErrorCode::kInvalidArgument, "no sample sizes given");
  require(options.repeats >= 1, ErrorCode::kInvalidArgument, "repeats must be >= 1");
  for (auto n : options.sizes) {
    if (n == 0 || n > real.size() || n > gen.size()) {
      fail(ErrorCode::kOutOfRange, "sample size " + std::to_string(n) +
                                       " exceeds dataset sizes (" + std::to_string(real.size()) +
                                       ", " + std::to_string(gen.size()) + ")");
    }
  }
  const std::size_t tasks = options.sizes.size() * options.repeats;
  std::vector<double> values(tasks);
  parallel_for(tasks, options.threads, [&](std::size_t t) {
    const std::size_t n = options.sizes[t / options.repeats];
    Rng rng(derive_seed(options.seed, t));
    const TokenDataset r = subsample(real, n, rng);
    const TokenDataset g = subsample(gen, n, rng);
    values[t] = options.metric == SweepMetric::kChd
                    ? chd(r, g, options.displacements).chd
                    : frechet_unigram(r, g);
  });

  SweepResult out;
  for (std::size_t s = 0; s < options.sizes.size(); ++s) {
    const std::span<const double> v(values.data() + s * options.repeats, options.repeats);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.sample_sizes.push_back(options.sizes[s]);
    out.means.push_back(mean);
    out.stddevs.push_back(v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0);
  }
  return out;
}

}  // namespace tokeval
