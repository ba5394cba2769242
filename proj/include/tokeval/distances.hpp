#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "tokeval/histograms.hpp"

namespace tokeval {

enum class DistanceKind { kHellinger, kCosine, kKl, kEmd1d };

std::optional<DistanceKind> parse_distance(std::string_view name);
std::string_view distance_name(DistanceKind kind);

/// (1/sqrt 2) * ||sqrt p - sqrt q||_2 over probability vectors.
double hellinger(std::span<const double> p, std::span<const double> q);
double hellinger(const UnigramHistogram& p, const UnigramHistogram& q);

/// Hellinger over the union of observed pairs; absent pairs count as zero.
double hellinger_sparse(const SparseCooccurrence& p, const SparseCooccurrence& q);

/// Ablation distances:
///   cosine  1 - p.q / (|p||q|)  (0 when both vectors are zero),
///   kl      KL(p~ || q~) after adding 1e-8 to every entry and renormalising,
///   emd1d   sum_v |CDF_p(v) - CDF_q(v)| with codebook index order as ground metric.
double alt_distance(std::span<const double> p, std::span<const double> q, DistanceKind kind);

/// Any kind over two histograms; dispatches to hellinger for kHellinger.
double distance(std::span<const double> p, std::span<const double> q, DistanceKind kind);
/// Same over two co-occurrence distributions, densified over the union of
/// observed pairs in (u, v) order.
double distance(const SparseCooccurrence& p, const SparseCooccurrence& q, DistanceKind kind);

inline constexpr double kKlSmoothing = 1e-8;

struct ChdReport {
  double chd_1d = 0.0;
  double chd_2d = 0.0;
  double chd = 0.0;
};

/// Codebook histogram distance between a reference and a generated dataset.
ChdReport chd(const TokenDataset& real, const TokenDataset& gen, const DisplacementSet& disp,
              DistanceKind kind = DistanceKind::kHellinger, unsigned threads = 1);

/// Composite from precomputed statistics.
ChdReport chd(const UnigramHistogram& real_uni, const SparseCooccurrence& real_cooc,
              const UnigramHistogram& gen_uni, const SparseCooccurrence& gen_cooc,
              DistanceKind kind = DistanceKind::kHellinger);

}  // namespace tokeval
