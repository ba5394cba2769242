#include "tokeval/distances.hpp"

#include <cmath>
#include <string>

#include "tokeval/error.hpp"

namespace tokeval {
namespace {

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kIncompatible, "distributions have different support sizes (" +
                                       std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// Aligns two sparse pair distributions onto their union, in (u, v) order.
void densify(const SparseCooccurrence& p, const SparseCooccurrence& q,
             std::vector<double>& dp, std::vector<double>& dq) {
  const auto a = p.distribution();
  const auto b = q.distribution();
  dp.clear();
  dq.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const std::uint64_t ka = i < a.size() ? pair_key(a[i].u, a[i].v) : UINT64_MAX;
    const std::uint64_t kb = j < b.size() ? pair_key(b[j].u, b[j].v) : UINT64_MAX;
    if (ka == kb) {
      dp.push_back(a[i++].prob);
      dq.push_back(b[j++].prob);
    } else if (ka < kb) {
      dp.push_back(a[i++].prob);
      dq.push_back(0.0);
    } else {
      dp.push_back(0.0);
      dq.push_back(b[j++].prob);
    }
  }
}

void check_compatible(const SparseCooccurrence& p, const SparseCooccurrence& q) {
  if (p.codebook_size() != q.codebook_size() || !(p.displacements() == q.displacements())) {
    fail(ErrorCode::kIncompatible,
         "co-occurrence statistics use different codebooks or displacement sets");
  }
}

}  // namespace

std::optional<DistanceKind> parse_distance(std::string_view name) {
  if (name == "hellinger") return DistanceKind::kHellinger;
  if (name == "cosine") return DistanceKind::kCosine;
  if (name == "kl") return DistanceKind::kKl;
  if (name == "emd1d") return DistanceKind::kEmd1d;
  return std::nullopt;
}

std::string_view distance_name(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kHellinger: return "hellinger";
    case DistanceKind::kCosine: return "cosine";
    case DistanceKind::kKl: return "kl";
    case DistanceKind::kEmd1d: return "emd1d";
  }
  return "unknown";
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  check_same_size(p.size(), q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    sum += d * d;
  }
  return std::sqrt(sum) / std::sqrt(2.0);
}

double hellinger(const UnigramHistogram& p, const UnigramHistogram& q) {
  check_same_size(p.codebook_size(), q.codebook_size());
  const auto a = p.probs();
  const auto b = q.probs();
  return hellinger(a, b);
}

double hellinger_sparse(const SparseCooccurrence& p, const SparseCooccurrence& q) {
  check_compatible(p, q);
  std::vector<double> a, b;
  densify(p, q, a, b);
  return hellinger(a, b);
}

double alt_distance(std::span<const double> p, std::span<const double> q, DistanceKind kind) {
  check_same_size(p.size(), q.size());
  switch (kind) {
    case DistanceKind::kHellinger:
      return hellinger(p, q);
    case DistanceKind::kCosine: {
      double dot = 0.0, np = 0.0, nq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        np += p[i] * p[i];
        nq += q[i] * q[i];
      }
      if (np == 0.0 && nq == 0.0) return 0.0;
      if (np == 0.0 || nq == 0.0) return 1.0;
      return 1.0 - dot / (std::sqrt(np) * std::sqrt(nq));
    }
    case DistanceKind::kKl: {
      double sp = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        sp += p[i] + kKlSmoothing;
        sq += q[i] + kKlSmoothing;
      }
      double kl = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = (p[i] + kKlSmoothing) / sp;
        const double b = (q[i] + kKlSmoothing) / sq;
        kl += a * std::log(a / b);
      }
      return kl;
    }
    case DistanceKind::kEmd1d: {
      double cp = 0.0, cq = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        cp += p[i];
        cq += q[i];
        sum += std::abs(cp - cq);
      }
      return sum;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown distance kind");
}

double distance(std::span<const double> p, std::span<const double> q, DistanceKind kind) {
  return alt_distance(p, q, kind);
}

double distance(const SparseCooccurrence& p, const SparseCooccurrence& q, DistanceKind kind) {
  check_compatible(p, q);
  std::vector<double> a, b;
  densify(p, q, a, b);
  return alt_distance(a, b, kind);
}

ChdReport chd(const UnigramHistogram& real_uni, const SparseCooccurrence& real_cooc,
              const UnigramHistogram& gen_uni, const SparseCooccurrence& gen_cooc,
              DistanceKind kind) {
  check_same_size(real_uni.codebook_size(), gen_uni.codebook_size());
  ChdReport r;
  const auto pr = real_uni.probs();
  const auto pg = gen_uni.probs();
  r.chd_1d = distance(pr, pg, kind);
  r.chd_2d = distance(real_cooc, gen_cooc, kind);
  r.chd = 0.5 * (r.chd_1d + r.chd_2d);
  return r;
}

ChdReport chd(const TokenDataset& real, const TokenDataset& gen, const DisplacementSet& disp,
              DistanceKind kind, unsigned threads) {
  if (real.codebook != gen.codebook || real.seq_len != gen.seq_len ||
      real.layout != gen.layout) {
    fail(ErrorCode::kIncompatible,
         "datasets differ in codebook size, sequence length or grid layout");
  }
  return chd(unigram(real, threads), cooccurrence(real, disp, threads), unigram(gen, threads),
             cooccurrence(gen, disp, threads), kind);
}

}  // namespace tokeval
