#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond the data types and are written for clarity, not speed.

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tokeval/histograms.hpp"
#include "tokeval/rng.hpp"
#include "tokeval/token_io.hpp"

namespace tokeval::oracle {

inline TokenDataset random_dataset(std::uint64_t seed, std::uint32_t k, std::uint32_t rows,
                                   std::uint32_t cols, std::size_t count) {
  Rng rng(seed);
  TokenDataset ds;
  ds.codebook.size = k;
  ds.seq_len = rows * cols;
  ds.layout = GridLayout{rows, cols};
  for (std::size_t s = 0; s < count; ++s) {
    TokenSequence seq(ds.seq_len);
    for (auto& t : seq) t = static_cast<TokenId>(rng.below(k));
    ds.sequences.push_back(seq);
  }
  return ds;
}

inline std::vector<double> unigram(const TokenDataset& ds) {
  std::vector<double> counts(ds.codebook.size, 0.0);
  double total = 0;
  for (const auto& seq : ds.sequences) {
    for (TokenId t : seq) {
      counts[t] += 1;
      total += 1;
    }
  }
  for (auto& c : counts) c /= total;
  return counts;
}

// Directed joint for one displacement, dense K x K, normalised.
inline std::vector<std::vector<double>> directed_joint(const TokenDataset& ds,
                                                       const Displacement& d) {
  const int k = static_cast<int>(ds.codebook.size);
  const int rows = static_cast<int>(ds.layout->rows), cols = static_cast<int>(ds.layout->cols);
  std::vector<std::vector<double>> h(k, std::vector<double>(k, 0.0));
  double z = 0;
  for (const auto& seq : ds.sequences) {
    for (int y = 0; y < rows; ++y) {
      for (int x = 0; x < cols; ++x) {
        const int x2 = x + d.dx, y2 = y + d.dy;
        if (x2 < 0 || x2 >= cols || y2 < 0 || y2 >= rows) continue;
        h[seq[y * cols + x]][seq[y2 * cols + x2]] += 1;
        z += 1;
      }
    }
  }
  for (auto& row : h) {
    for (auto& v : row) v /= z;
  }
  return h;
}

// Unordered-pair distribution: symmetrise each displacement's joint, average
// over displacements, then fold (u, v) and (v, u) into the key (min, max).
inline std::map<std::pair<std::uint32_t, std::uint32_t>, double> cooccurrence(
    const TokenDataset& ds, const DisplacementSet& disp) {
  const std::uint32_t k = ds.codebook.size;
  std::vector<std::vector<double>> avg(k, std::vector<double>(k, 0.0));
  for (const auto& d : disp.items()) {
    const auto h = directed_joint(ds, d);
    for (std::uint32_t u = 0; u < k; ++u) {
      for (std::uint32_t v = 0; v < k; ++v) {
        avg[u][v] += 0.5 * (h[u][v] + h[v][u]) / static_cast<double>(disp.size());
      }
    }
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (std::uint32_t u = 0; u < k; ++u) {
    for (std::uint32_t v = u; v < k; ++v) {
      const double mass = u == v ? avg[u][u] : avg[u][v] + avg[v][u];
      if (mass > 0) out[{u, v}] = mass;
    }
  }
  return out;
}

inline double entropy(const std::vector<double>& p) {
  double h = 0;
  for (double v : p) {
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

inline double mutual_information(const TokenDataset& ds, const DisplacementSet& disp) {
  double total = 0;
  for (const auto& d : disp.items()) {
    const auto h = directed_joint(ds, d);
    const std::size_t k = h.size();
    std::vector<double> pu(k, 0.0), pv(k, 0.0);
    double mi = 0;
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t v = 0; v < k; ++v) {
        pu[u] += h[u][v];
        pv[v] += h[u][v];
      }
    }
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t v = 0; v < k; ++v) {
        if (h[u][v] > 0) mi += h[u][v] * std::log(h[u][v] / (pu[u] * pv[v]));
      }
    }
    total += mi;
  }
  return total / static_cast<double>(disp.size());
}

inline double hellinger(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return std::sqrt(s / 2.0);
}

// Dense vector over all K(K+1)/2 unordered pairs.
inline std::vector<double> dense_pairs(
    const std::map<std::pair<std::uint32_t, std::uint32_t>, double>& m, std::uint32_t k) {
  std::vector<double> out;
  for (std::uint32_t u = 0; u < k; ++u) {
    for (std::uint32_t v = u; v < k; ++v) {
      const auto it = m.find({u, v});
      out.push_back(it == m.end() ? 0.0 : it->second);
    }
  }
  return out;
}

inline double rbf(const std::vector<double>& a, const std::vector<double>& b, double bw) {
  double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-d2 / (2 * bw * bw));
}

inline double mmd2(const std::vector<std::vector<double>>& x,
                   const std::vector<std::vector<double>>& y, double bw) {
  double xx = 0, yy = 0, xy = 0;
  for (const auto& a : x) {
    for (const auto& b : x) xx += rbf(a, b, bw);
  }
  for (const auto& a : y) {
    for (const auto& b : y) yy += rbf(a, b, bw);
  }
  for (const auto& a : x) {
    for (const auto& b : y) xy += rbf(a, b, bw);
  }
  const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
  return xx / (m * m) + yy / (n * n) - 2 * xy / (m * n);
}

inline std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& v) {
  const std::size_t n = v.size(), d = v[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& row : v) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += row[i] / static_cast<double>(n);
  }
  std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (const auto& row : v) c[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
      c[i][j] /= static_cast<double>(n - 1);
    }
  }
  return c;
}

inline FeatureSet to_features(const std::vector<std::vector<double>>& v) {
  FeatureSet f;
  f.dim = static_cast<std::uint32_t>(v.at(0).size());
  for (const auto& row : v) f.push_back(row);
  return f;
}

inline std::vector<std::vector<double>> random_vectors(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> v(n, std::vector<double>(d));
  for (auto& row : v) {
    for (auto& x : row) x = rng.normal();
  }
  return v;
}

}  // namespace tokeval::oracle
