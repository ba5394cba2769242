#include "tokeval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tokeval/error.hpp"

namespace tokeval {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Pairwise (tree) summation; the order depends only on the input length.
double tree_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return tree_sum(v.first(half)) + tree_sum(v.subspan(half));
}

double mean_kernel(const FeatureSet& a, const FeatureSet& b, double gamma2) {
  std::vector<double> rows(a.count());
  std::vector<double> row(b.count());
  for (std::size_t i = 0; i < a.count(); ++i) {
    for (std::size_t j = 0; j < b.count(); ++j) {
      row[j] = std::exp(-squared_distance(a.row(i), b.row(j)) / (2.0 * gamma2));
    }
    rows[i] = tree_sum(row);
  }
  return tree_sum(rows) / (static_cast<double>(a.count()) * static_cast<double>(b.count()));
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

void check_dims(const FeatureSet& x, const FeatureSet& y) {
  if (x.dim != y.dim) {
    fail(ErrorCode::kIncompatible, "feature dimensions differ (" + std::to_string(x.dim) +
                                       " vs " + std::to_string(y.dim) + ")");
  }
}

}  // namespace

GaussianFit fit_gaussian(const FeatureSet& features) {
  const std::size_t n = features.count();
  require(n >= 2, ErrorCode::kInvalidDataset, "Gaussian fit needs at least 2 vectors");
  const Eigen::Index d = features.dim;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      features.values.data(), static_cast<Eigen::Index>(n), d);
  GaussianFit fit;
  fit.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - fit.mean.transpose();
  const Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(n - 1);
  fit.cov = 0.5 * (c + c.transpose());
  return fit;
}

double frechet_distance(const GaussianFit& a, const GaussianFit& b) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows() ||
      a.cov.rows() != a.mean.size()) {
    fail(ErrorCode::kIncompatible, "Gaussian fits have different dimensions");
  }
  const double mean_term = (a.mean - b.mean).squaredNorm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a.cov);
  if (ea.info() != Eigen::Success) fail(ErrorCode::kNumeric, "eigendecomposition failed");
  const Eigen::VectorXd sqrt_vals = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root_a =
      ea.eigenvectors() * sqrt_vals.asDiagonal() * ea.eigenvectors().transpose();

  Eigen::MatrixXd m = root_a * b.cov * root_a;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m, Eigen::EigenvaluesOnly);
  if (em.info() != Eigen::Success) fail(ErrorCode::kNumeric, "eigendecomposition failed");
  const double trace_cross = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double fd = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * trace_cross;
  if (!std::isfinite(fd)) fail(ErrorCode::kNumeric, "Frechet distance is not finite");
  return std::max(fd, 0.0);
}

double median_bandwidth(const FeatureSet& x, const FeatureSet& y) {
  check_dims(x, y);
  std::vector<std::span<const double>> pooled;
  for (std::size_t i = 0; i < x.count(); ++i) pooled.push_back(x.row(i));
  for (std::size_t i = 0; i < y.count(); ++i) pooled.push_back(y.row(i));
  std::vector<double> dists;
  dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      dists.push_back(std::sqrt(squared_distance(pooled[i], pooled[j])));
    }
  }
  if (dists.empty()) return 0.0;
  double med = median_of(dists);
  if (med == 0.0) {
    std::erase(dists, 0.0);
    med = dists.empty() ? 0.0 : median_of(dists);
  }
  return med;
}

double mmd2_with_bandwidth(const FeatureSet& x, const FeatureSet& y, double bandwidth) {
  check_dims(x, y);
  require(x.count() >= 1 && y.count() >= 1, ErrorCode::kInvalidDataset,
          "MMD needs non-empty feature sets");
  require(bandwidth >= 0.0 && std::isfinite(bandwidth), ErrorCode::kInvalidArgument,
          "kernel bandwidth must be finite and non-negative");
  if (bandwidth == 0.0) return 0.0;
  const double g2 = bandwidth * bandwidth;
  const double kxx = mean_kernel(x, x, g2);
  const double kyy = mean_kernel(y, y, g2);
  const double kxy = mean_kernel(x, y, g2);
  const double v = kxx + kyy - 2.0 * kxy;
  if (!std::isfinite(v)) fail(ErrorCode::kNumeric, "MMD is not finite");
  return std::max(v, 0.0);
}

double mmd2(const FeatureSet& x, const FeatureSet& y, std::optional<double> bandwidth) {
  check_dims(x, y);
  require(x.count() >= 2 && y.count() >= 2, ErrorCode::kInvalidDataset,
          "MMD needs at least 2 vectors per set");
  const double bw = bandwidth ? *bandwidth : median_bandwidth(x, y);
  return mmd2_with_bandwidth(x, y, bw);
}

}  // namespace tokeval
