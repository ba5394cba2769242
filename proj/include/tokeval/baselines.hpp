#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tokeval/token_io.hpp"

namespace tokeval {

struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Sample mean and unbiased (1/(n-1)) covariance, symmetrised.
GaussianFit fit_gaussian(const FeatureSet& features);

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
///
/// The trace of the cross term is taken from the symmetric product
/// A^{1/2} S_b A^{1/2}, which has the same eigenvalues as S_a S_b; its
/// eigenvalues are clamped at zero before the square root. Round-off can push
/// the total a hair below zero, in which case 0 is returned.
double frechet_distance(const GaussianFit& a, const GaussianFit& b);

/// Median of the pairwise Euclidean distances over the pooled sets. Falls back
/// to the median of the non-zero distances when more than half are zero; 0
/// when every point coincides.
double median_bandwidth(const FeatureSet& x, const FeatureSet& y);

/// Biased (V-statistic) squared MMD with k(a,b) = exp(-|a-b|^2 / (2 bw^2)).
/// Needs at least one vector per set; returns 0 for bw == 0.
double mmd2_with_bandwidth(const FeatureSet& x, const FeatureSet& y, double bandwidth);

/// Squared MMD; bandwidth defaults to the median heuristic. Each set needs at
/// least two vectors.
double mmd2(const FeatureSet& x, const FeatureSet& y,
            std::optional<double> bandwidth = std::nullopt);

}  // namespace tokeval
