#pragma once

#include "tokeval/histograms.hpp"

namespace tokeval {

/// Shannon entropy of the unigram histogram, in nats.
double token_entropy(const TokenDataset& dataset);
double entropy(std::span<const double> probs);

/// Mutual information between a token and its neighbour at each displacement,
/// I = H(U) + H(V) - H(U,V) from the directed pair joint (marginals from the
/// same joint), averaged over the displacement set. Nats.
double adjacent_mi(const TokenDataset& dataset, const DisplacementSet& disp);

}  // namespace tokeval
