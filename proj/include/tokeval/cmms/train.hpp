#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tokeval/cmms/regressor.hpp"
#include "tokeval/token_io.hpp"

namespace tokeval::cmms {

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.01;
  std::uint32_t batch_size = 512;
  std::uint32_t epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Fixed corrupted samples used to report the loss before and after each epoch.
  std::uint32_t monitor_size = 256;

  void validate() const;

  static TrainConfig test_scale();
};

/// Severity sampling used to build training pairs.
inline constexpr double kSwapProbability = 0.3;
inline constexpr double kMaxSwapFraction = 0.15;
inline constexpr double kPartnerProbability = 0.5;

struct TrainHistory {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;
};

struct TrainResult {
  RegressorParams params;
  TrainHistory history;
};

struct TrainOptions {
  unsigned threads = 1;
  /// Optional per-sequence pixel severity of a pre-degraded corpus.
  std::span<const double> severities;
  /// Called after each epoch with (epoch index, monitor loss).
  std::function<void(std::uint32_t, double)> on_epoch;
};

/// Draws a corrupted copy of dataset sequence `index` and its target.
TrainingExample sample_training_example(const TokenDataset& dataset, std::size_t index,
                                        std::span<const double> severities, std::uint64_t seed);

/// AdamW on MSE against exp(-20 p_eff). Deterministic for a fixed seed and
/// independent of the thread count.
TrainResult train(const TokenDataset& dataset, const TrainConfig& tcfg,
                  const RegressorConfig& rcfg, const TrainOptions& options = {});

/// One score per sequence, in dataset order.
std::vector<double> score_dataset(const RegressorParams& params, const TokenDataset& dataset,
                                  unsigned threads = 1);

}  // namespace tokeval::cmms
