#include "tokeval/cmms/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tokeval/cmms/corruption.hpp"
#include "tokeval/error.hpp"
#include "tokeval/parallel.hpp"
#include "tokeval/rng.hpp"

namespace tokeval::cmms {
namespace {

constexpr std::uint64_t kMonitorStream = 0x6d6f6e;
constexpr std::uint64_t kShuffleStream = 0x73687566;
constexpr std::uint64_t kStepStream = 0x73746570;

void check_dataset(const TokenDataset& dataset, const RegressorConfig& config) {
  require(!dataset.empty(), ErrorCode::kInvalidDataset, "empty token dataset");
  if (dataset.codebook.size != config.codebook_size || dataset.seq_len != config.seq_len) {
    fail(ErrorCode::kIncompatible,
         "dataset (K=" + std::to_string(dataset.codebook.size) +
             ", N=" + std::to_string(dataset.seq_len) + ") does not match model (K=" +
             std::to_string(config.codebook_size) + ", N=" + std::to_string(config.seq_len) + ")");
  }
}

std::vector<double> monitor_outputs(const Regressor& model, const RegressorParams& params,
                                    std::span<const TrainingExample> set, unsigned threads) {
  std::vector<double> out(set.size());
  parallel_for(set.size(), threads,
               [&](std::size_t i) { out[i] = model.forward(params, set[i].tokens); });
  return out;
}

double monitor_loss(const Regressor& model, const RegressorParams& params,
                    std::span<const TrainingExample> set, unsigned threads) {
  const auto out = monitor_outputs(model, params, set, threads);
  double sum = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double e = out[i] - set[i].target;
    sum += e * e;
  }
  const double loss = sum / static_cast<double>(set.size());
  if (!std::isfinite(loss)) fail(ErrorCode::kNumeric, "non-finite monitor loss");
  return loss;
}

}  // namespace

void TrainConfig::validate() const {
  require(learning_rate > 0 && weight_decay >= 0 && batch_size > 0 && epochs > 0 &&
              beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1 && epsilon > 0,
          ErrorCode::kInvalidArgument, "invalid training configuration");
  require(monitor_size > 0, ErrorCode::kInvalidArgument, "monitor set must be non-empty");
}

TrainConfig TrainConfig::test_scale() {
  TrainConfig c;
  c.batch_size = 32;
  c.epochs = 10;
  return c;
}

TrainingExample sample_training_example(const TokenDataset& dataset, std::size_t index,
                                        std::span<const double> severities, std::uint64_t seed) {
  const GridLayout layout = dataset.layout.value_or(GridLayout{1, dataset.seq_len});
  Rng rng(seed);
  CorruptionSpec spec;
  spec.seed = rng.next_u64();
  spec.p_uniform = rng.uniform(0.0, kMaxSeverity);
  const TokenSequence* partner = nullptr;
  if (rng.bernoulli(kSwapProbability)) {
    const double fraction = rng.uniform(0.0, kMaxSwapFraction);
    if (std::round(fraction * static_cast<double>(layout.cells())) > 0) {
      spec.swap_fraction = fraction;
    }
    if (rng.bernoulli(kPartnerProbability) && dataset.size() > 1) {
      std::size_t other = rng.below(dataset.size() - 1);
      if (other >= index) ++other;
      partner = &dataset.sequences[other];
    }
  }
  auto sample = corrupt_sample(dataset.sequences[index], spec, dataset.codebook.size, layout,
                               partner);
  if (!severities.empty()) {
    sample.p_eff = effective_severity(spec.p_uniform, spec.swap_fraction, severities[index]);
    sample.target = quality_target(sample.p_eff);
  }
  return {std::move(sample.tokens), sample.target};
}

TrainResult train(const TokenDataset& dataset, const TrainConfig& tcfg,
                  const RegressorConfig& rcfg, const TrainOptions& options) {
  tcfg.validate();
  check_dataset(dataset, rcfg);
  if (!options.severities.empty()) {
    require(options.severities.size() == dataset.size(), ErrorCode::kLengthMismatch,
            "severity count does not match dataset size");
    for (double s : options.severities) {
      if (!(s >= 0.0 && s <= kMaxSeverity)) {
        fail(ErrorCode::kOutOfRange, "pixel severity outside [0, 0.3]");
      }
    }
  }

  const Regressor model(rcfg);
  TrainResult result;
  result.params = init_params(rcfg);
  auto& w = result.params.values;

  std::vector<TrainingExample> monitor(tcfg.monitor_size);
  {
    const std::uint64_t mseed = derive_seed(tcfg.seed, kMonitorStream);
    Rng pick(mseed);
    for (std::size_t i = 0; i < monitor.size(); ++i) {
      const std::size_t idx = pick.below(dataset.size());
      monitor[i] = sample_training_example(dataset, idx, options.severities,
                                           derive_seed(mseed, i + 1));
    }
  }
  result.history.initial_loss = monitor_loss(model, result.params, monitor, options.threads);

  std::vector<double> m(w.size(), 0.0), v(w.size(), 0.0), grad;
  std::vector<std::size_t> order(dataset.size());
  std::vector<TrainingExample> batch;
  std::uint64_t step = 0;
  for (std::uint32_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(derive_seed(derive_seed(tcfg.seed, kShuffleStream), epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += tcfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + tcfg.batch_size);
      const std::uint64_t step_seed = derive_seed(derive_seed(tcfg.seed, kStepStream), step);
      batch.resize(end - begin);
      parallel_for(batch.size(), options.threads, [&](std::size_t i) {
        batch[i] = sample_training_example(dataset, order[begin + i], options.severities,
                                           derive_seed(step_seed, i));
      });
      model.loss_and_grad(result.params, batch, grad, options.threads);

      ++step;
      const double bc1 = 1.0 - std::pow(tcfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(tcfg.beta2, static_cast<double>(step));
      for (std::size_t j = 0; j < w.size(); ++j) {
        m[j] = tcfg.beta1 * m[j] + (1.0 - tcfg.beta1) * grad[j];
        v[j] = tcfg.beta2 * v[j] + (1.0 - tcfg.beta2) * grad[j] * grad[j];
        w[j] -= tcfg.learning_rate * tcfg.weight_decay * w[j];
        w[j] -= tcfg.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + tcfg.epsilon);
      }
    }
    const double loss = monitor_loss(model, result.params, monitor, options.threads);
    result.history.epoch_loss.push_back(loss);
    if (options.on_epoch) options.on_epoch(epoch, loss);
  }
  return result;
}

std::vector<double> score_dataset(const RegressorParams& params, const TokenDataset& dataset,
                                  unsigned threads) {
  check_dataset(dataset, params.config);
  const Regressor model(params.config);
  std::vector<double> out(dataset.size());
  parallel_for(dataset.size(), threads,
               [&](std::size_t i) { out[i] = model.forward(params, dataset.sequences[i]); });
  return out;
}

}  // namespace tokeval::cmms
