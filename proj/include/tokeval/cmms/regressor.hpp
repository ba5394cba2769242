#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "tokeval/token_io.hpp"

namespace tokeval::cmms {

struct RegressorConfig {
  std::uint32_t codebook_size = 4096;  // K
  std::uint32_t seq_len = 128;         // N
  std::uint32_t embed_dim = 512;
  std::uint32_t num_layers = 2;
  std::uint32_t num_heads = 8;
  std::uint32_t mlp_hidden = 512;
  std::uint32_t ffn_hidden = 0;  // 0 selects 4 * embed_dim
  std::uint64_t seed = 0;

  std::uint32_t ffn_width() const { return ffn_hidden ? ffn_hidden : 4 * embed_dim; }
  void validate() const;

  static RegressorConfig full_scale(std::uint32_t k, std::uint32_t n);
  /// d = 64, 8 heads, 2 layers, 64-wide head.
  static RegressorConfig test_scale(std::uint32_t k, std::uint32_t n);

  bool operator==(const RegressorConfig&) const = default;
};

/// Offsets of every tensor inside the flat parameter vector. Order:
///   token embedding [K x d]
///   per layer: ln1 gain [d], ln1 bias [d], Wq [d x d], bq [d], Wk, bk, Wv, bv,
///              Wo, bo, ln2 gain [d], ln2 bias [d], W1 [d x F], b1 [F],
///              W2 [F x d], b2 [d]
///   head: W1 [d x H], b1 [H], W2 [H x 1], b2 [1]
/// Matrices are row-major and applied as x * W.
struct ParamLayout {
  struct Layer {
    std::size_t ln1_gain, ln1_bias, wq, bq, wk, bk, wv, bv, wo, bo;
    std::size_t ln2_gain, ln2_bias, w1, b1, w2, b2;
  };
  std::size_t embedding = 0;
  std::vector<Layer> layers;
  std::size_t head_w1 = 0, head_b1 = 0, head_w2 = 0, head_b2 = 0;
  std::size_t total = 0;

  explicit ParamLayout(const RegressorConfig& config);
};

struct RegressorParams {
  RegressorConfig config;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const RegressorParams&) const = default;
};

/// Seeded initialisation: unit-variance embeddings, N(0, 1/fan_in) weights,
/// zero biases, unit layer-norm gains.
RegressorParams init_params(const RegressorConfig& config);

struct TrainingExample {
  TokenSequence tokens;
  double target = 0.0;
};

/// Transformer encoder regressor: token embedding plus sinusoidal positions,
/// pre-norm self-attention and feed-forward blocks (x * Phi(x) activation),
/// mean pooling, a two-layer head and a logistic output.
class Regressor {
 public:
  explicit Regressor(const RegressorConfig& config);

  const RegressorConfig& config() const { return config_; }
  const ParamLayout& layout() const { return layout_; }

  /// Score in [0, 1].
  double forward(const RegressorParams& params, const TokenSequence& seq) const;

  /// Mean squared error over the batch and its exact gradient (same layout as
  /// params.values). Gradient accumulation runs on a fixed number of batch
  /// slices that are summed in order, so results do not depend on `threads`.
  double loss_and_grad(const RegressorParams& params, std::span<const TrainingExample> batch,
                       std::vector<double>& grad, unsigned threads = 1) const;

  double loss(const RegressorParams& params, std::span<const TrainingExample> batch) const;

 private:
  struct Cache;
  double run(const double* params, const TokenSequence& seq, Cache* cache) const;
  void backprop(const double* params, const TokenSequence& seq, const Cache& cache,
                double dout, double* grad) const;
  void check_input(const RegressorParams& params, const TokenSequence& seq) const;

  RegressorConfig config_;
  ParamLayout layout_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> positions_;
};

double forward(const RegressorParams& params, const TokenSequence& seq);
double loss_and_grad(const RegressorParams& params, std::span<const TrainingExample> batch,
                     std::vector<double>& grad);

}  // namespace tokeval::cmms
