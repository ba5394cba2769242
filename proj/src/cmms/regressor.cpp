#include "tokeval/cmms/regressor.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tokeval/error.hpp"
#include "tokeval/parallel.hpp"
#include "tokeval/rng.hpp"

namespace tokeval::cmms {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;
using RowMap = Eigen::Map<RowVec>;
using ConstRowMap = Eigen::Map<const RowVec>;

constexpr double kLayerNormEps = 1e-5;
// Gradient slices summed in a fixed order; independent of the worker count.
constexpr std::size_t kGradSlices = 4;

double gelu(double x) { return x * 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gelu_grad(double x) {
  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void layer_norm(const Mat& x, const double* gain, const double* bias, Mat& xhat,
                Eigen::VectorXd& rstd, Mat& y) {
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd mean = x.rowwise().mean();
  xhat = x.colwise() - mean;
  rstd = (xhat.array().square().rowwise().sum() / static_cast<double>(d) + kLayerNormEps)
             .rsqrt()
             .matrix();
  xhat = rstd.asDiagonal() * xhat;
  y = (xhat.array().rowwise() * ConstRowMap(gain, d).array()).rowwise() +
      ConstRowMap(bias, d).array();
}

// Returns dx; accumulates gain/bias gradients.
Mat layer_norm_backward(const Mat& dy, const Mat& xhat, const Eigen::VectorXd& rstd,
                        const double* gain, double* dgain, double* dbias) {
  const Eigen::Index d = dy.cols();
  RowMap(dgain, d) += (dy.array() * xhat.array()).colwise().sum().matrix();
  RowMap(dbias, d) += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * ConstRowMap(gain, d).array();
  const Eigen::VectorXd mean_dxhat = dxhat.rowwise().mean();
  const Eigen::VectorXd mean_dxhat_xhat = (dxhat.array() * xhat.array()).rowwise().mean();
  Mat dx = dxhat.colwise() - mean_dxhat;
  dx -= (xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
  return rstd.asDiagonal() * dx;
}

}  // namespace

void RegressorConfig::validate() const {
  require(codebook_size >= 2, ErrorCode::kInvalidArgument, "codebook size must be >= 2");
  require(seq_len >= 1, ErrorCode::kInvalidArgument, "sequence length must be >= 1");
  require(embed_dim >= 1 && num_heads >= 1 && num_layers >= 1 && mlp_hidden >= 1,
          ErrorCode::kInvalidArgument, "regressor dimensions must be positive");
  require(embed_dim % num_heads == 0, ErrorCode::kInvalidArgument,
          "embed_dim must be divisible by num_heads");
}

RegressorConfig RegressorConfig::full_scale(std::uint32_t k, std::uint32_t n) {
  RegressorConfig c;
  c.codebook_size = k;
  c.seq_len = n;
  return c;
}

RegressorConfig RegressorConfig::test_scale(std::uint32_t k, std::uint32_t n) {
  RegressorConfig c;
  c.codebook_size = k;
  c.seq_len = n;
  c.embed_dim = 64;
  c.mlp_hidden = 64;
  return c;
}

ParamLayout::ParamLayout(const RegressorConfig& config) {
  config.validate();
  const std::size_t d = config.embed_dim, f = config.ffn_width(), h = config.mlp_hidden;
  std::size_t at = 0;
  auto take = [&](std::size_t n) {
    const std::size_t off = at;
    at += n;
    return off;
  };
  embedding = take(std::size_t{config.codebook_size} * d);
  for (std::uint32_t l = 0; l < config.num_layers; ++l) {
    Layer L{};
    L.ln1_gain = take(d);
    L.ln1_bias = take(d);
    L.wq = take(d * d);
    L.bq = take(d);
    L.wk = take(d * d);
    L.bk = take(d);
    L.wv = take(d * d);
    L.bv = take(d);
    L.wo = take(d * d);
    L.bo = take(d);
    L.ln2_gain = take(d);
    L.ln2_bias = take(d);
    L.w1 = take(d * f);
    L.b1 = take(f);
    L.w2 = take(f * d);
    L.b2 = take(d);
    layers.push_back(L);
  }
  head_w1 = take(d * h);
  head_b1 = take(h);
  head_w2 = take(h);
  head_b2 = take(1);
  total = at;
}

RegressorParams init_params(const RegressorConfig& config) {
  const ParamLayout layout(config);
  RegressorParams p;
  p.config = config;
  p.values.assign(layout.total, 0.0);
  Rng rng(config.seed);
  auto fill = [&](std::size_t off, std::size_t n, double stddev) {
    for (std::size_t i = 0; i < n; ++i) p.values[off + i] = rng.normal(0.0, stddev);
  };
  const std::size_t d = config.embed_dim, f = config.ffn_width(), h = config.mlp_hidden;
  fill(layout.embedding, std::size_t{config.codebook_size} * d, 1.0);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  for (const auto& L : layout.layers) {
    for (std::size_t i = 0; i < d; ++i) {
      p.values[L.ln1_gain + i] = 1.0;
      p.values[L.ln2_gain + i] = 1.0;
    }
    fill(L.wq, d * d, sd);
    fill(L.wk, d * d, sd);
    fill(L.wv, d * d, sd);
    fill(L.wo, d * d, sd);
    fill(L.w1, d * f, sd);
    fill(L.w2, f * d, 1.0 / std::sqrt(static_cast<double>(f)));
  }
  fill(layout.head_w1, d * h, sd);
  fill(layout.head_w2, h, 1.0 / std::sqrt(static_cast<double>(h)));
  return p;
}

struct Regressor::Cache {
  struct Layer {
    Mat x_in, xhat1, a;
    Eigen::VectorXd rstd1;
    Mat q, k, v;
    std::vector<Mat> probs;
    Mat attn;
    Mat x_mid, xhat2, b;
    Eigen::VectorXd rstd2;
    Mat h1, g;
  };
  std::vector<Layer> layers;
  Mat x_out;
  RowVec pooled, z1, a1;
  double out = 0.0;
};

Regressor::Regressor(const RegressorConfig& config) : config_(config), layout_(config) {
  const Eigen::Index n = config.seq_len, d = config.embed_dim;
  positions_.resize(n, d);
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      const double angle = static_cast<double>(pos) * freq;
      positions_(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
}

void Regressor::check_input(const RegressorParams& params, const TokenSequence& seq) const {
  if (!(params.config == config_) || params.values.size() != layout_.total) {
    fail(ErrorCode::kIncompatible, "parameters do not match the regressor configuration");
  }
  if (seq.size() != config_.seq_len) {
    fail(ErrorCode::kLengthMismatch, "sequence length " + std::to_string(seq.size()) +
                                         " != model length " + std::to_string(config_.seq_len));
  }
  for (TokenId id : seq) {
    if (id >= config_.codebook_size) {
      fail(ErrorCode::kTokenOutOfRange, "token id " + std::to_string(id) +
                                            " outside model codebook");
    }
  }
}

double Regressor::run(const double* w, const TokenSequence& seq, Cache* cache) const {
  const Eigen::Index n = config_.seq_len, d = config_.embed_dim;
  const Eigen::Index f = config_.ffn_width(), hid = config_.mlp_hidden;
  const Eigen::Index heads = config_.num_heads, dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Cache local;
  Cache& c = cache ? *cache : local;
  c.layers.resize(config_.num_layers);

  Mat x(n, d);
  const ConstMatMap emb(w + layout_.embedding, config_.codebook_size, d);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = emb.row(seq[i]) + positions_.row(i);

  for (std::uint32_t l = 0; l < config_.num_layers; ++l) {
    const auto& L = layout_.layers[l];
    auto& lc = c.layers[l];
    lc.x_in = x;
    layer_norm(x, w + L.ln1_gain, w + L.ln1_bias, lc.xhat1, lc.rstd1, lc.a);
    lc.q = (lc.a * ConstMatMap(w + L.wq, d, d)).rowwise() + ConstRowMap(w + L.bq, d);
    lc.k = (lc.a * ConstMatMap(w + L.wk, d, d)).rowwise() + ConstRowMap(w + L.bk, d);
    lc.v = (lc.a * ConstMatMap(w + L.wv, d, d)).rowwise() + ConstRowMap(w + L.bv, d);
    lc.probs.resize(heads);
    lc.attn.resize(n, d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      Mat s = (lc.q.middleCols(h * dh, dh) * lc.k.middleCols(h * dh, dh).transpose()) * scale;
      const Eigen::VectorXd row_max = s.rowwise().maxCoeff();
      s = (s.colwise() - row_max).array().exp().matrix();
      const Eigen::VectorXd row_sum = s.rowwise().sum();
      s = row_sum.cwiseInverse().asDiagonal() * s;
      lc.attn.middleCols(h * dh, dh) = s * lc.v.middleCols(h * dh, dh);
      lc.probs[h] = std::move(s);
    }
    x += (lc.attn * ConstMatMap(w + L.wo, d, d)).rowwise() + ConstRowMap(w + L.bo, d);
    lc.x_mid = x;
    layer_norm(x, w + L.ln2_gain, w + L.ln2_bias, lc.xhat2, lc.rstd2, lc.b);
    lc.h1 = (lc.b * ConstMatMap(w + L.w1, d, f)).rowwise() + ConstRowMap(w + L.b1, f);
    lc.g = lc.h1.unaryExpr([](double v) { return gelu(v); });
    x += (lc.g * ConstMatMap(w + L.w2, f, d)).rowwise() + ConstRowMap(w + L.b2, d);
  }
  c.x_out = x;
  c.pooled = x.colwise().mean();
  c.z1 = c.pooled * ConstMatMap(w + layout_.head_w1, d, hid) + ConstRowMap(w + layout_.head_b1, hid);
  c.a1 = c.z1.unaryExpr([](double v) { return gelu(v); });
  const double z2 = c.a1.dot(ConstRowMap(w + layout_.head_w2, hid)) + w[layout_.head_b2];
  c.out = sigmoid(z2);
  if (!std::isfinite(c.out) || !c.x_out.allFinite()) {
    fail(ErrorCode::kNumeric, "non-finite activation in regressor forward pass");
  }
  return c.out;
}

void Regressor::backprop(const double* w, const TokenSequence& seq, const Cache& c, double dout,
                         double* g) const {
  const Eigen::Index n = config_.seq_len, d = config_.embed_dim;
  const Eigen::Index f = config_.ffn_width(), hid = config_.mlp_hidden;
  const Eigen::Index heads = config_.num_heads, dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const double dz2 = dout * c.out * (1.0 - c.out);
  RowMap(g + layout_.head_w2, hid) += dz2 * c.a1;
  g[layout_.head_b2] += dz2;
  const RowVec da1 = dz2 * ConstRowMap(w + layout_.head_w2, hid);
  const RowVec dz1 = da1.array() * c.z1.unaryExpr([](double v) { return gelu_grad(v); }).array();
  MatMap(g + layout_.head_w1, d, hid) += c.pooled.transpose() * dz1;
  RowMap(g + layout_.head_b1, hid) += dz1;
  const RowVec dpooled = dz1 * ConstMatMap(w + layout_.head_w1, d, hid).transpose();

  Mat dx = dpooled.replicate(n, 1) / static_cast<double>(n);

  for (std::uint32_t li = config_.num_layers; li-- > 0;) {
    const auto& L = layout_.layers[li];
    const auto& lc = c.layers[li];

    // feed-forward block
    MatMap(g + L.w2, f, d) += lc.g.transpose() * dx;
    RowMap(g + L.b2, d) += dx.colwise().sum();
    const Mat dg = dx * ConstMatMap(w + L.w2, f, d).transpose();
    const Mat dh1 = dg.array() * lc.h1.unaryExpr([](double v) { return gelu_grad(v); }).array();
    MatMap(g + L.w1, d, f) += lc.b.transpose() * dh1;
    RowMap(g + L.b1, f) += dh1.colwise().sum();
    const Mat db = dh1 * ConstMatMap(w + L.w1, d, f).transpose();
    dx += layer_norm_backward(db, lc.xhat2, lc.rstd2, w + L.ln2_gain, g + L.ln2_gain,
                              g + L.ln2_bias);

    // attention block
    MatMap(g + L.wo, d, d) += lc.attn.transpose() * dx;
    RowMap(g + L.bo, d) += dx.colwise().sum();
    const Mat dattn = dx * ConstMatMap(w + L.wo, d, d).transpose();
    Mat dq(n, d), dk(n, d), dv(n, d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Mat& p = lc.probs[h];
      const auto doh = dattn.middleCols(h * dh, dh);
      const Mat dp = doh * lc.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = p.transpose() * doh;
      const Eigen::VectorXd inner = (dp.array() * p.array()).rowwise().sum();
      const Mat ds = (p.array() * (dp.colwise() - inner).array()).matrix() * scale;
      dq.middleCols(h * dh, dh) = ds * lc.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) = ds.transpose() * lc.q.middleCols(h * dh, dh);
    }
    MatMap(g + L.wq, d, d) += lc.a.transpose() * dq;
    RowMap(g + L.bq, d) += dq.colwise().sum();
    MatMap(g + L.wk, d, d) += lc.a.transpose() * dk;
    RowMap(g + L.bk, d) += dk.colwise().sum();
    MatMap(g + L.wv, d, d) += lc.a.transpose() * dv;
    RowMap(g + L.bv, d) += dv.colwise().sum();
    const Mat da = dq * ConstMatMap(w + L.wq, d, d).transpose() +
                   dk * ConstMatMap(w + L.wk, d, d).transpose() +
                   dv * ConstMatMap(w + L.wv, d, d).transpose();
    dx += layer_norm_backward(da, lc.xhat1, lc.rstd1, w + L.ln1_gain, g + L.ln1_gain,
                              g + L.ln1_bias);
  }

  MatMap gemb(g + layout_.embedding, config_.codebook_size, d);
  for (Eigen::Index i = 0; i < n; ++i) gemb.row(seq[i]) += dx.row(i);
}

double Regressor::forward(const RegressorParams& params, const TokenSequence& seq) const {
  check_input(params, seq);
  return run(params.values.data(), seq, nullptr);
}

double Regressor::loss(const RegressorParams& params,
                       std::span<const TrainingExample> batch) const {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  double sum = 0.0;
  for (const auto& ex : batch) {
    const double e = forward(params, ex.tokens) - ex.target;
    sum += e * e;
  }
  return sum / static_cast<double>(batch.size());
}

double Regressor::loss_and_grad(const RegressorParams& params,
                                std::span<const TrainingExample> batch,
                                std::vector<double>& grad, unsigned threads) const {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  for (const auto& ex : batch) check_input(params, ex.tokens);
  const std::size_t slices = std::min(kGradSlices, batch.size());
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  std::vector<std::vector<double>> slice_grad(slices);
  std::vector<double> slice_loss(slices, 0.0);
  parallel_for(slices, threads, [&](std::size_t s) {
    auto& sg = slice_grad[s];
    sg.assign(layout_.total, 0.0);
    Cache cache;
    const std::size_t begin = batch.size() * s / slices, end = batch.size() * (s + 1) / slices;
    for (std::size_t i = begin; i < end; ++i) {
      const double out = run(params.values.data(), batch[i].tokens, &cache);
      const double err = out - batch[i].target;
      slice_loss[s] += err * err;
      backprop(params.values.data(), batch[i].tokens, cache, 2.0 * err * inv_b, sg.data());
    }
  });

  grad = std::move(slice_grad[0]);
  double loss = slice_loss[0];
  for (std::size_t s = 1; s < slices; ++s) {
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += slice_grad[s][i];
    loss += slice_loss[s];
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) fail(ErrorCode::kNumeric, "non-finite loss");
  return loss;
}

double forward(const RegressorParams& params, const TokenSequence& seq) {
  return Regressor(params.config).forward(params, seq);
}

double loss_and_grad(const RegressorParams& params, std::span<const TrainingExample> batch,
                     std::vector<double>& grad) {
  return Regressor(params.config).loss_and_grad(params, batch, grad);
}

}  // namespace tokeval::cmms
