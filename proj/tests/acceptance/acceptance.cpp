// End-to-end acceptance checks. Each criterion prints a single PASS or FAIL
// line; `--only NAME` runs one of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "tokeval/baselines.hpp"
#include "tokeval/cmms/corruption.hpp"
#include "tokeval/cmms/regressor.hpp"
#include "tokeval/cmms/train.hpp"
#include "tokeval/degrade.hpp"
#include "tokeval/diagnostics.hpp"
#include "tokeval/distances.hpp"
#include "tokeval/error.hpp"
#include "tokeval/eval.hpp"
#include "tokeval/histograms.hpp"
#include "tokeval/parallel.hpp"
#include "tokeval/rng.hpp"
#include "tokeval/synth.hpp"
#include "tokeval/token_io.hpp"
#include "tokeval/toy_tokenizer.hpp"

namespace fs = std::filesystem;
using namespace tokeval;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_ < 8) detail_ += (detail_.empty() ? "" : "; ") + what;
    failures_ += !ok;
  }
  void note(const std::string& what) { notes_ += (notes_.empty() ? "" : " ") + what; }
  Outcome done() const {
    if (failures_ == 0) return {true, notes_};
    return {false, std::to_string(failures_) + " failed: " + detail_ + (notes_.empty() ? "" : " | " + notes_)};
  }

 private:
  int failures_ = 0;
  std::string detail_;
  std::string notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------

Outcome hellinger_closed_forms() {
  Report r;
  const std::vector<double> p{1, 0}, q{0.5, 0.5};
  const double want = std::sqrt(1 - std::sqrt(0.5));
  const double got = hellinger(p, q);
  r.expect(close(got, want, 1e-12), "H([1,0],[.5,.5]) = " + fmt(got));
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng.below(20));
    double s = 0;
    for (auto& x : v) s += x = rng.uniform();
    for (auto& x : v) x /= s;
    r.expect(close(hellinger(v, v), 0.0, 1e-12), "identical inputs not 0");
    std::vector<double> a(2 * v.size(), 0.0), b(2 * v.size(), 0.0);
    std::copy(v.begin(), v.end(), a.begin());
    std::copy(v.begin(), v.end(), b.begin() + static_cast<std::ptrdiff_t>(v.size()));
    r.expect(close(hellinger(a, b), 1.0, 1e-12), "disjoint supports not 1");
  }
  return r.done();
}

Outcome oracle_equivalence() {
  Report r;
  double worst = 0;
  auto check = [&](double got, double want, const std::string& what) {
    worst = std::max(worst, std::abs(got - want));
    r.expect(close(got, want, 1e-12), what + " " + fmt(got) + " vs " + fmt(want));
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 1000 + 7);
    const auto k = static_cast<std::uint32_t>(2 + rng.below(15));
    const auto rows = static_cast<std::uint32_t>(1 + rng.below(8));
    const auto cols = static_cast<std::uint32_t>(3 + rng.below(6));
    const auto ds = oracle::random_dataset(seed, k, rows, cols, 1 + rng.below(30));
    std::vector<Displacement> pool{{1, 0}, {0, 1}, {1, 1}, {-1, 1}, {2, 0}};
    std::vector<Displacement> chosen;
    for (const auto& d : pool) {
      if (rng.bernoulli(0.5)) chosen.push_back(d);
    }
    if (chosen.empty()) chosen.push_back(pool[rng.below(pool.size())]);
    if (rows == 1) chosen = {{1, 0}};
    const DisplacementSet disp(chosen);
    const std::string tag = "seed " + std::to_string(seed);

    const auto uni = unigram(ds, 1 + seed % 3).probs();
    const auto uni_want = oracle::unigram(ds);
    for (std::uint32_t v = 0; v < k; ++v) check(uni[v], uni_want[v], tag + " unigram");

    const auto want_pairs = oracle::cooccurrence(ds, disp);
    const auto got_pairs = cooccurrence(ds, disp, 1 + seed % 2).distribution();
    r.expect(got_pairs.size() == want_pairs.size(), tag + " pair support size");
    for (const auto& pp : got_pairs) {
      const auto it = want_pairs.find({pp.u, pp.v});
      r.expect(it != want_pairs.end(), tag + " unexpected pair");
      if (it != want_pairs.end()) check(pp.prob, it->second, tag + " cooccurrence");
    }

    check(adjacent_mi(ds, disp), oracle::mutual_information(ds, disp), tag + " adjacent_mi");

    const std::size_t dim = 1 + rng.below(6);
    const auto x = oracle::random_vectors(rng, 2 + rng.below(20), dim);
    auto y = oracle::random_vectors(rng, 2 + rng.below(20), dim);
    for (auto& row : y) row[0] += 0.5;
    const double bw = 0.3 + 2 * rng.uniform();
    check(mmd2(oracle::to_features(x), oracle::to_features(y), bw), oracle::mmd2(x, y, bw),
          tag + " mmd2");
  }
  r.note("max_abs_err=" + fmt(worst));
  return r.done();
}

Outcome frechet_correctness() {
  Report r;
  Rng rng(3);
  double worst = 0;
  auto fit1 = [](double mu, double sigma) {
    GaussianFit f;
    f.mean = Eigen::VectorXd::Constant(1, mu);
    f.cov = Eigen::MatrixXd::Constant(1, 1, sigma * sigma);
    return f;
  };
  for (int t = 0; t < 100; ++t) {
    const double m1 = rng.uniform(-10, 10), m2 = rng.uniform(-10, 10);
    const double s1 = rng.uniform(0.01, 5), s2 = rng.uniform(0.01, 5);
    const auto a = fit1(m1, s1), b = fit1(m2, s2);
    const double want = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
    const double ab = frechet_distance(a, b), ba = frechet_distance(b, a);
    worst = std::max(worst, std::abs(ab - want));
    r.expect(close(ab, want, 1e-9), "1-D closed form " + fmt(ab) + " vs " + fmt(want));
    r.expect(close(ab, ba, 1e-9), "asymmetric");
    r.expect(close(frechet_distance(a, a), 0.0, 1e-9), "1-D self distance");
  }
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_vectors(rng, 60, 1 + rng.below(8));
    const auto y = oracle::random_vectors(rng, 60, x[0].size());
    const auto fx = fit_gaussian(oracle::to_features(x)), fy = fit_gaussian(oracle::to_features(y));
    r.expect(close(frechet_distance(fx, fx), 0.0, 1e-9), "d-dim self distance");
    r.expect(close(frechet_distance(fx, fy), frechet_distance(fy, fx), 1e-9), "d-dim asymmetric");
  }
  r.note("max_abs_err=" + fmt(worst));
  return r.done();
}

constexpr int kImageWidth = 64;
constexpr int kImageHeight = 32;
constexpr GridLayout kGrid{8, 16};

TokenDataset tokenize_all(const std::vector<Image>& images, const PaletteCodebook& palette) {
  TokenDataset ds;
  ds.codebook = palette.codebook();
  ds.seq_len = static_cast<std::uint32_t>(kGrid.cells());
  ds.layout = kGrid;
  ds.sequences.resize(images.size());
  parallel_for(images.size(), workers(),
               [&](std::size_t i) { ds.sequences[i] = tokenize(images[i], kGrid, palette); });
  return ds;
}

Outcome degradation_monotonicity() {
  Report r;
  const auto palette = build_palette(4096);
  const auto images = synthetic_images(1000, kImageWidth, kImageHeight, 2024);
  const auto clean = tokenize_all(images, palette);
  const auto disp = DisplacementSet::right_down();

  auto level_curve = [&](const std::vector<double>& levels,
                         const std::function<TokenDataset(double, std::size_t)>& make) {
    std::vector<double> scores;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      scores.push_back(chd(clean, make(levels[l], l), disp, DistanceKind::kHellinger, workers()).chd);
    }
    return scores;
  };
  auto pixel = [&](DegradeKind kind) {
    return [&, kind](double level, std::size_t l) {
      std::vector<Image> out(images.size());
      parallel_for(images.size(), workers(), [&](std::size_t i) {
        DegradeSpec spec;
        spec.kind = kind;
        spec.parameter = level;
        spec.seed = derive_seed(l, i);
        out[i] = apply_degradation(images[i], spec);
      });
      return tokenize_all(out, palette);
    };
  };

  struct Family {
    std::string name;
    std::vector<double> levels;
    std::function<TokenDataset(double, std::size_t)> make;
  };
  std::vector<Family> families;
  families.push_back({"p", linspace(0.03, 0.30, 10), [&](double p, std::size_t l) {
                        auto ds = clean.empty_like();
                        ds.sequences.resize(clean.size());
                        for (std::size_t i = 0; i < clean.size(); ++i) {
                          ds.sequences[i] = cmms::corrupt_tokens(clean.sequences[i], p, 4096,
                                                                 derive_seed(l, i));
                        }
                        return ds;
                      }});
  families.push_back({"blur", linspace(0.5, 3.0, 10), pixel(DegradeKind::kGaussianBlur)});
  families.push_back({"noise", linspace(0.01, 0.10, 10), pixel(DegradeKind::kGaussianNoise)});
  families.push_back({"occlusion", linspace(0.10, 0.40, 10), pixel(DegradeKind::kOcclusion)});

  for (const auto& f : families) {
    const auto scores = level_curve(f.levels, f.make);
    const double rho = spearman(scores, f.levels);
    r.expect(rho >= 0.95, f.name + " rho=" + fmt(rho));
    r.note(f.name + "_rho=" + fmt(rho));
  }
  return r.done();
}

Outcome diagnostics_direction() {
  Report r;
  StructuredTokenParams sp;
  const auto base = structured_tokens(1000, 1024, kGrid, 77, sp);
  const auto levels = linspace(0.0, 0.3, 10);
  const auto disp = DisplacementSet::right_down();
  std::vector<double> ent, mi;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    auto ds = base.empty_like();
    for (std::size_t i = 0; i < base.size(); ++i) {
      ds.sequences.push_back(
          cmms::corrupt_tokens(base.sequences[i], levels[l], 1024, derive_seed(500 + l, i)));
    }
    ent.push_back(token_entropy(ds));
    mi.push_back(adjacent_mi(ds, disp));
  }
  for (std::size_t l = 1; l < levels.size(); ++l) {
    r.expect(ent[l] > ent[l - 1], "entropy not increasing at level " + std::to_string(l));
    r.expect(mi[l] < mi[l - 1], "MI not decreasing at level " + std::to_string(l));
  }
  const double rho_e = spearman(ent, levels), rho_m = spearman(mi, levels);
  r.expect(std::abs(rho_e) >= 0.95 && rho_e > 0, "entropy rho=" + fmt(rho_e));
  r.expect(std::abs(rho_m) >= 0.95 && rho_m < 0, "MI rho=" + fmt(rho_m));
  r.note("entropy_rho=" + fmt(rho_e) + " mi_rho=" + fmt(rho_m));
  return r.done();
}

Outcome cmms_gradient_check() {
  Report r;
  double worst_all = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cmms::RegressorConfig cfg;
    cfg.codebook_size = 7;
    cfg.seq_len = 4;
    cfg.embed_dim = 8;
    cfg.num_heads = 2;
    cfg.mlp_hidden = 8;
    cfg.seed = seed;
    auto params = cmms::init_params(cfg);
    Rng rng(seed + 100);
    std::vector<cmms::TrainingExample> batch(4);
    for (auto& ex : batch) {
      ex.tokens.resize(cfg.seq_len);
      for (auto& t : ex.tokens) t = static_cast<TokenId>(rng.below(cfg.codebook_size));
      ex.target = rng.uniform();
    }
    const cmms::Regressor model(cfg);
    std::vector<double> grad;
    model.loss_and_grad(params, batch, grad);
    double worst = 0;
    for (std::size_t i = 0; i < params.values.size(); ++i) {
      const double keep = params.values[i];
      params.values[i] = keep + 1e-4;
      const double up = model.loss(params, batch);
      params.values[i] = keep - 1e-4;
      const double down = model.loss(params, batch);
      params.values[i] = keep;
      const double fd = (up - down) / 2e-4;
      worst = std::max(worst, std::abs(fd - grad[i]) /
                                  std::max({std::abs(fd), std::abs(grad[i]), 1e-6}));
    }
    r.expect(worst <= 1e-4, "seed " + std::to_string(seed) + " rel err " + fmt(worst));
    worst_all = std::max(worst_all, worst);
  }
  r.note("max_rel_err=" + fmt(worst_all));
  return r.done();
}

Outcome cmms_learning() {
  Report r;
  r.expect(cmms::quality_target(0.0) == 1.0, "q(0) != 1");
  r.expect(cmms::quality_target(0.3) == std::exp(-6.0), "q(0.3) != e^-6");

  constexpr std::uint32_t k = 256;
  const GridLayout grid{8, 8};
  StructuredTokenParams sp;
  sp.skew = 6.0;
  sp.jitter = 0.05;
  const auto train_set = structured_tokens(2000, k, grid, 11, sp);
  const auto held = structured_tokens(200, k, grid, 12, sp);

  auto rcfg = cmms::RegressorConfig::test_scale(k, static_cast<std::uint32_t>(grid.cells()));
  rcfg.seed = 5;
  auto tcfg = cmms::TrainConfig::test_scale();
  tcfg.seed = 6;
  cmms::TrainOptions opt;
  opt.threads = workers();
  const auto result = cmms::train(train_set, tcfg, rcfg, opt);
  const double initial = result.history.initial_loss;
  const double final_loss = result.history.epoch_loss.back();
  r.expect(final_loss <= 0.5 * initial,
           "loss " + fmt(final_loss) + " > half of initial " + fmt(initial));

  const auto levels = linspace(0.0, 0.3, 10);
  std::vector<double> level_mean, all_scores, all_levels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    auto ds = held.empty_like();
    for (std::size_t i = 0; i < held.size(); ++i) {
      ds.sequences.push_back(
          cmms::corrupt_tokens(held.sequences[i], levels[l], k, derive_seed(900 + l, i)));
    }
    const auto scores = cmms::score_dataset(result.params, ds, workers());
    level_mean.push_back(std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size());
    all_scores.insert(all_scores.end(), scores.begin(), scores.end());
    all_levels.insert(all_levels.end(), scores.size(), levels[l]);
  }
  const double rho = spearman(level_mean, levels);
  r.expect(rho <= -0.9, "held-out level rho=" + fmt(rho));
  r.note("level_rho=" + fmt(rho) + " per_sequence_rho=" + fmt(spearman(all_scores, all_levels)) +
         " loss=" + fmt(initial) + "->" + fmt(final_loss));
  return r.done();
}

Outcome sweep_stability() {
  Report r;
  const auto real = iid_tokens(5000, 64, kGrid, 1.0, 31);
  const auto gen = iid_tokens(5000, 64, kGrid, 1.3, 32);
  SweepOptions opt;
  opt.sizes = {100, 1000};
  opt.repeats = 20;
  opt.seed = 8;
  opt.threads = workers();
  const auto res = sample_sweep(real, gen, opt);
  const double cv100 = res.stddevs[0] / res.means[0];
  const double cv1000 = res.stddevs[1] / res.means[1];
  r.expect(cv1000 <= 0.5 * cv100, "cv1000=" + fmt(cv1000) + " cv100=" + fmt(cv100));
  r.note("cv100=" + fmt(cv100) + " cv1000=" + fmt(cv1000));
  return r.done();
}

// --- CLI determinism ------------------------------------------------------

int run_cli(const std::vector<std::string>& args, const fs::path& log) {
  std::string cmd = "'" TOKEVAL_CLI_PATH "' --quiet";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >'" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_determinism() {
  Report r;
  const fs::path dir = fs::current_path() / "acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  {
    Rng rng(5);
    save_features(p("real.chfv"), oracle::to_features(oracle::random_vectors(rng, 80, 6)));
    save_features(p("gen.chfv"), oracle::to_features(oracle::random_vectors(rng, 70, 6)));
    std::ofstream(p("metric.txt")) << "a 0.1\nb 0.5\nc 0.3\nd 0.9\ne 0.2\n";
    std::ofstream(p("human.txt")) << "a 1\nb 4\nc 2\nd 5\ne 2\n";
  }

  struct Step {
    std::string name;
    std::vector<std::string> args;
    bool redirect_out;
  };
  // Later steps consume earlier outputs.
  const std::vector<Step> steps{
      {"synth_images", {"synth", "images", "--out", p("img"), "--count", "24"}, true},
      {"synth_tokens", {"synth", "tokens", "--out", p("real.chtk"), "--count", "400",
                        "--codebook", "64", "--grid", "4x8"}, true},
      {"synth_tokens_text", {"synth", "tokens", "--out", p("gen.txt"), "--count", "300",
                             "--codebook", "64", "--grid", "4x8", "--skew", "2", "--text"}, true},
      {"tokenize", {"tokenize", "--in", p("img"), "--out", p("img.chtk"), "--grid", "8x16",
                    "--codebook", "4096"}, true},
      {"degrade", {"degrade", "--in", p("img"), "--out", p("noisy"), "--kind", "noise",
                   "--param", "0.05"}, true},
      {"corrupt", {"corrupt", "--in", p("real.chtk"), "--out", p("corrupt.chtk"), "--p", "0.1",
                   "--swap", "0.1"}, true},
      {"chd", {"chd", "--real", p("real.chtk"), "--gen", p("gen.txt")}, false},
      {"tokenstats", {"tokenstats", "--in", p("corrupt.chtk")}, false},
      {"baseline_frechet", {"baseline", "frechet", "--real", p("real.chfv"), "--gen",
                            p("gen.chfv")}, false},
      {"baseline_mmd", {"baseline", "mmd", "--real", p("real.chfv"), "--gen", p("gen.chfv")},
       false},
      {"cmms_train", {"cmms", "train", "--tokens", p("real.chtk"), "--out", p("model.chmm"),
                      "--epochs", "1", "--batch", "32"}, true},
      {"cmms_score", {"cmms", "score", "--model", p("model.chmm"), "--tokens",
                      p("corrupt.chtk"), "--out", p("scores.txt")}, true},
      {"correlate", {"correlate", "--metric", p("metric.txt"), "--human", p("human.txt")}, false},
      {"sweep", {"sweep", "--real", p("real.chtk"), "--gen", p("gen.txt"), "--sizes", "50",
                 "--sizes", "200", "--repeats", "6"}, false},
  };

  for (const auto& s : steps) {
    const std::string manifest = p(s.name + ".manifest.json");
    std::vector<std::string> args{"--seed", "17", "--threads", "2", "--manifest", manifest};
    args.insert(args.end(), s.args.begin(), s.args.end());
    const int rc = run_cli(args, dir / (s.name + ".log"));
    r.expect(rc == 0, s.name + " exited " + std::to_string(rc));
    if (rc != 0) continue;
    for (unsigned t : {1u, 4u}) {
      std::vector<std::string> replay{"replay", "--from", manifest, "--with-threads",
                                      std::to_string(t)};
      if (s.redirect_out) {
        const auto out_it = std::find(s.args.begin(), s.args.end(), "--out");
        const fs::path orig = *(out_it + 1);
        replay.insert(replay.end(), {"--out", (dir / ("replay" + std::to_string(t)) /
                                               orig.filename()).string()});
        fs::create_directories(dir / ("replay" + std::to_string(t)));
      }
      const int rrc = run_cli(replay, dir / (s.name + ".replay" + std::to_string(t) + ".log"));
      r.expect(rrc == 0, s.name + " replay --with-threads " + std::to_string(t) + " exited " +
                             std::to_string(rrc));
    }
  }
  r.note("subcommands=" + std::to_string(steps.size()));
  return r.done();
}

// --- format fuzzing ---------------------------------------------------------

bool dataset_ok(const TokenDataset& ds) {
  try {
    ds.validate();
  } catch (const Error&) {
    return false;
  }
  if (ds.codebook.size == 0) return false;
  if (ds.layout && ds.layout->cells() != ds.seq_len) return false;
  for (const auto& s : ds.sequences) {
    if (s.size() != ds.seq_len) return false;
    for (TokenId t : s) {
      if (t >= ds.codebook.size) return false;
    }
  }
  return true;
}

bool features_ok(const FeatureSet& f) {
  if (f.dim == 0 && !f.values.empty()) return false;
  if (f.dim != 0 && f.values.size() % f.dim != 0) return false;
  return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

std::vector<std::uint8_t> mutate(std::vector<std::uint8_t> bytes, std::size_t header, Rng& rng) {
  switch (rng.below(4)) {
    case 0:  // flip bits in the header
      for (int n = 1 + static_cast<int>(rng.below(4)); n > 0; --n) {
        bytes[rng.below(header)] ^= static_cast<std::uint8_t>(1u << rng.below(8));
      }
      break;
    case 1:  // overwrite header bytes
      for (int n = 1 + static_cast<int>(rng.below(6)); n > 0; --n) {
        bytes[rng.below(header)] = static_cast<std::uint8_t>(rng.below(256));
      }
      break;
    case 2:  // saturate a header byte and truncate
      bytes[rng.below(header)] = 0xFF;
      bytes.resize(rng.below(bytes.size() + 1));
      break;
    default:  // splice trailing garbage
      bytes[rng.below(header)] = static_cast<std::uint8_t>(rng.below(256));
      for (int n = static_cast<int>(rng.below(16)); n > 0; --n) {
        bytes.push_back(static_cast<std::uint8_t>(rng.below(256)));
      }
  }
  return bytes;
}

Outcome format_fuzz() {
  Report r;
  Rng rng(2718);
  const auto tokens = encode_tokens(oracle::random_dataset(1, 16, 2, 3, 4));
  TokenDataset no_layout = oracle::random_dataset(2, 9, 1, 5, 3);
  no_layout.layout.reset();
  const auto tokens_flat = encode_tokens(no_layout);
  std::vector<std::uint8_t> feats;
  {
    std::stringstream buf;
    write_features(oracle::to_features(oracle::random_vectors(rng, 5, 3)), buf);
    const auto s = buf.str();
    feats.assign(s.begin(), s.end());
  }
  constexpr std::size_t kTokenHeader = 29, kFeatureHeader = 17;
  int accepted = 0, rejected = 0;
  for (int t = 0; t < 10000; ++t) {
    const bool feature_case = t % 3 == 2;
    try {
      if (feature_case) {
        const auto bytes = mutate(feats, kFeatureHeader, rng);
        const auto f = read_features(bytes);
        r.expect(features_ok(f), "invalid feature set accepted at case " + std::to_string(t));
      } else {
        const auto bytes = mutate(t % 3 == 0 ? tokens : tokens_flat, kTokenHeader, rng);
        const auto ds = (t % 2 == 0) ? read_tokens(bytes) : [&] {
          std::istringstream in(std::string(bytes.begin(), bytes.end()));
          return read_tokens(in);
        }();
        r.expect(dataset_ok(ds), "invalid dataset accepted at case " + std::to_string(t));
      }
      ++accepted;
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      r.expect(false, "case " + std::to_string(t) + " threw " + e.what());
    }
  }
  r.note("cases=10000 rejected=" + std::to_string(rejected) +
         " accepted=" + std::to_string(accepted));
  return r.done();
}

struct Criterion {
  std::string_view name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {"hellinger_closed_forms", hellinger_closed_forms},
    {"oracle_equivalence", oracle_equivalence},
    {"frechet_correctness", frechet_correctness},
    {"degradation_monotonicity", degradation_monotonicity},
    {"diagnostics_direction", diagnostics_direction},
    {"cmms_gradient_check", cmms_gradient_check},
    {"cmms_learning", cmms_learning},
    {"sweep_stability", sweep_stability},
    {"cli_determinism", cli_determinism},
    {"format_fuzz", format_fuzz},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string_view> only;
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--list") {
      for (const auto& c : kCriteria) std::printf("%.*s\n", static_cast<int>(c.name.size()), c.name.data());
      return 0;
    }
    if (a == "--only" && i + 1 < argc) {
      only.push_back(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--list] [--only NAME]...\n", argv[0]);
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %.*s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL",
                static_cast<int>(c.name.size()), c.name.data(), secs,
                o.detail.empty() ? "" : " ", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
