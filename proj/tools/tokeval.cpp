#include <CLI11.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "tokeval/baselines.hpp"
#include "tokeval/cmms/checkpoint.hpp"
#include "tokeval/cmms/corruption.hpp"
#include "tokeval/cmms/train.hpp"
#include "tokeval/degrade.hpp"
#include "tokeval/diagnostics.hpp"
#include "tokeval/digest.hpp"
#include "tokeval/distances.hpp"
#include "tokeval/error.hpp"
#include "tokeval/eval.hpp"
#include "tokeval/histograms.hpp"
#include "tokeval/parallel.hpp"
#include "tokeval/rng.hpp"
#include "tokeval/synth.hpp"
#include "tokeval/toy_tokenizer.hpp"

namespace fs = std::filesystem;

namespace tokeval::cli {
namespace {

struct Context {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool quiet = false;
  bool json = false;
  std::ostringstream out;
  nlohmann::ordered_json block = nlohmann::ordered_json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;

  void kv(const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
    block[key] = v;
  }
  void kv(const std::string& key, std::uint64_t v) {
    out << key << '=' << v << '\n';
    block[key] = v;
  }
  void kv(const std::string& key, const std::string& v) {
    out << key << '=' << v << '\n';
    block[key] = v;
  }
  void log(const std::string& msg) const {
    if (!quiet) std::cerr << msg << '\n';
  }
  fs::path input(const fs::path& p) {
    inputs.push_back(p);
    return p;
  }
  fs::path output(const fs::path& p) {
    outputs.push_back(p);
    return p;
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridLayout parse_grid(const std::string& text) {
  const auto x = text.find('x');
  GridLayout g;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    g.rows = static_cast<std::uint32_t>(std::stoul(text.substr(0, x), &used));
    if (used != x) throw std::invalid_argument(text);
    g.cols = static_cast<std::uint32_t>(std::stoul(text.substr(x + 1), &used));
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "grid must look like RxC, got '" + text + "'");
  }
  require(g.rows > 0 && g.cols > 0, ErrorCode::kInvalidArgument, "grid must be non-empty");
  return g;
}

// ---- subcommands -----------------------------------------------------------

struct TokenizeOpts {
  std::string in, out, grid = "8x16";
  std::uint32_t codebook = 4096;
  bool text = false;
};

void run_tokenize(Context& ctx, const TokenizeOpts& o) {
  const auto files = list_images(ctx.input(o.in));
  require(!files.empty(), ErrorCode::kInvalidDataset, "no inputs in " + o.in);
  const GridLayout layout = parse_grid(o.grid);
  const PaletteCodebook palette = build_palette(o.codebook);

  std::vector<TokenSequence> seqs(files.size());
  std::vector<std::optional<Error>> errors(files.size());
  parallel_for(files.size(), ctx.threads, [&](std::size_t i) {
    try {
      seqs[i] = tokenize(load_image(files[i]), layout, palette);
    } catch (const Error& e) {
      errors[i] = e;
    }
  });
  const Error* first = nullptr;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i]) continue;
    std::cerr << files[i].filename().string() << ": " << errors[i]->what() << '\n';
    if (!first) first = &*errors[i];
  }
  if (first) {
    fail(first->code(), "tokenization failed for one or more images");
  }

  TokenDataset ds;
  ds.codebook = palette.codebook();
  ds.seq_len = static_cast<std::uint32_t>(layout.cells());
  ds.layout = layout;
  ds.sequences = std::move(seqs);
  save_tokens(ctx.output(o.out), ds, o.text ? TokenFormat::kText : TokenFormat::kBinary);
  ctx.kv("count", std::uint64_t{ds.size()});
  ctx.kv("codebook", std::uint64_t{ds.codebook.size});
  ctx.kv("seqlen", std::uint64_t{ds.seq_len});
  ctx.kv("grid", o.grid);
}

struct ChdOpts {
  std::string real, gen, disp = "right,down", distance = "hellinger";
};

void run_chd(Context& ctx, const ChdOpts& o) {
  const auto kind = parse_distance(o.distance);
  require(kind.has_value(), ErrorCode::kInvalidArgument, "unknown distance '" + o.distance + "'");
  const auto disp = DisplacementSet::parse(o.disp);
  const auto real = load_tokens(ctx.input(o.real));
  const auto gen = load_tokens(ctx.input(o.gen));
  const auto r = chd(real, gen, disp, *kind, ctx.threads);
  ctx.kv("distance", std::string(distance_name(*kind)));
  ctx.kv("n_real", std::uint64_t{real.size()});
  ctx.kv("n_gen", std::uint64_t{gen.size()});
  ctx.kv("chd_1d", r.chd_1d);
  ctx.kv("chd_2d", r.chd_2d);
  ctx.kv("chd", r.chd);
}

struct DegradeOpts {
  std::string in, out, kind;
  double param = 0.0;
};

void run_degrade(Context& ctx, const DegradeOpts& o) {
  auto spec = parse_degrade_kind(o.kind);
  require(spec.has_value(), ErrorCode::kInvalidArgument, "unknown degradation '" + o.kind + "'");
  spec->parameter = o.param;
  spec->validate();
  const auto files = list_images(ctx.input(o.in));
  require(!files.empty(), ErrorCode::kInvalidDataset, "no inputs in " + o.in);
  const fs::path out = ctx.output(o.out);
  fs::create_directories(out);
  const double severity = severity_of(*spec);

  parallel_for(files.size(), ctx.threads, [&](std::size_t i) {
    DegradeSpec s = *spec;
    s.seed = ctx.seed ^ static_cast<std::uint64_t>(i);
    save_image(out / files[i].filename(), apply_degradation(load_image(files[i]), s));
  });
  std::ofstream sidecar(out / "severity.txt", std::ios::trunc);
  for (const auto& f : files) sidecar << f.filename().string() << ' ' << format_double(severity) << '\n';
  if (!sidecar) fail(ErrorCode::kIo, "cannot write severity sidecar");

  ctx.kv("count", std::uint64_t{files.size()});
  ctx.kv("kind", std::string(degrade_name(*spec)));
  ctx.kv("param", o.param);
  ctx.kv("severity", severity);
}

struct TokenStatsOpts {
  std::string in, disp = "right,down";
  std::size_t top = 10;
};

void run_tokenstats(Context& ctx, const TokenStatsOpts& o) {
  const auto ds = load_tokens(ctx.input(o.in));
  const auto h = unigram(ds, ctx.threads);
  ctx.kv("count", std::uint64_t{ds.size()});
  ctx.kv("codebook", std::uint64_t{ds.codebook.size});
  ctx.kv("seqlen", std::uint64_t{ds.seq_len});
  const auto probs = h.probs();
  ctx.kv("entropy", entropy(probs));
  std::uint64_t used = 0;
  for (auto c : h.counts()) used += c > 0;
  ctx.kv("codebook_used", used);
  if (ds.layout) {
    ctx.kv("adjacent_mi", adjacent_mi(ds, DisplacementSet::parse(o.disp)));
  } else {
    ctx.log("no grid layout; adjacent_mi skipped");
  }
  std::vector<TokenId> order(h.codebook_size());
  for (TokenId i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](TokenId a, TokenId b) { return h.counts()[a] > h.counts()[b]; });
  const std::size_t k = std::min<std::size_t>(o.top, used);
  for (std::size_t i = 0; i < k; ++i) {
    const std::string rank = std::to_string(i + 1);
    ctx.kv("top" + rank + "_token", std::uint64_t{order[i]});
    ctx.kv("top" + rank + "_prob", probs[order[i]]);
  }
}

struct BaselineOpts {
  std::string kind, real, gen;
  std::optional<double> bandwidth;
};

void run_baseline(Context& ctx, const BaselineOpts& o) {
  const auto real = load_features(ctx.input(o.real));
  const auto gen = load_features(ctx.input(o.gen));
  ctx.kv("n_real", std::uint64_t{real.count()});
  ctx.kv("n_gen", std::uint64_t{gen.count()});
  if (o.kind == "frechet") {
    ctx.kv("frechet", frechet_distance(fit_gaussian(real), fit_gaussian(gen)));
  } else {
    const double bw = o.bandwidth ? *o.bandwidth : median_bandwidth(real, gen);
    ctx.kv("bandwidth", bw);
    ctx.kv("mmd2", mmd2(real, gen, bw));
  }
}

struct CmmsTrainOpts {
  std::string tokens, out, severities;
  bool full_scale = false;
  std::optional<std::uint32_t> epochs, batch;
  std::optional<double> lr, weight_decay;
};

void run_cmms_train(Context& ctx, const CmmsTrainOpts& o) {
  const auto ds = load_tokens(ctx.input(o.tokens));
  auto rcfg = o.full_scale ? cmms::RegressorConfig::full_scale(ds.codebook.size, ds.seq_len)
                           : cmms::RegressorConfig::test_scale(ds.codebook.size, ds.seq_len);
  rcfg.seed = derive_seed(ctx.seed, 0);
  auto tcfg = o.full_scale ? cmms::TrainConfig{} : cmms::TrainConfig::test_scale();
  tcfg.seed = derive_seed(ctx.seed, 1);
  if (o.epochs) tcfg.epochs = *o.epochs;
  if (o.batch) tcfg.batch_size = *o.batch;
  if (o.lr) tcfg.learning_rate = *o.lr;
  if (o.weight_decay) tcfg.weight_decay = *o.weight_decay;

  std::vector<double> severities;
  if (!o.severities.empty()) {
    for (const auto& [id, v] : read_scores(ctx.input(o.severities))) severities.push_back(v);
  }
  cmms::TrainOptions opts;
  opts.threads = ctx.threads;
  opts.severities = severities;
  opts.on_epoch = [&](std::uint32_t e, double loss) {
    ctx.log("epoch " + std::to_string(e + 1) + "/" + std::to_string(tcfg.epochs) +
            " loss " + format_double(loss));
  };
  const auto result = cmms::train(ds, tcfg, rcfg, opts);
  cmms::save_checkpoint(ctx.output(o.out), result.params);
  ctx.kv("parameters", std::uint64_t{result.params.size()});
  ctx.kv("epochs", std::uint64_t{tcfg.epochs});
  ctx.kv("initial_loss", result.history.initial_loss);
  ctx.kv("final_loss", result.history.epoch_loss.back());
}

struct CmmsScoreOpts {
  std::string model, tokens, out;
};

void run_cmms_score(Context& ctx, const CmmsScoreOpts& o) {
  const auto params = cmms::load_checkpoint(ctx.input(o.model));
  const auto ds = load_tokens(ctx.input(o.tokens));
  const auto scores = cmms::score_dataset(params, ds, ctx.threads);
  double sum = 0.0;
  for (double s : scores) sum += s;
  if (!o.out.empty()) {
    std::ofstream f(ctx.output(o.out), std::ios::trunc);
    for (std::size_t i = 0; i < scores.size(); ++i) f << i << ' ' << format_double(scores[i]) << '\n';
    if (!f) fail(ErrorCode::kIo, "cannot write " + o.out);
  }
  ctx.kv("count", std::uint64_t{scores.size()});
  ctx.kv("cmms", sum / static_cast<double>(scores.size()));
}

struct CorrelateOpts {
  std::string metric, human, direction = "higher", nmse = "minmax";
};

void run_correlate(Context& ctx, const CorrelateOpts& o) {
  const auto dir = parse_direction(o.direction);
  require(dir.has_value(), ErrorCode::kInvalidArgument, "direction must be higher or lower");
  require(o.nmse == "minmax" || o.nmse == "zscore", ErrorCode::kInvalidArgument,
          "nmse must be minmax or zscore");
  const auto [m, h] = align_scores(read_scores(ctx.input(o.metric)), read_scores(ctx.input(o.human)));
  const auto r = correlate(m, h, *dir, o.nmse == "zscore" ? NmseMode::kZScore : NmseMode::kMinMax);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  ctx.kv("n", std::uint64_t{r.n});
  ctx.kv("spearman", r.spearman);
  ctx.kv("kendall", r.kendall);
  ctx.kv("nmse", r.nmse);
  ctx.kv("pairwise_accuracy", r.pairwise_accuracy);
}

struct SweepOpts {
  std::string real, gen, metric = "chd", disp = "right,down";
  std::vector<std::size_t> sizes{100, 300, 1000, 3000};
  std::size_t repeats = 20;
};

void run_sweep(Context& ctx, const SweepOpts& o) {
  const auto metric = parse_sweep_metric(o.metric);
  require(metric.has_value(), ErrorCode::kInvalidArgument, "unknown sweep metric '" + o.metric + "'");
  const auto real = load_tokens(ctx.input(o.real));
  const auto gen = load_tokens(ctx.input(o.gen));
  SweepOptions opts;
  opts.sizes = o.sizes;
  opts.repeats = o.repeats;
  opts.seed = ctx.seed;
  opts.metric = *metric;
  opts.displacements = DisplacementSet::parse(o.disp);
  opts.threads = ctx.threads;
  const auto r = sample_sweep(real, gen, opts);
  ctx.kv("metric", o.metric);
  ctx.kv("repeats", std::uint64_t{o.repeats});
  for (std::size_t i = 0; i < r.sample_sizes.size(); ++i) {
    const std::string n = std::to_string(r.sample_sizes[i]);
    ctx.kv("mean_" + n, r.means[i]);
    ctx.kv("stddev_" + n, r.stddevs[i]);
    ctx.kv("cv_" + n, r.means[i] != 0.0 ? r.stddevs[i] / r.means[i] : 0.0);
  }
}

struct CorruptOpts {
  std::string in, out;
  double p = 0.0, swap = 0.0;
  bool text = false;
};

void run_corrupt(Context& ctx, const CorruptOpts& o) {
  const auto ds = load_tokens(ctx.input(o.in));
  const GridLayout layout = ds.layout.value_or(GridLayout{1, ds.seq_len});
  TokenDataset out = ds.empty_like();
  out.sequences.resize(ds.size());
  std::vector<double> targets(ds.size());
  parallel_for(ds.size(), ctx.threads, [&](std::size_t i) {
    cmms::CorruptionSpec spec;
    spec.p_uniform = o.p;
    spec.swap_fraction = o.swap;
    spec.seed = derive_seed(ctx.seed, i);
    auto s = cmms::corrupt_sample(ds.sequences[i], spec, ds.codebook.size, layout);
    out.sequences[i] = std::move(s.tokens);
    targets[i] = s.target;
  });
  save_tokens(ctx.output(o.out), out, o.text ? TokenFormat::kText : TokenFormat::kBinary);
  ctx.kv("count", std::uint64_t{out.size()});
  ctx.kv("p_eff", cmms::effective_severity(o.p, o.swap, 0.0));
  ctx.kv("target", targets.empty() ? 1.0 : targets.front());
}

struct SynthOpts {
  std::string out, grid = "8x16";
  std::size_t count = 100;
  int width = 64, height = 32;
  std::uint32_t codebook = 4096;
  double skew = 3.0, jitter = 0.1;
  bool text = false;
};

void run_synth_images(Context& ctx, const SynthOpts& o) {
  const fs::path out = ctx.output(o.out);
  fs::create_directories(out);
  char name[32];
  const auto images = synthetic_images(o.count, o.width, o.height, ctx.seed);
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::snprintf(name, sizeof name, "img_%06zu.png", i);
    save_image(out / name, images[i]);
  }
  ctx.kv("count", std::uint64_t{o.count});
}

void run_synth_tokens(Context& ctx, const SynthOpts& o) {
  StructuredTokenParams p;
  p.skew = o.skew;
  p.jitter = o.jitter;
  const auto ds = structured_tokens(o.count, o.codebook, parse_grid(o.grid), ctx.seed, p);
  save_tokens(ctx.output(o.out), ds, o.text ? TokenFormat::kText : TokenFormat::kBinary);
  ctx.kv("count", std::uint64_t{ds.size()});
  ctx.kv("codebook", std::uint64_t{ds.codebook.size});
  ctx.kv("seqlen", std::uint64_t{ds.seq_len});
}

// ---- driver -----------------------------------------------------------------

struct Invocation {
  std::string subcommand;
  std::string manifest;
  bool is_replay = false;
  int exit_code = 0;
};

int execute(const std::vector<std::string>& args, Context& ctx, Invocation& inv);

std::vector<std::string> strip_flag(const std::vector<std::string>& args, const std::string& flag) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag) {
      ++i;
      continue;
    }
    if (args[i].rfind(flag + "=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

struct ReplayOpts {
  std::string manifest, out;
  std::optional<unsigned> threads;
};

int run_replay(Context& ctx, const ReplayOpts& o) {
  const RunManifest m = load_manifest(o.manifest);
  for (const auto& [path, digest] : m.inputs) {
    if (digest_path(path) != digest) {
      fail(ErrorCode::kIncompatible, "input " + path + " changed since the manifest was written");
    }
  }
  std::vector<std::string> args = m.args;
  std::optional<std::string> old_out;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--out") old_out = args[i + 1];
  }
  if (!o.out.empty()) {
    require(old_out.has_value(), ErrorCode::kInvalidArgument, "recorded run has no --out");
    args = strip_flag(args, "--out");
    args.insert(args.end(), {"--out", o.out});
  }
  if (o.threads) {
    args = strip_flag(args, "--threads");
    args.insert(args.end(), {"--threads", std::to_string(*o.threads)});
  }

  Context inner;
  inner.quiet = ctx.quiet;
  Invocation sub;
  sub.is_replay = true;
  const int code = execute(args, inner, sub);
  if (code != 0) return code;
  const std::string text = inner.out.str();
  ctx.out << text;

  bool match = sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}) ==
               m.stdout_sha256;
  for (const auto& [path, digest] : m.outputs) {
    const std::string now = (!o.out.empty() && old_out && path == *old_out) ? o.out : path;
    match = match && fs::exists(now) && digest_path(now) == digest;
  }
  ctx.log(match ? "replay: outputs identical" : "replay: outputs differ");
  if (!match) fail(ErrorCode::kIncompatible, "replayed outputs differ from the manifest");
  return 0;
}

void write_manifest(const std::vector<std::string>& args, Context& ctx, const Invocation& inv) {
  RunManifest m;
  m.version = TOKEVAL_VERSION;
  m.subcommand = inv.subcommand;
  m.args = strip_flag(args, "--manifest");
  m.seed = ctx.seed;
  m.threads = ctx.threads;
  for (const auto& p : ctx.inputs) m.inputs[p.string()] = digest_path(p);
  for (const auto& p : ctx.outputs) m.outputs[p.string()] = digest_path(p);
  const std::string text = ctx.out.str();
  m.stdout_sha256 = sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});

  fs::path where;
  if (!inv.manifest.empty()) {
    where = inv.manifest;
  } else if (!ctx.outputs.empty()) {
    where = ctx.outputs.front();
    where += ".manifest.json";
  }
  if (where.empty()) {
    if (!ctx.quiet) std::cerr << m.to_json().dump(2) << '\n';
  } else {
    save_manifest(where, m);
  }
}

int execute(const std::vector<std::string>& args, Context& ctx, Invocation& inv) {
  CLI::App app{"Token-space evaluation of generative image models", "tokeval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TOKEVAL_VERSION);
  app.add_option("--seed", ctx.seed, "Run seed")->capture_default_str();
  app.add_option("--threads", ctx.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--quiet", ctx.quiet, "Suppress progress on stderr");
  app.add_flag("--json", ctx.json, "Append a JSON block to stdout");
  app.add_option("--manifest", inv.manifest, "Where to write the run manifest");

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  TokenizeOpts tok;
  auto* c_tok = sub("tokenize", "Tokenise a directory of images");
  c_tok->add_option("--in", tok.in, "Image directory")->required();
  c_tok->add_option("--out", tok.out, "Output token file")->required();
  c_tok->add_option("--grid", tok.grid, "Patch grid RxC")->capture_default_str();
  c_tok->add_option("--codebook", tok.codebook, "Palette size K")->capture_default_str();
  c_tok->add_flag("--text", tok.text, "Write the text token format");

  ChdOpts chd_o;
  auto* c_chd = sub("chd", "Codebook histogram distance between two token sets");
  c_chd->add_option("--real", chd_o.real)->required();
  c_chd->add_option("--gen", chd_o.gen)->required();
  c_chd->add_option("--disp", chd_o.disp, "Displacements")->capture_default_str();
  c_chd->add_option("--distance", chd_o.distance, "hellinger|kl|cosine|emd1d")->capture_default_str();

  DegradeOpts deg;
  auto* c_deg = sub("degrade", "Apply a pixel-space degradation to a directory");
  c_deg->add_option("--in", deg.in)->required();
  c_deg->add_option("--out", deg.out)->required();
  c_deg->add_option("--kind", deg.kind)->required();
  c_deg->add_option("--param", deg.param)->required();

  TokenStatsOpts ts;
  auto* c_ts = sub("tokenstats", "Entropy, adjacent MI and frequent tokens");
  c_ts->add_option("--in", ts.in)->required();
  c_ts->add_option("--disp", ts.disp)->capture_default_str();
  c_ts->add_option("--top", ts.top)->capture_default_str();

  BaselineOpts bl;
  auto* c_bl = sub("baseline", "Feature-space baselines");
  c_bl->add_option("kind", bl.kind, "frechet|mmd")->required()->check(CLI::IsMember({"frechet", "mmd"}));
  c_bl->add_option("--real", bl.real)->required();
  c_bl->add_option("--gen", bl.gen)->required();
  c_bl->add_option("--bandwidth", bl.bandwidth, "Kernel bandwidth (default: median heuristic)");

  auto* c_cmms = sub("cmms", "Train or apply the token quality regressor");
  c_cmms->require_subcommand(1);
  CmmsTrainOpts ct;
  auto* c_train = c_cmms->add_subcommand("train", "Train on a clean token corpus");
  c_train->fallthrough();
  c_train->add_option("--tokens", ct.tokens)->required();
  c_train->add_option("--out", ct.out)->required();
  c_train->add_flag("--full-scale", ct.full_scale, "Use the 512-wide model and full recipe");
  c_train->add_option("--epochs", ct.epochs);
  c_train->add_option("--batch", ct.batch);
  c_train->add_option("--lr", ct.lr);
  c_train->add_option("--weight-decay", ct.weight_decay);
  c_train->add_option("--severities", ct.severities, "Per-sequence pixel severities (id value)");
  CmmsScoreOpts cs;
  auto* c_score = c_cmms->add_subcommand("score", "Score a token set");
  c_score->fallthrough();
  c_score->add_option("--model", cs.model)->required();
  c_score->add_option("--tokens", cs.tokens)->required();
  c_score->add_option("--out", cs.out, "Per-sequence scores");

  CorrelateOpts co;
  auto* c_co = sub("correlate", "Agreement between metric and reference scores");
  c_co->add_option("--metric", co.metric)->required();
  c_co->add_option("--human", co.human)->required();
  c_co->add_option("--direction", co.direction)->capture_default_str();
  c_co->add_option("--nmse", co.nmse, "minmax|zscore")->capture_default_str();

  SweepOpts sw;
  auto* c_sw = sub("sweep", "Metric stability against sample size");
  c_sw->add_option("--real", sw.real)->required();
  c_sw->add_option("--gen", sw.gen)->required();
  c_sw->add_option("--sizes", sw.sizes)->delimiter(',')->capture_default_str();
  c_sw->add_option("--repeats", sw.repeats)->capture_default_str();
  c_sw->add_option("--metric", sw.metric, "chd|frechet-unigram")->capture_default_str();
  c_sw->add_option("--disp", sw.disp)->capture_default_str();

  CorruptOpts cr;
  auto* c_cr = sub("corrupt", "Token-space corruption of a token set");
  c_cr->add_option("--in", cr.in)->required();
  c_cr->add_option("--out", cr.out)->required();
  c_cr->add_option("--p", cr.p, "Uniform replacement probability")->capture_default_str();
  c_cr->add_option("--swap", cr.swap, "Fragment swap fraction")->capture_default_str();
  c_cr->add_flag("--text", cr.text);

  SynthOpts sy;
  auto* c_sy = sub("synth", "Generate synthetic images or token grids");
  c_sy->require_subcommand(1);
  auto* c_syi = c_sy->add_subcommand("images");
  c_syi->fallthrough();
  c_syi->add_option("--out", sy.out)->required();
  c_syi->add_option("--count", sy.count)->capture_default_str();
  c_syi->add_option("--width", sy.width)->capture_default_str();
  c_syi->add_option("--height", sy.height)->capture_default_str();
  auto* c_syt = c_sy->add_subcommand("tokens");
  c_syt->fallthrough();
  c_syt->add_option("--out", sy.out)->required();
  c_syt->add_option("--count", sy.count)->capture_default_str();
  c_syt->add_option("--codebook", sy.codebook)->capture_default_str();
  c_syt->add_option("--grid", sy.grid)->capture_default_str();
  c_syt->add_option("--skew", sy.skew)->capture_default_str();
  c_syt->add_option("--jitter", sy.jitter)->capture_default_str();
  c_syt->add_flag("--text", sy.text);

  ReplayOpts rp;
  auto* c_rp = sub("replay", "Re-run a recorded invocation and verify its outputs");
  c_rp->add_option("--from", rp.manifest, "Manifest to replay")->required();
  c_rp->add_option("--out", rp.out, "Redirect the primary output");
  c_rp->add_option("--with-threads", rp.threads, "Override the worker count");

  std::vector<const char*> argv{"tokeval"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (c_rp->parsed()) {
    inv.subcommand = "replay";
    return run_replay(ctx, rp);
  }
  if (c_tok->parsed()) inv.subcommand = "tokenize", run_tokenize(ctx, tok);
  else if (c_chd->parsed()) inv.subcommand = "chd", run_chd(ctx, chd_o);
  else if (c_deg->parsed()) inv.subcommand = "degrade", run_degrade(ctx, deg);
  else if (c_ts->parsed()) inv.subcommand = "tokenstats", run_tokenstats(ctx, ts);
  else if (c_bl->parsed()) inv.subcommand = "baseline", run_baseline(ctx, bl);
  else if (c_train->parsed()) inv.subcommand = "cmms train", run_cmms_train(ctx, ct);
  else if (c_score->parsed()) inv.subcommand = "cmms score", run_cmms_score(ctx, cs);
  else if (c_co->parsed()) inv.subcommand = "correlate", run_correlate(ctx, co);
  else if (c_sw->parsed()) inv.subcommand = "sweep", run_sweep(ctx, sw);
  else if (c_cr->parsed()) inv.subcommand = "corrupt", run_corrupt(ctx, cr);
  else if (c_syi->parsed()) inv.subcommand = "synth images", run_synth_images(ctx, sy);
  else if (c_syt->parsed()) inv.subcommand = "synth tokens", run_synth_tokens(ctx, sy);

  if (ctx.json) ctx.out << ctx.block.dump() << '\n';
  if (!inv.is_replay) write_manifest(args, ctx, inv);
  return 0;
}

}  // namespace
}  // namespace tokeval::cli

int main(int argc, char** argv) {
  using namespace tokeval;
  const std::vector<std::string> args(argv + 1, argv + argc);
  cli::Context ctx;
  cli::Invocation inv;
  int code = 0;
  try {
    code = cli::execute(args, ctx, inv);
  } catch (const Error& e) {
    std::cout << ctx.out.str();
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << '\n';
    return exit_code_for(ErrorCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(ErrorCode::kIo);
  }
  std::cout << ctx.out.str();
  return code;
}
