#include "tokeval/cmms/checkpoint.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "le_io.hpp"
#include "tokeval/error.hpp"

namespace tokeval::cmms {
namespace {

constexpr std::array<char, 4> kMagic{'C', 'H', 'M', 'M'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kReadBlock = 1 << 14;

}  // namespace

void write_checkpoint(const RegressorParams& params, std::ostream& sink) {
  const ParamLayout layout(params.config);
  require(params.values.size() == layout.total, ErrorCode::kIncompatible,
          "parameter count does not match configuration");
  detail::LeWriter w(sink);
  w.bytes(kMagic.data(), kMagic.size());
  w.u8(kVersion);
  const auto& c = params.config;
  for (std::uint32_t v : {c.codebook_size, c.seq_len, c.embed_dim, c.num_layers, c.num_heads,
                          c.mlp_hidden, c.ffn_hidden}) {
    w.u32(v);
  }
  w.u64(c.seed);
  w.u64(params.values.size());
  for (double v : params.values) w.f64(v);
}

RegressorParams read_checkpoint(std::istream& source) {
  detail::LeReader r(source);
  std::array<char, 4> magic{};
  r.bytes(magic.data(), magic.size(), "magic");
  if (magic != kMagic) fail(ErrorCode::kBadMagic, "bad magic: expected 'CHMM'");
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) {
    fail(ErrorCode::kUnsupportedVersion, "unsupported checkpoint version " + std::to_string(version));
  }
  RegressorParams p;
  auto& c = p.config;
  c.codebook_size = r.u32("codebook size");
  c.seq_len = r.u32("sequence length");
  c.embed_dim = r.u32("embed_dim");
  c.num_layers = r.u32("num_layers");
  c.num_heads = r.u32("num_heads");
  c.mlp_hidden = r.u32("mlp_hidden");
  c.ffn_hidden = r.u32("ffn_hidden");
  c.seed = r.u64("seed");
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kMalformedHeader, std::string("checkpoint config: ") + e.what());
  }
  const ParamLayout layout(c);
  const std::uint64_t count = r.u64("parameter count");
  if (count != layout.total) {
    fail(ErrorCode::kMalformedHeader, "checkpoint holds " + std::to_string(count) +
                                          " values, configuration needs " +
                                          std::to_string(layout.total));
  }
  for (std::uint64_t done = 0; done < count;) {
    const std::uint64_t n = std::min<std::uint64_t>(kReadBlock, count - done);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = std::bit_cast<double>(r.u64("parameters"));
      if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite parameter in checkpoint");
      p.values.push_back(v);
    }
    done += n;
  }
  if (!r.at_end()) fail(ErrorCode::kLengthMismatch, "trailing bytes after checkpoint");
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const RegressorParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_checkpoint(params, out);
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed on " + path.string());
}

RegressorParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace tokeval::cmms
