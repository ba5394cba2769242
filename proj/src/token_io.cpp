#include "tokeval/token_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "le_io.hpp"
#include "tokeval/error.hpp"

namespace tokeval {
namespace {

using detail::LeReader;
using detail::LeWriter;

constexpr std::array<char, 4> kTokenMagic{'C', 'H', 'T', 'K'};
constexpr std::array<char, 4> kFeatureMagic{'C', 'H', 'F', 'V'};
constexpr std::uint8_t kVersion = 0x01;
// Tokens are decoded in blocks so a corrupt header that declares a huge
// payload fails on truncation instead of on allocation.
constexpr std::size_t kReadBlock = 1 << 14;

void check_magic(LeReader& r, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  r.bytes(got.data(), got.size(), "magic");
  if (got != magic) {
    fail(ErrorCode::kBadMagic,
         "bad magic: expected '" + std::string(magic.data(), 4) + "'");
  }
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         "unsupported format version " + std::to_string(version));
  }
}

void check_header(std::uint32_t k, std::uint32_t n, std::uint32_t rows,
                  std::uint32_t cols) {
  if (k < 2) fail(ErrorCode::kMalformedHeader, "codebook size must be >= 2");
  if (n == 0) fail(ErrorCode::kMalformedHeader, "sequence length must be >= 1");
  if ((rows == 0) != (cols == 0)) {
    fail(ErrorCode::kMalformedHeader, "grid rows and cols must both be zero or both positive");
  }
  if (rows != 0 && std::uint64_t{rows} * cols != n) {
    fail(ErrorCode::kMalformedHeader, "grid " + std::to_string(rows) + "x" +
                                          std::to_string(cols) + " does not cover seqlen " +
                                          std::to_string(n));
  }
}

std::optional<GridLayout> make_layout(std::uint32_t rows, std::uint32_t cols) {
  if (rows == 0) return std::nullopt;
  return GridLayout{rows, cols};
}

// Parses an unsigned decimal that must span the whole token.
template <class T>
bool parse_uint(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read error on " + path.string());
  return data;
}

class SpanBuf : public std::streambuf {
 public:
  explicit SpanBuf(std::span<const std::uint8_t> bytes) {
    auto* p = const_cast<char*>(reinterpret_cast<const char*>(bytes.data()));
    setg(p, p, p + bytes.size());
  }
};

}  // namespace

void TokenDataset::validate() const {
  check_header(codebook.size, seq_len, layout ? layout->rows : 0,
               layout ? layout->cols : 0);
  if (layout && (layout->rows == 0 || layout->cols == 0)) {
    fail(ErrorCode::kInvalidDataset, "grid dimensions must be positive");
  }
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& seq = sequences[s];
    if (seq.size() != seq_len) {
      fail(ErrorCode::kLengthMismatch, "sequence " + std::to_string(s) + " has length " +
                                           std::to_string(seq.size()) + ", expected " +
                                           std::to_string(seq_len));
    }
    for (TokenId id : seq) {
      if (id >= codebook.size) {
        fail(ErrorCode::kTokenOutOfRange, "token id " + std::to_string(id) +
                                              " >= codebook size " +
                                              std::to_string(codebook.size));
      }
    }
  }
}

TokenDataset TokenDataset::empty_like() const {
  TokenDataset out;
  out.codebook = codebook;
  out.seq_len = seq_len;
  out.layout = layout;
  return out;
}

void FeatureSet::push_back(std::span<const double> v) {
  if (v.size() != dim) fail(ErrorCode::kLengthMismatch, "feature vector has wrong dimension");
  values.insert(values.end(), v.begin(), v.end());
}

std::uint64_t write_tokens(const TokenDataset& dataset, std::ostream& sink) {
  dataset.validate();
  LeWriter w(sink);
  w.bytes(kTokenMagic.data(), kTokenMagic.size());
  w.u8(kVersion);
  w.u32(dataset.codebook.size);
  w.u32(dataset.seq_len);
  w.u32(dataset.layout ? dataset.layout->rows : 0);
  w.u32(dataset.layout ? dataset.layout->cols : 0);
  w.u64(dataset.sequences.size());
  std::vector<std::uint8_t> buf;
  for (const auto& seq : dataset.sequences) {
    buf.resize(seq.size() * 4);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (int b = 0; b < 4; ++b) buf[4 * i + b] = static_cast<std::uint8_t>(seq[i] >> (8 * b));
    }
    w.bytes(buf.data(), buf.size());
  }
  return w.written();
}

std::vector<std::uint8_t> encode_tokens(const TokenDataset& dataset) {
  std::ostringstream out(std::ios::binary);
  write_tokens(dataset, out);
  const std::string s = std::move(out).str();
  return {s.begin(), s.end()};
}

TokenDataset read_tokens(std::istream& source) {
  LeReader r(source);
  check_magic(r, kTokenMagic);
  TokenDataset ds;
  ds.codebook.size = r.u32("codebook size");
  ds.seq_len = r.u32("sequence length");
  const std::uint32_t rows = r.u32("grid rows");
  const std::uint32_t cols = r.u32("grid cols");
  const std::uint64_t count = r.u64("sequence count");
  check_header(ds.codebook.size, ds.seq_len, rows, cols);
  ds.layout = make_layout(rows, cols);

  std::vector<std::uint8_t> block;
  for (std::uint64_t s = 0; s < count; ++s) {
    TokenSequence seq;
    seq.reserve(std::min<std::size_t>(ds.seq_len, kReadBlock));
    std::size_t remaining = ds.seq_len;
    while (remaining > 0) {
      const std::size_t take = std::min(remaining, kReadBlock);
      block.resize(take * 4);
      r.bytes(block.data(), block.size(), "token payload");
      for (std::size_t i = 0; i < take; ++i) {
        const TokenId id = LeReader::decode_u32(block.data() + 4 * i);
        if (id >= ds.codebook.size) {
          fail(ErrorCode::kTokenOutOfRange,
               "token id " + std::to_string(id) + " >= codebook size " +
                   std::to_string(ds.codebook.size) + " in sequence " + std::to_string(s));
        }
        seq.push_back(id);
      }
      remaining -= take;
    }
    ds.sequences.push_back(std::move(seq));
  }
  if (!r.at_end()) fail(ErrorCode::kLengthMismatch, "trailing bytes after token payload");
  return ds;
}

TokenDataset read_tokens(std::span<const std::uint8_t> bytes) {
  SpanBuf buf(bytes);
  std::istream in(&buf);
  return read_tokens(in);
}

void write_tokens_text(const TokenDataset& dataset, std::ostream& sink) {
  dataset.validate();
  const auto rows = dataset.layout ? dataset.layout->rows : 0;
  const auto cols = dataset.layout ? dataset.layout->cols : 0;
  sink << "#chtk codebook=" << dataset.codebook.size << " seqlen=" << dataset.seq_len
       << " grid=" << rows << 'x' << cols << '\n';
  for (const auto& seq : dataset.sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) sink << ' ';
      sink << seq[i];
    }
    sink << '\n';
  }
  if (!sink) fail(ErrorCode::kIo, "write failed");
}

TokenDataset read_tokens_text(std::istream& source) {
  std::string line;
  if (!std::getline(source, line)) fail(ErrorCode::kMalformedHeader, "missing #chtk header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream hs(line);
  std::string tag, kfield, nfield, gfield, extra;
  hs >> tag >> kfield >> nfield >> gfield;
  if (tag != "#chtk" || (hs >> extra) ||
      !kfield.starts_with("codebook=") || !nfield.starts_with("seqlen=") ||
      !gfield.starts_with("grid=")) {
    fail(ErrorCode::kMalformedHeader, "malformed header line: " + line);
  }
  std::uint32_t k = 0, n = 0, rows = 0, cols = 0;
  const std::string_view grid = std::string_view(gfield).substr(5);
  const auto x = grid.find('x');
  if (!parse_uint(std::string_view(kfield).substr(9), k) ||
      !parse_uint(std::string_view(nfield).substr(7), n) || x == std::string_view::npos ||
      !parse_uint(grid.substr(0, x), rows) || !parse_uint(grid.substr(x + 1), cols)) {
    fail(ErrorCode::kMalformedHeader, "malformed header line: " + line);
  }
  check_header(k, n, rows, cols);

  TokenDataset ds;
  ds.codebook.size = k;
  ds.seq_len = n;
  ds.layout = make_layout(rows, cols);

  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    TokenSequence seq;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = std::min(rest.find_first_of(" \t"), rest.size());
      TokenId id = 0;
      if (!parse_uint(rest.substr(0, end), id)) {
        fail(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) +
                                            ": non-integer token '" +
                                            std::string(rest.substr(0, end)) + "'");
      }
      if (id >= k) {
        fail(ErrorCode::kTokenOutOfRange, "line " + std::to_string(line_no) + ": token id " +
                                              std::to_string(id) + " >= codebook size " +
                                              std::to_string(k));
      }
      seq.push_back(id);
      rest.remove_prefix(end);
    }
    if (seq.size() != n) {
      fail(ErrorCode::kLengthMismatch, "line " + std::to_string(line_no) + " has " +
                                           std::to_string(seq.size()) + " tokens, expected " +
                                           std::to_string(n));
    }
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

std::uint64_t write_features(const FeatureSet& features, std::ostream& sink) {
  if (features.dim == 0) fail(ErrorCode::kInvalidDataset, "feature dimension must be >= 1");
  if (features.values.size() % features.dim != 0) {
    fail(ErrorCode::kInvalidDataset, "feature payload is not a multiple of dim");
  }
  LeWriter w(sink);
  w.bytes(kFeatureMagic.data(), kFeatureMagic.size());
  w.u8(kVersion);
  w.u32(features.dim);
  w.u64(features.count());
  for (double v : features.values) w.f64(v);
  return w.written();
}

FeatureSet read_features(std::istream& source) {
  LeReader r(source);
  check_magic(r, kFeatureMagic);
  FeatureSet fs;
  fs.dim = r.u32("dimension");
  const std::uint64_t count = r.u64("vector count");
  if (fs.dim == 0) fail(ErrorCode::kMalformedHeader, "feature dimension must be >= 1");
  std::array<std::uint8_t, 8> b{};
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint32_t j = 0; j < fs.dim; ++j) {
      r.bytes(b.data(), 8, "feature payload");
      const double v = std::bit_cast<double>(LeReader::decode_u64(b.data()));
      if (!std::isfinite(v)) {
        fail(ErrorCode::kNonFinite, "non-finite value in feature vector " + std::to_string(i));
      }
      fs.values.push_back(v);
    }
  }
  if (!r.at_end()) fail(ErrorCode::kLengthMismatch, "trailing bytes after feature payload");
  return fs;
}

FeatureSet read_features(std::span<const std::uint8_t> bytes) {
  SpanBuf buf(bytes);
  std::istream in(&buf);
  return read_features(in);
}

TokenDataset load_tokens(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 5 && std::memcmp(bytes.data(), "#chtk", 5) == 0) {
    SpanBuf buf(bytes);
    std::istream in(&buf);
    return read_tokens_text(in);
  }
  return read_tokens(std::span<const std::uint8_t>(bytes));
}

void save_tokens(const std::filesystem::path& path, const TokenDataset& dataset,
                 TokenFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  if (format == TokenFormat::kText) {
    write_tokens_text(dataset, out);
  } else {
    write_tokens(dataset, out);
  }
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed on " + path.string());
}

FeatureSet load_features(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return read_features(std::span<const std::uint8_t>(bytes));
}

void save_features(const std::filesystem::path& path, const FeatureSet& features) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_features(features, out);
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed on " + path.string());
}

}  // namespace tokeval
