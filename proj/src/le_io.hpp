#pragma once

// Little-endian stream helpers shared by the binary formats.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "tokeval/error.hpp"

namespace tokeval::detail {

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) fail(ErrorCode::kIo, "write failed");
    written_ += n;
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    std::array<std::uint8_t, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b.data(), b.size());
  }
  void u64(std::uint64_t v) {
    std::array<std::uint8_t, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b.data(), b.size());
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::uint64_t written() const { return written_; }

 private:
  std::ostream& out_;
  std::uint64_t written_ = 0;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      fail(ErrorCode::kTruncated, std::string("truncated input while reading ") + what);
    }
  }
  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    bytes(&v, 1, what);
    return v;
  }
  std::uint32_t u32(const char* what) {
    std::array<std::uint8_t, 4> b{};
    bytes(b.data(), 4, what);
    return decode_u32(b.data());
  }
  std::uint64_t u64(const char* what) {
    std::array<std::uint8_t, 8> b{};
    bytes(b.data(), 8, what);
    return decode_u64(b.data());
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  static std::uint32_t decode_u32(const std::uint8_t* b) {
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
           std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
  }
  static std::uint64_t decode_u64(const std::uint8_t* b) {
    return std::uint64_t{decode_u32(b)} | std::uint64_t{decode_u32(b + 4)} << 32;
  }

 private:
  std::istream& in_;
};

}  // namespace tokeval::detail
