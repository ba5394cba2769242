#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace tokeval {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Digest over a directory's regular files in filename order, each entry
/// contributing "name\0<file digest>\n".
std::string sha256_directory(const std::filesystem::path& dir);

}  // namespace tokeval
