#pragma once

#include <filesystem>
#include <iosfwd>

#include "tokeval/cmms/regressor.hpp"

namespace tokeval::cmms {

// CHMM: "CHMM", 0x01, K u32, N u32, embed_dim u32, num_layers u32,
// num_heads u32, mlp_hidden u32, ffn_hidden u32, seed u64, count u64,
// then count f64 values in ParamLayout order. Little-endian throughout.
void write_checkpoint(const RegressorParams& params, std::ostream& sink);
RegressorParams read_checkpoint(std::istream& source);

void save_checkpoint(const std::filesystem::path& path, const RegressorParams& params);
RegressorParams load_checkpoint(const std::filesystem::path& path);

}  // namespace tokeval::cmms
