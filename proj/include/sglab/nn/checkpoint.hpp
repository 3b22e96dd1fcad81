#pragma once

#include "sglab/nn/net.hpp"

#include <iosfwd>
#include <string>

namespace sglab::nn {

// Layout, all integers little-endian:
//   "SGLAB1"                          magic, doubles as the format version
//   u32 data_dim, u32 time_embed, u32 vocab, u32 hidden_count, u32 hidden[...]
//   u32 array_count
//   per array: u8 dtype (1 = float64), u8 rank (2), u64 rows, u64 cols,
//              rows*cols float64 values in row-major order
void save_checkpoint(const ScoreNet& net, std::ostream& out);
void save_checkpoint(const ScoreNet& net, const std::string& path);
ScoreNet load_checkpoint(std::istream& in);
ScoreNet load_checkpoint(const std::string& path);

}  // namespace sglab::nn
