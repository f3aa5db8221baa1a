#pragma once

// Checkpoint container: magic "SPNCKPT1", then per-parameter records
//   u32 name length | UTF-8 name | u32 rank | u32 extents[rank] | f32 data[]
// all integers and floats little-endian.

#include <string>

#include "spnlab/params.hpp"

namespace spnlab {

void save_checkpoint(const std::string& path, const ParamList& params);

// Loads values into an existing ParamList; every stored name must match an
// entry with identical shape, and vice versa.
void load_checkpoint(const std::string& path, ParamList& params);

}  // namespace spnlab
