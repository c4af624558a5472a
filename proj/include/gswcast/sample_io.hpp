#pragma once

#include <filesystem>
#include <iosfwd>

#include "gswcast/samplers.hpp"

namespace gswcast {

// Sample sidecar format:
//   line 1: "# " + JSON object {format, version, delta, seed, next_row_id,
//           weight_source{kind,name,measures}, ts, dims[{name,type}], measures[]}
//   line 2: CSV header row_id,u,w,<dims...>,<measures...>,<ts>
//   then one CSV record per sampled row, in key order.
// Reals use shortest round-trip formatting, so reading back is bit-exact.

void write_sample(std::ostream& out, const GswSample& s);
GswSample read_sample(std::istream& in);

void save_sample(const std::filesystem::path& path, const GswSample& s);
GswSample load_sample(const std::filesystem::path& path);

}  // namespace gswcast
