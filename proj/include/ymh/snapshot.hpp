#pragma once

// Binary snapshots of a pair, little-endian:
//   "YMH1", u32 version = 1, u8 n, u32 dims[n], f64 lengths[n],
//   i32 flux (upper triangle), f64 eps,
//   u as (re, im) f64 pairs per site, alpha as n f64 per site.

#include <iosfwd>
#include <string>

#include "ymh/lattice.hpp"

namespace ymh {

void write_snapshot(const PairState& pair, std::ostream& os);
void write_snapshot(const PairState& pair, const std::string& path);

// Rebuilds the lattice from the header. Throws InvalidArgument on a wrong
// magic, an unknown version, a bad header or a truncated body.
PairState read_snapshot(std::istream& is);
PairState read_snapshot(const std::string& path);

}  // namespace ymh
