#pragma once

#include <string>

#include "thinfb/grid.hpp"

namespace thinfb {

// Binary layout, little-endian:
//   "THINFB1\n"
//   int64 n, nx, ny, nt
//   float64 a, hx, hy, ht, Rx, Ry, T
//   float64 values, slice by slice in (t, x1, x2, y) order
void write_snapshot(const std::string& path, const ScalarField& U);
ScalarField read_snapshot(const std::string& path);

// Writes `text` to path through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace thinfb
