// Versioned binary snapshots.
//
// Layout (little-endian throughout):
//   magic   "NLKS" (4 bytes)
//   u32     format version (currently 1)
//   u8      solver kind: 0 radial, 1 planar
//   u8      radial reporting mode: 0 normalized, 1 physical (0 for planar)
//   u16     reserved, zero
//   f64     M0, m0, t
//   radial payload:  u64 n; f64 s_max, stretch, rescale, mass_deficit;
//                    f64 s[n]; f64 M[n]
//   planar payload:  u64 n; f64 L; f64 u[n*n]
//   u32     CRC-32 (IEEE) of every preceding byte
//
// Doubles are copied bit-for-bit, so load(save(x)) reproduces x exactly.
#pragma once

#include <string>
#include <variant>

#include "nlks/planar.hpp"
#include "nlks/radial.hpp"

namespace nlks {

void checkpoint_save(const RadialState& st, const std::string& path);
// planar states carry their geometry alongside
void checkpoint_save(const PlanarState& st, double L, const std::string& path);

struct PlanarCheckpoint {
  PlanarState state;
  double L = 0;
  std::size_t n = 0;  // cells per side
};

using LoadedState = std::variant<RadialState, PlanarCheckpoint>;

// Throws io_error on missing/short files, bad magic, an unsupported
// version (named in the message), or a CRC mismatch.
LoadedState checkpoint_load(const std::string& path);

}  // namespace nlks
