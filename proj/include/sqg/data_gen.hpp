// Initial-data generators. Every kind returns a pair satisfying the
// constitutive law: spectrally for mode/psi/random, through the truncated
// annulus convolution for bumps.
#pragma once

#include <cstdint>
#include <utility>

#include "sqg/grid.hpp"

namespace sqg {

enum class DataKind { Mode, Bumps, Psi, Random };

DataKind parse_data_kind(const std::string& name);
const char* data_kind_name(DataKind k);

std::pair<ScalarField, VectorField> generate_data(DataKind kind, const GridSpec& spec,
                                                  std::uint64_t seed);

// Band-limited seeded noise with unit sup norm (also used by the Hölder-gain
// diffusion check, which wants the roughest representable data).
ScalarField random_band_limited(const GridSpec& spec, std::uint64_t seed, int k_min = 1,
                                int k_max = 0 /* default: min(nx,ny)/6 */);

// Sparse sum of compactly supported bumps at dyadic lattice positions.
// extent_frac scales the widest ring relative to the domain.
ScalarField sparse_bump_lattice(const GridSpec& spec, double bump_radius = 0.0,
                                bool alternate_signs = false, double extent_frac = 0.3);

// One centered compactly supported bump of the given radius.
ScalarField centered_bump(const GridSpec& spec, double radius);

}  // namespace sqg
