#pragma once

#include "nullcone/field.hpp"
#include "nullcone/sht.hpp"

namespace nullcone {

/// Deterministic band-limited random field: every harmonic coefficient with
/// 1 <= l <= lmax_pert (capped at the grid lmax) is drawn uniformly from
/// [-amplitude, amplitude] with a seeded mt19937_64. The l = 0 coefficient is
/// zero, so the field has exact zero mean; amplitude == 0 gives the zero
/// field. Identical (seed, lmax_pert, amplitude, grid) inputs reproduce the
/// field bit-for-bit.
ScalarField synthesize_random(const Sht& sht, unsigned long long seed, int lmax_pert,
                              double amplitude);

}  // namespace nullcone
