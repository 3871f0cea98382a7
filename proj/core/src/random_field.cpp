#include "nullcone/random_field.hpp"

#include <random>

#include "nullcone/errors.hpp"

namespace nullcone {

ScalarField synthesize_random(const Sht& sht, unsigned long long seed, int lmax_pert,
                              double amplitude) {
  if (lmax_pert < 0) throw InvalidArgument("synthesize_random: lmax_pert must be >= 0");
  if (amplitude < 0.0) throw InvalidArgument("synthesize_random: amplitude must be >= 0");
  const int lcap = std::min(lmax_pert, sht.lmax());

  SpectralCoeffs c(sht.lmax());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  // Fixed draw order (l outer, m inner, cos before sin) so a given seed maps
  // to the same coefficients regardless of grid resolution.
  for (int l = 1; l <= lcap; ++l)
    for (int m = 0; m <= l; ++m) {
      c.at(l, m, 0) = dist(rng);
      if (m > 0) c.at(l, m, 1) = dist(rng);
    }
  return sht.synthesize(c);
}

}  // namespace nullcone
