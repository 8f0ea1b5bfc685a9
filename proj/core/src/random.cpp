#include "hom/random.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <cmath>

#include "hom/error.hpp"

namespace hom {

std::int64_t sample_poisson(CounterRng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError("Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return dist(rng);
}

}  // namespace hom
