#include "alkspin/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace alkspin {

void RelaxationRates::validate() const {
  const double vals[] = {gamma, delta_mix, delta_dcy, delta_dec};
  for (double v : vals)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("rates: all rates must be finite and >= 0");
}

} // namespace alkspin
