#pragma once

namespace alkspin {

// exponential relaxation rates, 1/s (not angular)
struct RelaxationRates {
  double gamma = 0.0;     // uniform relaxation to the unpolarized ground state
  double delta_mix = 0.0; // velocity-class remixing
  double delta_dcy = 0.0; // excited-state decay (repopulates the ground state)
  double delta_dec = 0.0; // optical-coherence decoherence

  void validate() const; // throws std::invalid_argument on bad input

  // the regime the model is built for: gamma << delta_mix <= delta_dcy <<
  // delta_dec; callers may warn when this fails
  bool physical_ordering() const {
    return gamma <= delta_mix && delta_mix <= delta_dcy &&
           delta_dcy <= delta_dec;
  }
};

} // namespace alkspin
