#pragma once

#include <Eigen/Dense>

namespace alkspin {

// zero-mean dual-harmonic drive:
//   B(t) = B0 l_z cos(Omega (t-t0)) + B0 l_x cos(2 Omega (t-t0))
// or the EPR reference configuration:
//   B(t) = Bdc l_z + Bac l_x cos(Omega (t-t0))
struct DriveConfig {
  enum class Mode { dual_harmonic, epr };
  Mode mode = Mode::dual_harmonic;
  double b0 = 0.0;    // tesla, dual-harmonic amplitude
  double omega = 0.0; // rad/s, fundamental
  double b_dc = 0.0;  // tesla, epr bias
  double b_ac = 0.0;  // tesla, epr transverse amplitude
  double t0 = 0.0;    // phase origin, s

  double period() const;
  void validate() const; // throws std::invalid_argument
};

Eigen::Vector3d drive_field(const DriveConfig& cfg, double t);
Eigen::Vector3d epr_field(const DriveConfig& cfg, double t);
Eigen::Vector3d field_at(const DriveConfig& cfg, double t); // mode dispatch

struct PumpConfig {
  double e_amp = 0.0;    // V/m, sigma+ envelope
  double detuning = 0.0; // rad/s, carrier minus the F=1 -> F'=2 resonance

  void validate() const;
};

// positive-frequency Rabi prefactor E/(2 hbar), multiplies the raising
// dipole in the rotating-wave coupling
double pump_positive_frequency(const PumpConfig& cfg);

} // namespace alkspin
