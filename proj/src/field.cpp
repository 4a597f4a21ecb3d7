#include "alkspin/field.hpp"

#include <cmath>
#include <stdexcept>

#include "alkspin/constants.hpp"

namespace alkspin {

double DriveConfig::period() const { return constants::two_pi / omega; }

void DriveConfig::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("drive: Omega must be > 0");
  if (mode == Mode::dual_harmonic) {
    if (!(b0 > 0.0)) throw std::invalid_argument("drive: B0 must be > 0");
  } else {
    if (!(b_dc > 0.0) || !(b_ac > 0.0))
      throw std::invalid_argument("drive: Bdc and Bac must be > 0");
    if (b_dc < 10.0 * b_ac)
      throw std::invalid_argument(
          "drive: epr mode requires Bdc >= 10 Bac (linear response)");
  }
}

Eigen::Vector3d drive_field(const DriveConfig& cfg, double t) {
  const double ph = cfg.omega * (t - cfg.t0);
  return {cfg.b0 * std::cos(2.0 * ph), 0.0, cfg.b0 * std::cos(ph)};
}

Eigen::Vector3d epr_field(const DriveConfig& cfg, double t) {
  const double ph = cfg.omega * (t - cfg.t0);
  return {cfg.b_ac * std::cos(ph), 0.0, cfg.b_dc};
}

Eigen::Vector3d field_at(const DriveConfig& cfg, double t) {
  return cfg.mode == DriveConfig::Mode::dual_harmonic ? drive_field(cfg, t)
                                                      : epr_field(cfg, t);
}

void PumpConfig::validate() const {
  if (e_amp < 0.0) throw std::invalid_argument("pump: E_amp must be >= 0");
}

double pump_positive_frequency(const PumpConfig& cfg) {
  return cfg.e_amp / (2.0 * constants::hbar);
}

} // namespace alkspin
