#pragma once

#include <string>
#include <vector>

#include "alkspin/liouville.hpp"
#include "alkspin/pauli.hpp"

namespace alkspin {

// everything needed to build an Engine for one run
struct SimulationSetup {
  AtomParams atom;
  DriveConfig drive;
  PumpConfig pump;
  RelaxationRates rates;
  int velocity_nodes = 8;
  double temperature_k = 353.15;
  EngineSettings engine;
};

Engine make_engine(const SimulationSetup& setup);

struct SweepPoint {
  double omega = 0.0; // rad/s
  bool converged = false;
  int periods = 0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool all_converged = true;
};

// steady-state excitation spectrum over the given drive frequencies;
// points are independent runs mapped over `jobs` workers
SweepResult sweep(const SimulationSetup& base,
                  const std::vector<double>& omegas, int jobs = 1);

std::vector<double> linspace(double lo, double hi, int n);

struct Peak {
  double center = 0.0;  // x units of the scan
  double height = 0.0;
  double baseline = 0.0;
  double hwhm = 0.0;    // NaN when both flanks are cut by the scan edge
  bool partial = false; // a half-height crossing fell outside the scan
  int index = -1;       // grid index of the discrete maximum
};

// local maxima with parabolic vertex refinement and interpolated half-width
// at half height above the local baseline; sorted by height, tallest first
std::vector<Peak> find_peaks(const std::vector<double>& x,
                             const std::vector<double>& y);

// magnetic-resonance reference line: same machinery, epr drive, and the
// resonance shows as a dip of C2, returned as peaks of (baseline - C2)
struct EprReference {
  SweepResult raw;
  std::vector<double> signal;
  std::vector<Peak> peaks;
};
EprReference epr_reference(const SimulationSetup& base,
                           const std::vector<double>& omegas, int jobs = 1);

struct HwhmPoint {
  double gamma = 0.0; // 1/s
  double center = 0.0;
  double hwhm = 0.0;  // Hz on the drive-frequency axis
  bool partial = false;
};

struct HwhmStudy {
  std::vector<HwhmPoint> points;
  double slope = 0.0;             // through-origin least squares
  double max_residual_frac = 0.0; // max |h - slope g| / h
};

// scans an adaptive window around center_hz for each relaxation rate and
// extracts the dominant peak width; mode follows base.drive.mode
HwhmStudy hwhm_vs_gamma(const SimulationSetup& base,
                        const std::vector<double>& gammas, double center_hz,
                        int points_per_scan = 33, int jobs = 1);

struct Calibration {
  double gamma_eff = 0.0; // rad/(s T)
  double r_matched = 0.0;
  double mismatch = 0.0;  // |gamma_eff/gamma_nominal - 1|
};

// identifies the set-A member of a measured peak and returns the effective
// gyromagnetic ratio center / (r B0); throws when nothing matches within 10%
Calibration calibrate_gamma_eff(double center_omega, double b0,
                                const pauli::SetAReport& set_a,
                                double gamma_nominal);

void export_sweep_csv(const std::string& path, const SweepResult& res,
                      const std::string& metadata_json);

} // namespace alkspin
