#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "alkspin/atom.hpp"
#include "alkspin/field.hpp"
#include "alkspin/rates.hpp"
#include "alkspin/velocity.hpp"

namespace alkspin {

enum class Tier { full, reduced };

struct EngineSettings {
  Tier tier = Tier::reduced;
  double dt_override = 0.0;        // s, 0 = automatic
  int samples_per_period = 256;    // also the steady-state comparison grid
  double steady_rel_tol = 1e-6;    // period-to-period relative change
  double max_periods_factor = 20.0; // N_max = ceil(factor / (gamma T))
};

// ensemble-averaged ground-manifold spin polarizations at one instant
struct SpinSample {
  double t = 0.0;
  Eigen::Vector3d s1 = Eigen::Vector3d::Zero(); // Tr(rho_g1 F1)
  Eigen::Vector3d s2 = Eigen::Vector3d::Zero(); // Tr(rho_g2 F2)
  Eigen::Vector3d b = Eigen::Vector3d::Zero();  // drive field, tesla
};

struct SteadyResult {
  bool converged = false;
  int periods = 0;              // periods integrated before the sampled one
  double rel_change = 0.0;      // last period-to-period relative change
  double dt = 0.0;
  int steps_per_period = 0;
  std::vector<SpinSample> period_samples; // one period, endpoint included
  std::vector<SpinSample> strobe;         // one sample per period start
};

struct FixedRunResult {
  double dt = 0.0;
  std::vector<double> t;
  // ensemble-averaged ground populations (8 columns) per checkpoint
  std::vector<Eigen::Matrix<double, 8, 1>> ground_pops;
  std::vector<SpinSample> samples;
};

struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// reduced-tier node state: ground and excited 8x8 blocks, block-diagonal in
// F by construction (hyperfine coherences are dropped at this tier)
struct NodeStateRed {
  Mat8 g = Mat8::Zero();
  Mat8 e = Mat8::Zero();
};

// linear repopulation map from the excited 8x8 block into the ground 8x8
// block (uncouple, trace out the electron, refill with a maximally mixed
// electron, recouple), stored sparse; indices are column-major flat offsets
struct RepopMap {
  struct Entry {
    int out, in;
    double w;
  };
  std::vector<Entry> full;    // all 64 -> 64 couplings
  std::vector<Entry> reduced; // restricted to F-diagonal blocks
};
RepopMap build_repop_map(const AtomSystem& sys);

// reduced-tier pump superoperator, precomputed per velocity node: the
// dipole blocks have at most one entry per row/column, so V'V and VV' are
// diagonal and the sandwich terms become weighted index maps.  Entry (r, c)
// of the ground block decays at g_rate(r) + g_rate(c); gains transport
// between the blocks and also fold in the spontaneous repopulation.
struct NodePumpTable {
  Eigen::Matrix<double, 8, 1> g_rate = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 1> e_rate = Eigen::Matrix<double, 8, 1>::Zero();
  std::vector<RepopMap::Entry> g_gain; // d.g[out] += w * e[in]
  std::vector<RepopMap::Entry> e_gain; // d.e[out] += w * g[in]
};

class Engine {
 public:
  Engine(const AtomSystem& sys, const DriveConfig& drive,
         const PumpConfig& pump, const RelaxationRates& rates,
         const VelocityGrid& grid, const EngineSettings& settings);

  double dt() const { return dt_; }
  int steps_per_period() const { return steps_per_period_; }
  double time() const { return t_; }
  const VelocityGrid& grid() const { return grid_; }

  void reset(); // unpolarized ground state in every velocity class, t = 0
  void advance_steps(int n);
  SpinSample sample() const;
  Eigen::Matrix<double, 8, 1> ground_populations() const;
  Mat16 ensemble_density() const; // averaged over velocity classes

  SteadyResult evolve_to_steady();
  FixedRunResult evolve_fixed(double duration, int checkpoints);

 private:
  void pick_dt();
  void build_pump_tables();
  void rk4_step();
  void derivative_red(double t, const std::vector<NodeStateRed>& y,
                      std::vector<NodeStateRed>& dy) const;
  void derivative_full(double t, const std::vector<Mat16>& y,
                       std::vector<Mat16>& dy) const;
  void post_step_check();

  AtomSystem sys_;
  DriveConfig drive_;
  PumpConfig pump_;
  RelaxationRates rates_;
  VelocityGrid grid_;
  EngineSettings set_;

  double dt_ = 0.0;
  int steps_per_period_ = 0;
  double t_ = 0.0;
  long step_index_ = 0;

  // pump coupling split into F -> F' channels (real amplitudes, rad/s)
  Eigen::Matrix3d v11_;                 // g1 -> e1
  Eigen::Matrix<double, 3, 5> v12_;     // g2 -> e1
  Eigen::Matrix<double, 5, 3> v21_;     // g1 -> e2
  Eigen::Matrix<double, 5, 5> v22_;     // g2 -> e2
  // per node, per channel: delta_dec / (delta_dec^2 + Delta_channel^2),
  // the Lorentzian excitation-rate coefficient of the rate-form elimination
  std::vector<std::array<double, 4>> lorentz_;
  std::vector<double> detuning_eff_; // per node, rad/s

  RepopMap repop_;
  std::vector<NodePumpTable> pump_red_; // reduced tier only, one per node

  std::vector<NodeStateRed> red_, red_k1_, red_k2_, red_k3_, red_k4_, red_tmp_;
  std::vector<Mat16> full_, full_k1_, full_k2_, full_k3_, full_k4_, full_tmp_;
};

} // namespace alkspin
