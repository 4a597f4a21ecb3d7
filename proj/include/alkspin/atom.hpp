#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "alkspin/constants.hpp"

namespace alkspin {

using cdouble = std::complex<double>;
using Mat16 = Eigen::Matrix<cdouble, 16, 16>;
using Mat8 = Eigen::Matrix<cdouble, 8, 8>;
using Mat8d = Eigen::Matrix<double, 8, 8>;
using Mat3c = Eigen::Matrix<cdouble, 3, 3>;
using Mat5c = Eigen::Matrix<cdouble, 5, 5>;
using Vec16d = Eigen::Matrix<double, 16, 1>;

// one hyperfine sublevel |manifold; F, m>
struct BasisLabel {
  bool excited = false;
  int f = 0;
  int m = 0;
};

// spin-F matrices (x, y, z) on the basis m = -F..F ascending
std::array<Eigen::MatrixXcd, 3> spin_matrices(int f);

struct AtomParams {
  double reduced_dipole_cm = constants::rb87::d1_reduced_dipole_cm;
  double ground_splitting_hz = constants::rb87::ground_hf_splitting_hz;
  double excited_splitting_hz = constants::rb87::excited_hf_splitting_hz;
  double carrier_frequency_hz = constants::rb87::d1_frequency_hz;
  double g_j = constants::rb87::g_j_ground;
  double g_i = constants::rb87::g_i;
  double mass = constants::rb87::mass;
};

// Everything static about the 16-level D1 system, in the frame rotating at
// the pump carrier.  Basis order: ground F=1 (m=-1..1), ground F=2
// (m=-2..2), excited F'=1 (m=-1..1), excited F'=2 (m=-2..2).
struct AtomSystem {
  static constexpr int dim = 16;
  static constexpr int g1 = 0, g2 = 3, e1 = 8, e2 = 11; // block starts

  AtomParams params;
  std::array<BasisLabel, 16> labels;

  // rotating-frame energy offsets (rad/s); the detuning term is added per
  // velocity class by the evolution engine
  Vec16d offsets;

  Vec16d pg_diag, pe_diag; // ground / excited projector diagonals

  // spin operators per hyperfine manifold, index 0,1,2 = x,y,z
  std::array<Mat3c, 3> f_g1, f_e1;
  std::array<Mat5c, 3> f_g2, f_e2;

  // sigma+ raising dipole P_e (d.l+) P_g, units C m
  Mat16 dplus;
  struct DipoleEntry {
    int row, col; // row excited, col ground
    double amp;
  };
  std::vector<DipoleEntry> dplus_entries;

  // coupled <- uncoupled change of basis, C[(F,m),(m_I,m_J)], applies to
  // either electronic manifold (J = J' = 1/2)
  Mat8d cg_map;

  double g_f1 = 0.0, g_f2 = 0.0;       // Lande factors
  double gamma_f1 = 0.0, gamma_f2 = 0.0; // g_F mu_B / hbar, rad/(s T)
  double omega_hf_g = 0.0, omega_hf_e = 0.0; // splittings, rad/s
  double wavevector = 0.0;             // pump k, rad/m

  int block_start(bool excited, int f) const {
    return excited ? (f == 1 ? e1 : e2) : (f == 1 ? g1 : g2);
  }
  int index_of(bool excited, int f, int m) const {
    return block_start(excited, f) + (m + f);
  }
};

AtomSystem build_atom_system(const AtomParams& params = {});

// checks the dipole respects sigma+ selection rules (ground -> excited,
// m' = m+1, |F'-F| <= 1) and that line strengths sum as they must
bool selection_rule_audit(const AtomSystem& sys);

// unpolarized ground-state mixture, the fixed point of uniform relaxation
Mat16 equilibrium_state(const AtomSystem& sys);

} // namespace alkspin
