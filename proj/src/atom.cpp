#include "alkspin/atom.hpp"

#include <cmath>

#include "alkspin/wigner.hpp"

namespace alkspin {

namespace {

double lande_g(double g_j, double g_i, int f) {
  const double I = constants::rb87::nuclear_spin;
  const double J = 0.5;
  const double ff = f * (f + 1.0);
  const double ii = I * (I + 1.0);
  const double jj = J * (J + 1.0);
  return g_j * (ff - ii + jj) / (2.0 * ff) + g_i * (ff + ii - jj) / (2.0 * ff);
}

// hyperfine-resolved reduced dipole, relative to <J'||d||J>:
//   <e F' || d || g F> / <J'||d||J>
//     = (-1)^(F+I+J'+1) sqrt(2F+1) {J' F' I; F J 1}
double hf_dipole_factor(int f_g, int f_e) {
  const int dI = 3, dJ = 1;
  const double sixj = wigner::six_j(dJ, 2 * f_e, dI, 2 * f_g, dJ, 2);
  const int phase_exp = f_g + 2 + 1; // F + I + J' + 1 with I+J' = 2
  const double phase = (phase_exp % 2 == 0) ? 1.0 : -1.0;
  return phase * std::sqrt(2.0 * f_g + 1.0) * sixj;
}

} // namespace

std::array<Eigen::MatrixXcd, 3> spin_matrices(int f) {
  const int n = 2 * f + 1;
  Eigen::MatrixXcd fp = Eigen::MatrixXcd::Zero(n, n); // raising
  Eigen::MatrixXcd fz = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = k - f;
    fz(k, k) = m;
    if (k + 1 < n) fp(k + 1, k) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd fm = fp.adjoint();
  std::array<Eigen::MatrixXcd, 3> out;
  out[0] = 0.5 * (fp + fm);
  out[1] = cdouble(0.0, -0.5) * (fp - fm);
  out[2] = fz;
  return out;
}

AtomSystem build_atom_system(const AtomParams& params) {
  AtomSystem sys;
  sys.params = params;

  int idx = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const bool excited = pass == 1;
    for (int f = 1; f <= 2; ++f)
      for (int m = -f; m <= f; ++m) sys.labels[idx++] = {excited, f, m};
  }

  sys.omega_hf_g = constants::two_pi * params.ground_splitting_hz;
  sys.omega_hf_e = constants::two_pi * params.excited_splitting_hz;
  sys.wavevector =
      constants::two_pi * params.carrier_frequency_hz / constants::speed_of_light;

  // carrier referenced to F=1 -> F'=2, so those two levels sit at zero
  for (int i = 0; i < 16; ++i) {
    const auto& l = sys.labels[i];
    double w = 0.0;
    if (!l.excited && l.f == 2) w = sys.omega_hf_g;
    if (l.excited && l.f == 1) w = -sys.omega_hf_e;
    sys.offsets[i] = w;
    sys.pg_diag[i] = l.excited ? 0.0 : 1.0;
    sys.pe_diag[i] = l.excited ? 1.0 : 0.0;
  }

  const auto s1 = spin_matrices(1);
  const auto s2 = spin_matrices(2);
  for (int c = 0; c < 3; ++c) {
    sys.f_g1[c] = s1[c];
    sys.f_e1[c] = s1[c];
    sys.f_g2[c] = s2[c];
    sys.f_e2[c] = s2[c];
  }

  sys.g_f1 = lande_g(params.g_j, params.g_i, 1);
  sys.g_f2 = lande_g(params.g_j, params.g_i, 2);
  sys.gamma_f1 = sys.g_f1 * constants::mu_b_over_hbar;
  sys.gamma_f2 = sys.g_f2 * constants::mu_b_over_hbar;

  sys.dplus.setZero();
  for (int fg = 1; fg <= 2; ++fg) {
    for (int fe = 1; fe <= 2; ++fe) {
      const double hf = hf_dipole_factor(fg, fe);
      for (int m = -fg; m <= fg; ++m) {
        if (m + 1 < -fe || m + 1 > fe) continue;
        const double cg =
            wigner::clebsch_gordan(2 * fg, 2 * m, 2, 2, 2 * fe, 2 * (m + 1));
        const double amp = params.reduced_dipole_cm * hf * cg;
        if (amp == 0.0) continue;
        const int row = sys.index_of(true, fe, m + 1);
        const int col = sys.index_of(false, fg, m);
        sys.dplus(row, col) = amp;
        sys.dplus_entries.push_back({row, col, amp});
      }
    }
  }

  // |F m> = sum_{mI+mJ=m} <I mI; J mJ|F m> |mI>|mJ>, uncoupled index
  // u = 2*(mI + 3/2) + (mJ + 1/2)
  sys.cg_map.setZero();
  for (int f = 1; f <= 2; ++f) {
    for (int m = -f; m <= f; ++m) {
      const int c = (f == 1 ? 0 : 3) + (m + f);
      for (int dmi = -3; dmi <= 3; dmi += 2) {
        for (int dmj = -1; dmj <= 1; dmj += 2) {
          if (dmi + dmj != 2 * m) continue;
          const int u = 2 * ((dmi + 3) / 2) + (dmj + 1) / 2;
          sys.cg_map(c, u) =
              wigner::clebsch_gordan(3, dmi, 1, dmj, 2 * f, 2 * m);
        }
      }
    }
  }

  return sys;
}

bool selection_rule_audit(const AtomSystem& sys) {
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      if (std::abs(sys.dplus(r, c)) == 0.0) continue;
      const auto& er = sys.labels[r];
      const auto& gc = sys.labels[c];
      if (!er.excited || gc.excited) return false;
      if (er.m != gc.m + 1) return false;
      if (std::abs(er.f - gc.f) > 1) return false;
      if (sys.dplus(r, c).imag() != 0.0) return false;
    }
  }

  // line strengths: sum over F' of (2F'+1)(2J+1) {J J' 1; F' F I}^2 is 1
  // for each ground F, and the D1 ratios are 1:5 (F=1) and 1:1 (F=2)
  const auto strength = [&](int fg, int fe) {
    const double hf = hf_dipole_factor(fg, fe);
    // S_FF' = (2F'+1)(2J+1) {J J' 1; F' F I}^2 = hf^2 (2F'+1)(2J+1)/(2F+1)
    return hf * hf * 2.0 * (2.0 * fe + 1.0) / (2.0 * fg + 1.0);
  };
  const double s11 = strength(1, 1), s12 = strength(1, 2);
  const double s21 = strength(2, 1), s22 = strength(2, 2);
  const double tol = 1e-12;
  if (std::abs(s11 + s12 - 1.0) > tol) return false;
  if (std::abs(s21 + s22 - 1.0) > tol) return false;
  if (std::abs(s12 / s11 - 5.0) > 1e-9) return false;
  if (std::abs(s22 / s21 - 1.0) > 1e-9) return false;
  return true;
}

Mat16 equilibrium_state(const AtomSystem& sys) {
  Mat16 rho = Mat16::Zero();
  for (int i = 0; i < 16; ++i)
    if (!sys.labels[i].excited) rho(i, i) = 1.0 / 8.0;
  return rho;
}

} // namespace alkspin
