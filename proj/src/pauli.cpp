#include "alkspin/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alkspin/constants.hpp"

namespace alkspin::pauli {

namespace {

using Eigen::Matrix2cd;
using Eigen::Vector2cd;
using Eigen::Vector3d;

constexpr std::complex<double> kI{0.0, 1.0};

inline Matrix2cd hamiltonian(const Vector3d& b) {
  // b . sigma/2
  Matrix2cd h;
  h(0, 0) = 0.5 * b.z();
  h(0, 1) = 0.5 * std::complex<double>(b.x(), -b.y());
  h(1, 0) = 0.5 * std::complex<double>(b.x(), b.y());
  h(1, 1) = -0.5 * b.z();
  return h;
}

inline Matrix2cd polar_unitary(const Matrix2cd& u) {
  // closest unitary via SVD (2x2, used rarely)
  Eigen::JacobiSVD<Matrix2cd> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double unitarity_defect(const Matrix2cd& u) {
  return (u.adjoint() * u - Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

// one RK4 step of dU = -i H(tau) U
inline void rk4(const Field& field, double tau, double h, Matrix2cd& u) {
  const Matrix2cd k1 = -kI * (hamiltonian(field(tau)) * u);
  const Matrix2cd k2 =
      -kI * (hamiltonian(field(tau + 0.5 * h)) * (u + 0.5 * h * k1));
  const Matrix2cd k3 =
      -kI * (hamiltonian(field(tau + 0.5 * h)) * (u + 0.5 * h * k2));
  const Matrix2cd k4 = -kI * (hamiltonian(field(tau + h)) * (u + h * k3));
  u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

long step_count(double period, double dtau_max) {
  if (!(period > 0.0) || !(dtau_max > 0.0))
    throw std::invalid_argument("pauli: period and dtau must be > 0");
  const long n = static_cast<long>(std::ceil(period / dtau_max));
  return std::max<long>(n, 4096); // at least 4096 steps over one period
}

} // namespace

Field dual_harmonic_field(double r) {
  return [r](double tau) {
    return Vector3d(std::cos(2.0 * r * tau), 0.0, std::cos(r * tau));
  };
}

Monodromy propagate(const Field& field, double period, double tau0,
                    double dtau_max) {
  for (int attempt = 0;; ++attempt) {
    const long n = step_count(period, dtau_max);
    const double h = period / n;
    Matrix2cd u = Matrix2cd::Identity();
    for (long k = 0; k < n; ++k) {
      rk4(field, tau0 + k * h, h, u);
      if ((k & 255) == 255) u = polar_unitary(u);
    }
    const double defect = unitarity_defect(u);
    if (defect <= 1e-8) {
      Monodromy m;
      m.u = u;
      const std::complex<double> tr = u.trace();
      m.deviation = 2.0 - std::abs(tr);
      m.trace_sign = tr.real() >= 0.0 ? 1.0 : -1.0;
      m.unitarity_defect = defect;
      m.period = period;
      m.dtau = h;
      m.steps = n;
      return m;
    }
    if (attempt >= 2)
      throw std::runtime_error(
          "pauli: unitarity defect above 1e-8, step size too coarse");
    dtau_max *= 0.5;
  }
}

Monodromy monodromy(double r, double tau0, double dtau_max) {
  if (!(r > 0.0)) throw std::invalid_argument("pauli: r must be > 0");
  const double period = constants::two_pi / r;
  return propagate(dual_harmonic_field(r), period, tau0, dtau_max);
}

SetAReport scan_set_a(double r_min, double r_max, int grid,
                      double accept_threshold) {
  if (!(r_min > 0.0) || !(r_max > r_min) || grid < 8)
    throw std::invalid_argument("pauli: bad scan range");

  SetAReport rep;
  rep.r_min = r_min;
  rep.r_max = r_max;
  rep.grid = grid;
  rep.accept_threshold = accept_threshold;

  std::vector<double> dev(grid);
  const double dr = (r_max - r_min) / (grid - 1);
  for (int i = 0; i < grid; ++i)
    dev[i] = monodromy(r_min + i * dr).deviation;

  const auto dev_at = [](double r) { return monodromy(r).deviation; };

  for (int i = 1; i + 1 < grid; ++i) {
    if (!(dev[i] < dev[i - 1] && dev[i] <= dev[i + 1])) continue;
    if (dev[i] >= 0.5) continue; // shallow wiggles are not candidate roots

    // golden-section refinement of the bracketed minimum
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = r_min + (i - 1) * dr, b = r_min + (i + 1) * dr;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dev_at(c), fd = dev_at(d);
    while (b - a > 1e-10) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = dev_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = dev_at(d);
      }
    }
    const double r_star = 0.5 * (a + b);
    const auto m = monodromy(r_star);
    if (m.deviation < accept_threshold) {
      if (!rep.roots.empty() && std::abs(rep.roots.back().r - r_star) < 1e-6)
        continue;
      rep.roots.push_back({r_star, m.deviation, m.trace_sign});
    }
  }
  std::sort(rep.roots.begin(), rep.roots.end(),
            [](const Root& a, const Root& b) { return a.r > b.r; });
  return rep;
}

AveragedSpin averaged_spin(const Field& field, double period, double r,
                           double tau0, double dtau_max) {
  const long n = step_count(period, dtau_max);
  const double h = period / n;

  AveragedSpin out;
  out.r = r;
  out.tau0 = tau0;

  const Vector2cd inits[3] = {
      Vector2cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)),
      Vector2cd(1.0 / std::sqrt(2.0), kI / std::sqrt(2.0)),
      Vector2cd(1.0, 0.0)};

  for (int row = 0; row < 3; ++row) {
    Matrix2cd u = Matrix2cd::Identity();
    Vector3d acc = Vector3d::Zero();
    Vector2cd phi = inits[row];
    for (long k = 0; k < n; ++k) {
      // accumulate <S> at the left endpoint; the orbit is periodic at a
      // monodromy root so a plain mean is the exact period average
      const std::complex<double> a = phi(0), b = phi(1);
      acc.x() += (std::conj(a) * b).real();
      acc.y() += (std::conj(a) * b).imag();
      acc.z() += 0.5 * (std::norm(a) - std::norm(b));
      rk4(field, tau0 + k * h, h, u);
      if ((k & 255) == 255) u = polar_unitary(u);
      phi = u * inits[row];
    }
    out.table.row(row) = (acc / static_cast<double>(n)).transpose();
  }
  return out;
}

AveragedSpin averaged_spin(double r, double tau0, double dtau_max) {
  const double period = constants::two_pi / r;
  // period averages are only meaningful on (near-)periodic orbits
  if (monodromy(r, 0.0, dtau_max).deviation > 1e-3)
    throw std::invalid_argument(
        "pauli: averaged_spin needs a monodromy root (deviation <= 1e-3)");
  return averaged_spin(dual_harmonic_field(r), period, r, tau0, dtau_max);
}

bool structural_zero_audit(const AveragedSpin& avg, double tol) {
  return std::abs(avg.table(0, 1)) < tol && std::abs(avg.table(1, 0)) < tol &&
         std::abs(avg.table(1, 2)) < tol && std::abs(avg.table(2, 1)) < tol;
}

bool structural_zero_audit(const SetAReport& report, double tol) {
  for (const auto& root : report.roots)
    if (!structural_zero_audit(averaged_spin(root.r), tol)) return false;
  return true;
}

} // namespace alkspin::pauli
