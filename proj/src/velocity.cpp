#include "alkspin/velocity.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "alkspin/constants.hpp"

namespace alkspin {

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");

  // Golub-Welsch on the Hermite Jacobi matrix (zero diagonal, beta_k =
  // sqrt(k/2)); nodes are eigenvalues, weights sqrt(pi) * q0^2
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);

  GaussHermite gh;
  gh.x.resize(n);
  gh.w.resize(n);
  const double sqrt_pi = std::sqrt(constants::pi);
  for (int i = 0; i < n; ++i) {
    gh.x[i] = es.eigenvalues()(i);
    const double q0 = es.eigenvectors()(0, i);
    gh.w[i] = sqrt_pi * q0 * q0;
  }
  return gh;
}

double thermal_speed(double temperature_k, double mass) {
  return std::sqrt(2.0 * constants::k_boltzmann * temperature_k / mass);
}

VelocityGrid build_velocity_grid(int n, double temperature_k, double mass) {
  const auto gh = gauss_hermite(n);
  VelocityGrid grid;
  grid.u = thermal_speed(temperature_k, mass);
  grid.v.resize(n);
  grid.w.resize(n);
  const double sqrt_pi = std::sqrt(constants::pi);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    grid.v[i] = grid.u * gh.x[i];
    grid.w[i] = gh.w[i] / sqrt_pi;
    sum += grid.w[i];
  }
  for (auto& w : grid.w) w /= sum; // exact unit mass despite roundoff
  return grid;
}

} // namespace alkspin
