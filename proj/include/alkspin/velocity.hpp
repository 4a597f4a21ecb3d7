#pragma once

#include <vector>

namespace alkspin {

// Gauss-Hermite nodes/weights for integral f -> sum w_i f(x_i) against
// exp(-x^2), weights normalized so they sum to sqrt(pi)
struct GaussHermite {
  std::vector<double> x, w;
};
GaussHermite gauss_hermite(int n);

// 1D Maxwell-Boltzmann discretization along the pump axis
struct VelocityGrid {
  std::vector<double> v; // m/s
  std::vector<double> w; // probability weights, sum to 1
  double u = 0.0;        // most probable speed sqrt(2 kB T / m)
};

double thermal_speed(double temperature_k, double mass);
VelocityGrid build_velocity_grid(int n, double temperature_k, double mass);

} // namespace alkspin
