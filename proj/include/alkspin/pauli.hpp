#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace alkspin::pauli {

// dimensionless two-level problem: i dphi/dtau = (b(tau) . S) phi with
// S = sigma/2, tau = gamma B0 t, and the dual-harmonic unit field
//   b(tau) = (cos(2 r tau), 0, cos(r tau)),  r = Omega / (gamma B0)
using Field = std::function<Eigen::Vector3d(double)>;

Field dual_harmonic_field(double r);

struct Monodromy {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  double deviation = 0.0;        // 2 - |tr U|; zero iff U = +-1 (up to phase)
  double trace_sign = 1.0;       // sign of Re tr U
  double unitarity_defect = 0.0; // ||U^dag U - 1||_inf at the end
  double period = 0.0;
  double dtau = 0.0;
  long steps = 0;
};

// propagates dU/dtau = -i (b.S) U over [tau0, tau0 + period]
Monodromy propagate(const Field& field, double period, double tau0 = 0.0,
                    double dtau_max = 0.005);

Monodromy monodromy(double r, double tau0 = 0.0, double dtau_max = 0.005);

struct Root {
  double r = 0.0;
  double deviation = 0.0;
  double trace_sign = 1.0;
};

struct SetAReport {
  double r_min = 0.0, r_max = 0.0;
  int grid = 0;
  double accept_threshold = 0.0;
  std::vector<Root> roots;
};

// scans the deviation over [r_min, r_max], refines every bracketed local
// minimum by golden section, and keeps minima below accept_threshold
SetAReport scan_set_a(double r_min = 0.05, double r_max = 0.35,
                      int grid = 3001, double accept_threshold = 1e-6);

// period averages of <S> for the three stretched initial states; rows are
// the initial state (+x, +y, +z), columns the averaged components
struct AveragedSpin {
  double r = 0.0;
  double tau0 = 0.0;
  Eigen::Matrix3d table = Eigen::Matrix3d::Zero();
};

AveragedSpin averaged_spin(double r, double tau0 = 0.0,
                           double dtau_max = 0.005);
AveragedSpin averaged_spin(const Field& field, double period, double r,
                           double tau0, double dtau_max = 0.005);

// the drive confines the field to the x-z plane, which forces four exact
// zeros in the averaged-spin table: (x,<Sy>), (y,<Sx>), (y,<Sz>), (z,<Sy>)
bool structural_zero_audit(const AveragedSpin& avg, double tol = 1e-6);
bool structural_zero_audit(const SetAReport& report, double tol = 1e-6);

} // namespace alkspin::pauli
