#include "alkspin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "alkspin/constants.hpp"
#include "alkspin/observables.hpp"
#include "alkspin/parallel.hpp"

namespace alkspin {

Engine make_engine(const SimulationSetup& setup) {
  const AtomSystem sys = build_atom_system(setup.atom);
  const VelocityGrid grid = build_velocity_grid(
      setup.velocity_nodes, setup.temperature_k, setup.atom.mass);
  return Engine(sys, setup.drive, setup.pump, setup.rates, grid, setup.engine);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

SweepResult sweep(const SimulationSetup& base,
                  const std::vector<double>& omegas, int jobs) {
  SweepResult res;
  res.points.resize(omegas.size());
  parallel_for(static_cast<int>(omegas.size()), jobs, [&](int i) {
    SimulationSetup setup = base;
    setup.drive.omega = omegas[i];
    Engine eng = make_engine(setup);
    const SteadyResult steady = eng.evolve_to_steady();
    SweepPoint& pt = res.points[i];
    pt.omega = omegas[i];
    pt.converged = steady.converged;
    pt.periods = steady.periods;
    pt.c1 = convolution_c1(steady.period_samples);
    pt.c2 = convolution_c2(steady.period_samples);
  });
  for (const auto& pt : res.points)
    if (!pt.converged) res.all_converged = false;
  return res;
}

std::vector<Peak> find_peaks(const std::vector<double>& x,
                             const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n != static_cast<int>(y.size()) || n < 3)
    throw std::invalid_argument("find_peaks: need matching arrays, n >= 3");
  for (int i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("find_peaks: x must increase strictly");

  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;

    Peak p;
    p.index = i;
    // parabolic vertex through the three points around the maximum
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if (denom < 0.0) {
      const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
      const double hx = 0.5 * (x[i + 1] - x[i - 1]);
      p.center = x[i] + shift * hx;
      p.height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift;
    } else {
      p.center = x[i];
      p.height = y[i];
    }

    // walk to the bracketing valleys for a local baseline
    int lo = i, hi = i;
    while (lo > 0 && y[lo - 1] <= y[lo]) --lo;
    while (hi + 1 < n && y[hi + 1] <= y[hi]) ++hi;
    p.baseline = std::min(y[lo], y[hi]);

    const double half = p.baseline + 0.5 * (p.height - p.baseline);
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = std::numeric_limits<double>::quiet_NaN();
    for (int k = i; k > 0; --k) {
      if (y[k - 1] < half && y[k] >= half) {
        left = x[k - 1] + (x[k] - x[k - 1]) * (half - y[k - 1]) / (y[k] - y[k - 1]);
        break;
      }
    }
    for (int k = i; k + 1 < n; ++k) {
      if (y[k + 1] < half && y[k] >= half) {
        right = x[k] + (x[k + 1] - x[k]) * (y[k] - half) / (y[k] - y[k + 1]);
        break;
      }
    }
    const bool has_l = std::isfinite(left), has_r = std::isfinite(right);
    p.partial = !(has_l && has_r);
    if (has_l && has_r)
      p.hwhm = 0.5 * ((p.center - left) + (right - p.center));
    else if (has_l)
      p.hwhm = p.center - left;
    else if (has_r)
      p.hwhm = right - p.center;
    else
      p.hwhm = std::numeric_limits<double>::quiet_NaN();

    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

EprReference epr_reference(const SimulationSetup& base,
                           const std::vector<double>& omegas, int jobs) {
  SimulationSetup setup = base;
  setup.drive.mode = DriveConfig::Mode::epr;
  setup.drive.validate();

  EprReference ref;
  ref.raw = sweep(setup, omegas, jobs);

  double top = 0.0;
  for (const auto& pt : ref.raw.points) top = std::max(top, pt.c2);
  ref.signal.reserve(ref.raw.points.size());
  for (const auto& pt : ref.raw.points) ref.signal.push_back(top - pt.c2);
  ref.peaks = find_peaks(omegas, ref.signal);
  return ref;
}

HwhmStudy hwhm_vs_gamma(const SimulationSetup& base,
                        const std::vector<double>& gammas, double center_hz,
                        int points_per_scan, int jobs) {
  HwhmStudy study;
  for (double g : gammas) {
    SimulationSetup setup = base;
    setup.rates.gamma = g;

    // span scales with the relaxation rate; widen until the half-height
    // crossings land inside the scan
    double span_hz = 1.2 * g / constants::two_pi;
    HwhmPoint hp;
    hp.gamma = g;
    bool ok = false;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt, span_hz *= 2.0) {
      const auto omegas =
          linspace(constants::two_pi * (center_hz - span_hz),
                   constants::two_pi * (center_hz + span_hz), points_per_scan);
      std::vector<double> y;
      std::vector<Peak> peaks;
      if (setup.drive.mode == DriveConfig::Mode::epr) {
        const EprReference ref = epr_reference(setup, omegas, jobs);
        peaks = ref.peaks;
      } else {
        const SweepResult res = sweep(setup, omegas, jobs);
        y.reserve(res.points.size());
        for (const auto& pt : res.points) y.push_back(pt.c2);
        peaks = find_peaks(omegas, y);
      }
      if (peaks.empty()) continue;
      const Peak& p = peaks.front();
      if (p.partial || !std::isfinite(p.hwhm)) continue;
      // demand a resolved width: at least two grid steps
      const double step = (omegas.back() - omegas.front()) / (points_per_scan - 1);
      if (p.hwhm < 2.0 * step) {
        span_hz *= 0.25; // too coarse: tighten instead of widen
        ok = false;
        continue;
      }
      hp.center = p.center / constants::two_pi;
      hp.hwhm = p.hwhm / constants::two_pi;
      hp.partial = false;
      ok = true;
    }
    if (!ok)
      throw std::runtime_error(
          "hwhm_vs_gamma: could not resolve the line width for gamma=" +
          std::to_string(g));
    study.points.push_back(hp);
  }

  double num = 0.0, den = 0.0;
  for (const auto& p : study.points) {
    num += p.gamma * p.hwhm;
    den += p.gamma * p.gamma;
  }
  study.slope = den > 0.0 ? num / den : 0.0;
  for (const auto& p : study.points) {
    const double resid = std::abs(p.hwhm - study.slope * p.gamma) /
                         std::max(p.hwhm, 1e-300);
    study.max_residual_frac = std::max(study.max_residual_frac, resid);
  }
  return study;
}

Calibration calibrate_gamma_eff(double center_omega, double b0,
                                const pauli::SetAReport& set_a,
                                double gamma_nominal) {
  if (set_a.roots.empty())
    throw std::invalid_argument("calibrate: empty set A");
  Calibration best;
  best.mismatch = std::numeric_limits<double>::max();
  for (const auto& root : set_a.roots) {
    const double geff = center_omega / (root.r * b0);
    const double mis = std::abs(geff / gamma_nominal - 1.0);
    if (mis < best.mismatch) {
      best.gamma_eff = geff;
      best.r_matched = root.r;
      best.mismatch = mis;
    }
  }
  if (best.mismatch > 0.10)
    throw std::runtime_error(
        "calibrate: no set-A member matches the measured line within 10%");
  return best;
}

void export_sweep_csv(const std::string& path, const SweepResult& res,
                      const std::string& metadata_json) {
  std::ostringstream os;
  if (!metadata_json.empty()) os << "# " << metadata_json << "\n";
  os << "# omega_hz,c1,c2,converged,periods\n";
  for (const auto& pt : res.points) {
    os << format_double(pt.omega / constants::two_pi) << ','
       << format_double(pt.c1) << ',' << format_double(pt.c2) << ','
       << (pt.converged ? 1 : 0) << ',' << pt.periods << "\n";
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << os.str();
}

} // namespace alkspin
