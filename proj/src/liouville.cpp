#include "alkspin/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace alkspin {

namespace {

constexpr cdouble kMinusI{0.0, -1.0};

// block layout inside the 8x8 ground / excited matrices
constexpr int kB1 = 0; // F=1 block start (3 states)
constexpr int kB2 = 3; // F=2 block start (5 states)

inline void hermitize(Mat8& m) {
  Mat8 a = m.adjoint();
  m = 0.5 * (m + a);
}

inline void hermitize(Mat16& m) {
  Mat16 a = m.adjoint();
  m = 0.5 * (m + a);
}

} // namespace

RepopMap build_repop_map(const AtomSystem& sys) {
  const Mat8d& c = sys.cg_map; // coupled <- uncoupled
  RepopMap map;

  // column k of the uncoupled labels: mJ index = k % 2, mI index = k / 2
  for (int in_r = 0; in_r < 8; ++in_r) {
    for (int in_c = 0; in_c < 8; ++in_c) {
      // rho_unc = C^T E_(in_r,in_c) C, then trace out the electron
      Eigen::Matrix4d nuc = Eigen::Matrix4d::Zero();
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          if (u % 2 != v % 2) continue; // electron diagonal
          nuc(u / 2, v / 2) += c(in_r, u) * c(in_c, v);
        }
      }
      // refill electron maximally mixed and recouple
      for (int out_r = 0; out_r < 8; ++out_r) {
        for (int out_c = 0; out_c < 8; ++out_c) {
          double w = 0.0;
          for (int u = 0; u < 8; ++u)
            for (int v = 0; v < 8; ++v) {
              if (u % 2 != v % 2) continue;
              w += c(out_r, u) * c(out_c, v) * 0.5 * nuc(u / 2, v / 2);
            }
          if (std::abs(w) < 1e-15) continue;
          const int out = out_c * 8 + out_r; // column-major flat index
          const int in = in_c * 8 + in_r;
          map.full.push_back({out, in, w});
          const bool in_diag = (in_r < kB2) == (in_c < kB2);
          const bool out_diag = (out_r < kB2) == (out_c < kB2);
          if (in_diag && out_diag) map.reduced.push_back({out, in, w});
        }
      }
    }
  }
  return map;
}

Engine::Engine(const AtomSystem& sys, const DriveConfig& drive,
               const PumpConfig& pump, const RelaxationRates& rates,
               const VelocityGrid& grid, const EngineSettings& settings)
    : sys_(sys),
      drive_(drive),
      pump_(pump),
      rates_(rates),
      grid_(grid),
      set_(settings) {
  drive_.validate();
  pump_.validate();
  rates_.validate();
  if (grid_.v.empty()) throw std::invalid_argument("engine: empty velocity grid");
  if (set_.samples_per_period < 16)
    throw std::invalid_argument("engine: samples_per_period must be >= 16");

  // pump channel matrices, prescaled to rad/s
  const double pref = -pump_positive_frequency(pump_);
  v11_.setZero();
  v12_.setZero();
  v21_.setZero();
  v22_.setZero();
  double rabi_max = 0.0;
  for (const auto& en : sys_.dplus_entries) {
    const auto& el = sys_.labels[en.row];
    const auto& gl = sys_.labels[en.col];
    const int er = en.row - sys_.block_start(true, el.f);
    const int gc = en.col - sys_.block_start(false, gl.f);
    const double amp = pref * en.amp;
    rabi_max = std::max(rabi_max, std::abs(amp));
    if (el.f == 1 && gl.f == 1) v11_(er, gc) = amp;
    if (el.f == 1 && gl.f == 2) v12_(er, gc) = amp;
    if (el.f == 2 && gl.f == 1) v21_(er, gc) = amp;
    if (el.f == 2 && gl.f == 2) v22_(er, gc) = amp;
  }

  if (set_.tier == Tier::reduced && rates_.delta_dec <= 0.0)
    throw std::invalid_argument("engine: reduced tier needs delta_dec > 0");
  if (set_.tier == Tier::reduced && rabi_max > 0.1 * rates_.delta_dec)
    throw std::invalid_argument(
        "engine: reduced tier requires the Rabi scale below delta_dec/10");

  // per-node effective detunings and Lorentzian channel coefficients
  const int n = static_cast<int>(grid_.v.size());
  detuning_eff_.resize(n);
  lorentz_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double deff = pump_.detuning - sys_.wavevector * grid_.v[i];
    detuning_eff_[i] = deff;
    // Delta_channel = E_e - E_g in the rotating frame (Zeeman excluded)
    const double d_e1 = -sys_.omega_hf_e - deff;
    const double d_e2 = -deff;
    const std::array<double, 4> delta = {d_e1, d_e1 - sys_.omega_hf_g, d_e2,
                                         d_e2 - sys_.omega_hf_g};
    for (int ch = 0; ch < 4; ++ch)
      lorentz_[i][ch] = rates_.delta_dec /
                        (rates_.delta_dec * rates_.delta_dec +
                         delta[ch] * delta[ch]);
  }

  repop_ = build_repop_map(sys_);
  if (set_.tier == Tier::reduced) build_pump_tables();
  pick_dt();

  const auto zero_red = std::vector<NodeStateRed>(n);
  const auto zero_full = std::vector<Mat16>(n, Mat16::Zero());
  if (set_.tier == Tier::reduced) {
    red_ = red_k1_ = red_k2_ = red_k3_ = red_k4_ = red_tmp_ = zero_red;
  } else {
    full_ = full_k1_ = full_k2_ = full_k3_ = full_k4_ = full_tmp_ = zero_full;
  }
  reset();
}

void Engine::pick_dt() {
  const double T = drive_.period();
  const int samples = set_.samples_per_period;

  double bound;
  if (set_.dt_override > 0.0) {
    bound = set_.dt_override;
  } else {
    const double b_peak = drive_.mode == DriveConfig::Mode::dual_harmonic
                              ? drive_.b0
                              : drive_.b_dc + drive_.b_ac;
    const double zee = std::max(std::abs(sys_.gamma_f1), std::abs(sys_.gamma_f2)) *
                       b_peak * std::sqrt(2.0);
    bound = T / 256.0;
    if (zee > 0.0) bound = std::min(bound, 0.05 / zee);
    // stability: the fastest decaying mode must sit inside the RK4 region.
    // velocity mixing only damps node-difference modes, so it counts only
    // when the grid has more than one node.
    double rate = rates_.gamma + rates_.delta_dcy;
    if (grid_.v.size() > 1) rate += rates_.delta_mix;
    if (set_.tier == Tier::full) {
      rate += rates_.delta_dec;
      double maxfreq = 0.0;
      for (double deff : detuning_eff_)
        maxfreq = std::max({maxfreq, sys_.omega_hf_g,
                            sys_.omega_hf_e + std::abs(deff), std::abs(deff)});
      if (maxfreq > 0.0) bound = std::min(bound, 0.25 / maxfreq);
    }
    if (rate > 0.0) bound = std::min(bound, 2.5 / rate);
  }

  const int chunks = static_cast<int>(std::ceil(T / (samples * bound)));
  steps_per_period_ = samples * std::max(chunks, 1);
  dt_ = T / steps_per_period_;
}

void Engine::reset() {
  t_ = 0.0;
  step_index_ = 0;
  if (set_.tier == Tier::reduced) {
    for (auto& s : red_) {
      s.g = Mat8::Identity() * (1.0 / 8.0);
      s.e.setZero();
    }
  } else {
    const Mat16 rho0 = equilibrium_state(sys_);
    for (auto& s : full_) s = rho0;
  }
}

void Engine::build_pump_tables() {
  // channel entries, local row/col positions inside the 8x8 blocks
  struct Ent {
    int e_loc, g_loc;
    double amp;
  };
  std::array<std::vector<Ent>, 4> chan; // order matches lorentz_
  const auto collect = [](const auto& v, int e_off, int g_off,
                          std::vector<Ent>& out) {
    for (int r = 0; r < v.rows(); ++r)
      for (int c = 0; c < v.cols(); ++c)
        if (v(r, c) != 0.0) out.push_back({e_off + r, g_off + c, v(r, c)});
  };
  collect(v11_, kB1, kB1, chan[0]);
  collect(v12_, kB1, kB2, chan[1]);
  collect(v21_, kB2, kB1, chan[2]);
  collect(v22_, kB2, kB2, chan[3]);

  const int n = static_cast<int>(grid_.v.size());
  pump_red_.assign(n, NodePumpTable{});
  for (int i = 0; i < n; ++i) {
    auto& pt = pump_red_[i];
    for (int ch = 0; ch < 4; ++ch) {
      const double a = lorentz_[i][ch];
      for (const auto& k : chan[ch]) {
        pt.g_rate(k.g_loc) += a * (k.amp * k.amp);
        pt.e_rate(k.e_loc) += a * (k.amp * k.amp);
      }
      for (const auto& k : chan[ch])
        for (const auto& l : chan[ch]) {
          const double w = 2.0 * a * k.amp * l.amp;
          pt.g_gain.push_back({l.g_loc * 8 + k.g_loc, l.e_loc * 8 + k.e_loc, w});
          pt.e_gain.push_back({l.e_loc * 8 + k.e_loc, l.g_loc * 8 + k.g_loc, w});
        }
    }
    if (rates_.delta_dcy > 0.0)
      for (const auto& en : repop_.reduced)
        pt.g_gain.push_back({en.out, en.in, rates_.delta_dcy * en.w});
  }
}

void Engine::derivative_red(double t, const std::vector<NodeStateRed>& y,
                            std::vector<NodeStateRed>& dy) const {
  const Eigen::Vector3d b = field_at(drive_, t);
  const cdouble bx(b.x(), 0.0), by(b.y(), 0.0), bz(b.z(), 0.0);
  const Mat3c h1 =
      sys_.gamma_f1 * (bx * sys_.f_g1[0] + by * sys_.f_g1[1] + bz * sys_.f_g1[2]);
  const Mat5c h2 =
      sys_.gamma_f2 * (bx * sys_.f_g2[0] + by * sys_.f_g2[1] + bz * sys_.f_g2[2]);

  const int n = static_cast<int>(y.size());
  Mat8 gmix = Mat8::Zero(), emix = Mat8::Zero();
  if (rates_.delta_mix > 0.0) {
    for (int i = 0; i < n; ++i) {
      gmix += grid_.w[i] * y[i].g;
      emix += grid_.w[i] * y[i].e;
    }
    gmix *= rates_.delta_mix;
    emix *= rates_.delta_mix;
  }

  const double relax_g = rates_.gamma + rates_.delta_mix;
  const double relax_e = relax_g + rates_.delta_dcy;

  for (int i = 0; i < n; ++i) {
    const auto& s = y[i];
    auto& d = dy[i];
    const NodePumpTable& pt = pump_red_[i];

    // decay, pump rates and velocity mixing, fused entrywise
    for (int c = 0; c < 8; ++c) {
      const double gc = relax_g + pt.g_rate(c);
      const double ec = relax_e + pt.e_rate(c);
      for (int r = 0; r < 8; ++r) {
        d.g(r, c) = gmix(r, c) - (gc + pt.g_rate(r)) * s.g(r, c);
        d.e(r, c) = emix(r, c) - (ec + pt.e_rate(r)) * s.e(r, c);
      }
    }

    // Zeeman commutators act inside the F-diagonal ground blocks
    const Mat3c m1 = h1 * s.g.block<3, 3>(kB1, kB1);
    const Mat5c m2 = h2 * s.g.block<5, 5>(kB2, kB2);
    d.g.block<3, 3>(kB1, kB1) += kMinusI * (m1 - m1.adjoint());
    d.g.block<5, 5>(kB2, kB2) += kMinusI * (m2 - m2.adjoint());

    for (int k = 0; k < 8; ++k) d.g(k, k) += rates_.gamma * 0.125;

    // stimulated transport plus spontaneous repopulation between the blocks
    const cdouble* ein = s.e.data();
    const cdouble* gin = s.g.data();
    cdouble* gout = d.g.data();
    cdouble* eout = d.e.data();
    for (const auto& en : pt.g_gain) gout[en.out] += en.w * ein[en.in];
    for (const auto& en : pt.e_gain) eout[en.out] += en.w * gin[en.in];
  }
}

void Engine::derivative_full(double t, const std::vector<Mat16>& y,
                             std::vector<Mat16>& dy) const {
  const Eigen::Vector3d b = field_at(drive_, t);
  const cdouble bx(b.x(), 0.0), by(b.y(), 0.0), bz(b.z(), 0.0);
  const Mat3c h1 =
      sys_.gamma_f1 * (bx * sys_.f_g1[0] + by * sys_.f_g1[1] + bz * sys_.f_g1[2]);
  const Mat5c h2 =
      sys_.gamma_f2 * (bx * sys_.f_g2[0] + by * sys_.f_g2[1] + bz * sys_.f_g2[2]);

  const int n = static_cast<int>(y.size());
  Mat16 rbar = Mat16::Zero();
  if (rates_.delta_mix > 0.0)
    for (int i = 0; i < n; ++i) rbar += grid_.w[i] * y[i];

  const double relax = rates_.gamma + rates_.delta_mix;

  for (int i = 0; i < n; ++i) {
    const Mat16& s = y[i];
    Mat16& d = dy[i];
    const double deff = detuning_eff_[i];

    // M = H rho, assembled by blocks; [H, rho] = M - M^dagger
    Mat16 m;
    m.block<3, 16>(0, 0) = h1 * s.block<3, 16>(0, 0);
    m.block<5, 16>(3, 0) =
        h2 * s.block<5, 16>(3, 0) + sys_.omega_hf_g * s.block<5, 16>(3, 0);
    m.block<3, 16>(8, 0) = (-sys_.omega_hf_e - deff) * s.block<3, 16>(8, 0);
    m.block<5, 16>(11, 0) = -deff * s.block<5, 16>(11, 0);
    const double pref = -pump_positive_frequency(pump_);
    for (const auto& en : sys_.dplus_entries) {
      const double a = pref * en.amp;
      m.row(en.row) += a * s.row(en.col);
      m.row(en.col) += a * s.row(en.row);
    }

    d = kMinusI * (m - Mat16(m.adjoint()));
    d -= relax * s;
    for (int k = 0; k < 8; ++k) d(k, k) += rates_.gamma * 0.125;
    if (rates_.delta_mix > 0.0) d += rates_.delta_mix * rbar;

    if (rates_.delta_dcy > 0.0) {
      d.block<8, 8>(8, 8) -= rates_.delta_dcy * s.block<8, 8>(8, 8);
      const Mat8 ee = s.block<8, 8>(8, 8);
      Mat8 gg = Mat8::Zero();
      const cdouble* ein = ee.data();
      cdouble* gout = gg.data();
      for (const auto& en : repop_.full)
        gout[en.out] += en.w * ein[en.in];
      d.block<8, 8>(0, 0) += rates_.delta_dcy * gg;
    }
    if (rates_.delta_dec > 0.0) {
      d.block<8, 8>(8, 0) -= rates_.delta_dec * s.block<8, 8>(8, 0);
      d.block<8, 8>(0, 8) -= rates_.delta_dec * s.block<8, 8>(0, 8);
    }
  }
}

void Engine::rk4_step() {
  const double h = dt_;
  const double t = t_;
  const int n = static_cast<int>(grid_.v.size());

  if (set_.tier == Tier::reduced) {
    derivative_red(t, red_, red_k1_);
    for (int i = 0; i < n; ++i) {
      red_tmp_[i].g = red_[i].g + (0.5 * h) * red_k1_[i].g;
      red_tmp_[i].e = red_[i].e + (0.5 * h) * red_k1_[i].e;
    }
    derivative_red(t + 0.5 * h, red_tmp_, red_k2_);
    for (int i = 0; i < n; ++i) {
      red_tmp_[i].g = red_[i].g + (0.5 * h) * red_k2_[i].g;
      red_tmp_[i].e = red_[i].e + (0.5 * h) * red_k2_[i].e;
    }
    derivative_red(t + 0.5 * h, red_tmp_, red_k3_);
    for (int i = 0; i < n; ++i) {
      red_tmp_[i].g = red_[i].g + h * red_k3_[i].g;
      red_tmp_[i].e = red_[i].e + h * red_k3_[i].e;
    }
    derivative_red(t + h, red_tmp_, red_k4_);
    for (int i = 0; i < n; ++i) {
      red_[i].g += (h / 6.0) * (red_k1_[i].g + 2.0 * red_k2_[i].g +
                                2.0 * red_k3_[i].g + red_k4_[i].g);
      red_[i].e += (h / 6.0) * (red_k1_[i].e + 2.0 * red_k2_[i].e +
                                2.0 * red_k3_[i].e + red_k4_[i].e);
      hermitize(red_[i].g);
      hermitize(red_[i].e);
    }
  } else {
    derivative_full(t, full_, full_k1_);
    for (int i = 0; i < n; ++i)
      full_tmp_[i] = full_[i] + (0.5 * h) * full_k1_[i];
    derivative_full(t + 0.5 * h, full_tmp_, full_k2_);
    for (int i = 0; i < n; ++i)
      full_tmp_[i] = full_[i] + (0.5 * h) * full_k2_[i];
    derivative_full(t + 0.5 * h, full_tmp_, full_k3_);
    for (int i = 0; i < n; ++i) full_tmp_[i] = full_[i] + h * full_k3_[i];
    derivative_full(t + h, full_tmp_, full_k4_);
    for (int i = 0; i < n; ++i) {
      full_[i] += (h / 6.0) * (full_k1_[i] + 2.0 * full_k2_[i] +
                               2.0 * full_k3_[i] + full_k4_[i]);
      hermitize(full_[i]);
    }
  }

  t_ += h;
  ++step_index_;
  post_step_check();
}

void Engine::post_step_check() {
  const int n = static_cast<int>(grid_.v.size());
  for (int i = 0; i < n; ++i) {
    const double tr = set_.tier == Tier::reduced
                          ? (red_[i].g.trace() + red_[i].e.trace()).real()
                          : full_[i].trace().real();
    if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "stiffness failure: trace drift " << tr - 1.0 << " at t=" << t_
         << " with dt=" << dt_ << " (delta_mix=" << rates_.delta_mix
         << ", delta_dcy=" << rates_.delta_dcy << ", delta_dec=" << rates_.delta_dec
         << "); the step size cannot resolve the fastest retained rate";
      throw StiffnessError(os.str());
    }
  }
}

void Engine::advance_steps(int n) {
  for (int k = 0; k < n; ++k) rk4_step();
}

SpinSample Engine::sample() const {
  SpinSample sp;
  sp.t = t_;
  sp.b = field_at(drive_, t_);

  Mat8 g = Mat8::Zero();
  const int n = static_cast<int>(grid_.v.size());
  if (set_.tier == Tier::reduced) {
    for (int i = 0; i < n; ++i) g += grid_.w[i] * red_[i].g;
  } else {
    for (int i = 0; i < n; ++i) g += grid_.w[i] * full_[i].block<8, 8>(0, 0);
  }
  const auto g1 = g.block<3, 3>(kB1, kB1);
  const auto g2 = g.block<5, 5>(kB2, kB2);
  for (int c = 0; c < 3; ++c) {
    sp.s1[c] = (g1 * sys_.f_g1[c]).trace().real();
    sp.s2[c] = (g2 * sys_.f_g2[c]).trace().real();
  }
  return sp;
}

Eigen::Matrix<double, 8, 1> Engine::ground_populations() const {
  Eigen::Matrix<double, 8, 1> pops = Eigen::Matrix<double, 8, 1>::Zero();
  const int n = static_cast<int>(grid_.v.size());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 8; ++k)
      pops[k] += grid_.w[i] * (set_.tier == Tier::reduced
                                   ? red_[i].g(k, k).real()
                                   : full_[i](k, k).real());
  return pops;
}

Mat16 Engine::ensemble_density() const {
  Mat16 rho = Mat16::Zero();
  const int n = static_cast<int>(grid_.v.size());
  for (int i = 0; i < n; ++i) {
    if (set_.tier == Tier::reduced) {
      rho.block<8, 8>(0, 0) += grid_.w[i] * red_[i].g;
      rho.block<8, 8>(8, 8) += grid_.w[i] * red_[i].e;
    } else {
      rho += grid_.w[i] * full_[i];
    }
  }
  return rho;
}

SteadyResult Engine::evolve_to_steady() {
  reset();
  const double T = drive_.period();
  const int samples = set_.samples_per_period;
  const int sub = steps_per_period_ / samples;

  SteadyResult res;
  res.dt = dt_;
  res.steps_per_period = steps_per_period_;

  long n_max = 200000;
  if (rates_.gamma > 0.0) {
    n_max = static_cast<long>(
        std::ceil(set_.max_periods_factor / (rates_.gamma * T)));
    n_max = std::clamp<long>(n_max, 4, 200000);
  }

  std::vector<Eigen::Vector3d> prev(samples), cur(samples);
  bool converged = false;
  long p = 0;
  for (; p < n_max; ++p) {
    for (int s = 0; s < samples; ++s) {
      const SpinSample sp = sample();
      if (s == 0) res.strobe.push_back(sp);
      cur[s] = sp.s2;
      advance_steps(sub);
    }
    if (p > 0) {
      double maxdiff = 0.0, scale = 1e-12;
      for (int s = 0; s < samples; ++s) {
        maxdiff = std::max(maxdiff, (cur[s] - prev[s]).cwiseAbs().maxCoeff());
        scale = std::max(scale, cur[s].cwiseAbs().maxCoeff());
      }
      res.rel_change = maxdiff / scale;
      if (res.rel_change < set_.steady_rel_tol) {
        converged = true;
        ++p;
        break;
      }
    }
    std::swap(prev, cur);
  }
  res.converged = converged;
  res.periods = static_cast<int>(p);

  // one more period for the reported trajectory, endpoint included
  res.period_samples.reserve(samples + 1);
  for (int s = 0; s < samples; ++s) {
    const SpinSample sp = sample();
    if (s == 0) res.strobe.push_back(sp);
    res.period_samples.push_back(sp);
    advance_steps(sub);
  }
  res.period_samples.push_back(sample());
  return res;
}

FixedRunResult Engine::evolve_fixed(double duration, int checkpoints) {
  if (duration <= 0.0 || checkpoints < 1)
    throw std::invalid_argument("evolve_fixed: bad duration/checkpoints");
  reset();

  const double chunk = duration / checkpoints;
  const int sub = std::max(1, static_cast<int>(std::ceil(chunk / dt_)));
  const double dt_saved = dt_;
  dt_ = chunk / sub;

  FixedRunResult res;
  res.dt = dt_;
  res.t.push_back(0.0);
  res.ground_pops.push_back(ground_populations());
  res.samples.push_back(sample());
  for (int c = 0; c < checkpoints; ++c) {
    advance_steps(sub);
    res.t.push_back(t_);
    res.ground_pops.push_back(ground_populations());
    res.samples.push_back(sample());
  }
  dt_ = dt_saved;
  return res;
}

} // namespace alkspin
