#include "alkspin/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "alkspin/constants.hpp"

namespace alkspin {

namespace {

// samples cover one period with the endpoint duplicated; averages use the
// uniform interior grid (trapezoid rule for a periodic integrand)
int period_count(const std::vector<SpinSample>& period) {
  const int n = static_cast<int>(period.size());
  if (n < 3) throw std::invalid_argument("observables: too few samples");
  return n - 1;
}

} // namespace

double convolution_c1(const std::vector<SpinSample>& period) {
  double best = 0.0;
  for (const auto& s : period) best = std::max(best, s.s2.norm());
  return best;
}

double convolution_c2(const std::vector<SpinSample>& period) {
  const int n = period_count(period);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) acc += period[i].s2;
  return (acc / n).norm();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void export_trajectory(const std::string& path,
                       const std::vector<SpinSample>& samples,
                       const std::string& metadata_json) {
  std::ostringstream os;
  if (!metadata_json.empty()) os << "# " << metadata_json << "\n";
  os << "# t,s2x,s2y,s2z,bx,bz\n";
  for (const auto& s : samples) {
    os << format_double(s.t) << ',' << format_double(s.s2.x()) << ','
       << format_double(s.s2.y()) << ',' << format_double(s.s2.z()) << ','
       << format_double(s.b.x()) << ',' << format_double(s.b.z()) << "\n";
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << os.str();
}

std::vector<SpinSample> read_trajectory(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::vector<SpinSample> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    SpinSample s;
    double v[6];
    int k = 0;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',') && k < 6) v[k++] = std::stod(tok);
    if (k != 6) throw std::runtime_error("malformed trajectory row: " + line);
    s.t = v[0];
    s.s2 = {v[1], v[2], v[3]};
    s.b = {v[4], 0.0, v[5]};
    out.push_back(s);
  }
  return out;
}

void export_strobe(const std::string& path,
                   const std::vector<SpinSample>& strobe,
                   const std::string& metadata_json) {
  std::ostringstream os;
  if (!metadata_json.empty()) os << "# " << metadata_json << "\n";
  os << "# t,s1x,s1y,s1z,s2x,s2y,s2z,bx,bz\n";
  for (const auto& s : strobe) {
    os << format_double(s.t) << ',' << format_double(s.s1.x()) << ','
       << format_double(s.s1.y()) << ',' << format_double(s.s1.z()) << ','
       << format_double(s.s2.x()) << ',' << format_double(s.s2.y()) << ','
       << format_double(s.s2.z()) << ',' << format_double(s.b.x()) << ','
       << format_double(s.b.z()) << "\n";
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << os.str();
}

double mirror_deviation(const std::vector<SpinSample>& period) {
  const int n = period_count(period);
  // directed Hausdorff distance from the y-flipped samples to the closed
  // polyline through the originals; segment distance keeps the estimate free
  // of sampling-density artifacts
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d flipped = period[i].s2;
    flipped.y() = -flipped.y();
    double best = std::numeric_limits<double>::max();
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector3d& a = period[j].s2;
      const Eigen::Vector3d ab = period[(j + 1) % n].s2 - a;
      const double l2 = ab.squaredNorm();
      double u = l2 > 0.0 ? (flipped - a).dot(ab) / l2 : 0.0;
      u = std::clamp(u, 0.0, 1.0);
      best = std::min(best, (flipped - (a + u * ab)).norm());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<double> harmonic_magnitudes(const std::vector<SpinSample>& period) {
  const int n = period_count(period);
  std::vector<double> mags(n / 2 + 1, 0.0);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ph = -constants::two_pi * k * i / n;
      acc += period[i].s2.z() * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    mags[k] = std::abs(acc) / n;
  }
  return mags;
}

bool has_higher_harmonics(const std::vector<SpinSample>& period, double frac) {
  const auto mags = harmonic_magnitudes(period);
  if (mags.size() < 4) return false;
  double high = 0.0;
  for (std::size_t k = 3; k < mags.size(); ++k) high = std::max(high, mags[k]);
  return high > frac * mags[1];
}

} // namespace alkspin
