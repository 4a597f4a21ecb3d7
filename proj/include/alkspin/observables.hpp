#pragma once

#include <string>
#include <vector>

#include "alkspin/liouville.hpp"

namespace alkspin {

// peak excursion of the F=2 polarization over one period: max_t |S2(t)|
double convolution_c1(const std::vector<SpinSample>& period);

// magnitude of the period-averaged F=2 polarization: |<S2>_T|
double convolution_c2(const std::vector<SpinSample>& period);

// columns: t, s2x, s2y, s2z, bx, bz; '#' header lines carry metadata and are
// preserved on read.  Values use %.17g so a read-back is bit exact.
void export_trajectory(const std::string& path,
                       const std::vector<SpinSample>& samples,
                       const std::string& metadata_json);
std::vector<SpinSample> read_trajectory(const std::string& path);

// columns: t, s1x..s1z, s2x..s2z, bx, bz (one row per drive period)
void export_strobe(const std::string& path,
                   const std::vector<SpinSample>& strobe,
                   const std::string& metadata_json);

// Steady orbits of the dual-harmonic drive close under t -> -t combined
// with S_y -> -S_y.  Returns the largest distance from any y-flipped sample
// to the sampled orbit (compare against a fraction of C1).
double mirror_deviation(const std::vector<SpinSample>& period);

// |X_k| of S2z over one period (endpoint excluded), k = 0..N/2
std::vector<double> harmonic_magnitudes(const std::vector<SpinSample>& period);

// true when content beyond the second harmonic exceeds frac * |X_1|
bool has_higher_harmonics(const std::vector<SpinSample>& period, double frac);

std::string format_double(double v); // %.17g

} // namespace alkspin
