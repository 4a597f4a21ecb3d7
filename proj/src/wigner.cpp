#include "alkspin/wigner.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace alkspin::wigner {

namespace {

// factorials up to 40! cover every coupling of spins <= 19/2
constexpr int kMaxFact = 40;

const std::array<double, kMaxFact + 1>& fact_table() {
  static const auto table = [] {
    std::array<double, kMaxFact + 1> f{};
    f[0] = 1.0;
    for (int n = 1; n <= kMaxFact; ++n) f[n] = f[n - 1] * n;
    return f;
  }();
  return table;
}

inline double fact(int n) { return fact_table()[n]; }

inline bool is_half(int dj, int dm) {
  // m must run in integer steps from -j, and |m| <= j
  return (dj - dm) % 2 == 0 && dm >= -dj && dm <= dj;
}

inline bool triangle_ok(int da, int db, int dc) {
  return dc >= std::abs(da - db) && dc <= da + db && (da + db + dc) % 2 == 0;
}

// sqrt of the triangle coefficient Delta(abc)
double triangle_coeff(int da, int db, int dc) {
  const int p = (da + db - dc) / 2;
  const int q = (da - db + dc) / 2;
  const int r = (-da + db + dc) / 2;
  const int s = (da + db + dc) / 2 + 1;
  return std::sqrt(fact(p) * fact(q) * fact(r) / fact(s));
}

} // namespace

double clebsch_gordan(int dj1, int dm1, int dj2, int dm2, int dJ, int dM) {
  if (!is_half(dj1, dm1) || !is_half(dj2, dm2) || !is_half(dJ, dM)) return 0.0;
  if (dm1 + dm2 != dM) return 0.0;
  if (!triangle_ok(dj1, dj2, dJ)) return 0.0;

  // Racah's formula; every combination below is an integer by construction
  const int a1 = (dj1 + dj2 - dJ) / 2;
  const int a2 = (dj1 - dj2 + dJ) / 2;
  const int a3 = (-dj1 + dj2 + dJ) / 2;
  const int a4 = (dj1 + dj2 + dJ) / 2 + 1;

  const double pref =
      std::sqrt((dJ + 1.0) * fact(a1) * fact(a2) * fact(a3) / fact(a4)) *
      std::sqrt(fact((dj1 + dm1) / 2) * fact((dj1 - dm1) / 2) *
                fact((dj2 + dm2) / 2) * fact((dj2 - dm2) / 2) *
                fact((dJ + dM) / 2) * fact((dJ - dM) / 2));

  const int b1 = (dj1 + dj2 - dJ) / 2;
  const int b2 = (dj1 - dm1) / 2;
  const int b3 = (dj2 + dm2) / 2;
  const int c1 = (dJ - dj2 + dm1) / 2; // k <= b-range guards keep args >= 0
  const int c2 = (dJ - dj1 - dm2) / 2;

  const int kmin = std::max({0, -c1, -c2});
  const int kmax = std::min({b1, b2, b3});

  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double term = fact(k) * fact(b1 - k) * fact(b2 - k) * fact(b3 - k) *
                        fact(c1 + k) * fact(c2 + k);
    sum += ((k % 2 == 0) ? 1.0 : -1.0) / term;
  }
  return pref * sum;
}

double six_j(int dj1, int dj2, int dj3, int dj4, int dj5, int dj6) {
  if (!triangle_ok(dj1, dj2, dj3) || !triangle_ok(dj1, dj5, dj6) ||
      !triangle_ok(dj4, dj2, dj6) || !triangle_ok(dj4, dj5, dj3))
    return 0.0;

  const double pref = triangle_coeff(dj1, dj2, dj3) *
                      triangle_coeff(dj1, dj5, dj6) *
                      triangle_coeff(dj4, dj2, dj6) *
                      triangle_coeff(dj4, dj5, dj3);

  const int t1 = (dj1 + dj2 + dj3) / 2;
  const int t2 = (dj1 + dj5 + dj6) / 2;
  const int t3 = (dj4 + dj2 + dj6) / 2;
  const int t4 = (dj4 + dj5 + dj3) / 2;
  const int q1 = (dj1 + dj2 + dj4 + dj5) / 2;
  const int q2 = (dj2 + dj3 + dj5 + dj6) / 2;
  const int q3 = (dj3 + dj1 + dj6 + dj4) / 2;

  const int tmin = std::max({t1, t2, t3, t4});
  const int tmax = std::min({q1, q2, q3});

  double sum = 0.0;
  for (int t = tmin; t <= tmax; ++t) {
    const double term = fact(t - t1) * fact(t - t2) * fact(t - t3) *
                        fact(t - t4) * fact(q1 - t) * fact(q2 - t) *
                        fact(q3 - t);
    sum += ((t % 2 == 0) ? 1.0 : -1.0) * fact(t + 1) / term;
  }
  return pref * sum;
}

} // namespace alkspin::wigner
