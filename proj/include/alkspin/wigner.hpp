#pragma once

// Clebsch-Gordan and Wigner 6j coefficients via the Racah closed forms.
// All angular momenta are passed as doubled integers (dj = 2j) so that
// half-integer spins stay exact.

namespace alkspin::wigner {

// <j1 m1; j2 m2 | J M>, arguments doubled.  Returns 0 for forbidden inputs.
double clebsch_gordan(int dj1, int dm1, int dj2, int dm2, int dJ, int dM);

// {j1 j2 j3; j4 j5 j6}, arguments doubled.
double six_j(int dj1, int dj2, int dj3, int dj4, int dj5, int dj6);

} // namespace alkspin::wigner
