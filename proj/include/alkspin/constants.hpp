#pragma once

// Physical constants (SI) and the Rb-87 D1 numbers used throughout.
// Angular frequencies are rad/s; config-facing "*_hz" values are cycles/s.

namespace alkspin::constants {

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Zeeman frequency scale: one Bohr magneton expressed as angular frequency
// per tesla.  Multiplied by a Lande g factor this is the gyromagnetic ratio.
inline constexpr double mu_b_over_hbar = bohr_magneton / hbar; // rad/(s T)

namespace rb87 {

inline constexpr double mass = 86.909180531 * atomic_mass_unit; // kg

// D1 line (5S1/2 -> 5P1/2)
inline constexpr double d1_frequency_hz = 377.107463380e12;
inline constexpr double ground_hf_splitting_hz = 6.834682610904290e9;
inline constexpr double excited_hf_splitting_hz = 814.5e6;
inline constexpr double d1_reduced_dipole_cm = 2.5377e-29; // <J||er||J'>, C m

// Fine/nuclear g factors of the ground manifold (5P1/2 g factors are not
// needed: excited Zeeman shifts are negligible against delta_dcy).
inline constexpr double g_j_ground = 2.00233113;
inline constexpr double g_i = -0.0009951414;

inline constexpr double nuclear_spin = 1.5;

} // namespace rb87

} // namespace alkspin::constants
