#pragma once

#include <numbers>

namespace aqec::constants {

inline constexpr double pi     = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Bohr magneton over Planck constant, Hz per tesla.
inline constexpr double bohr_magneton_over_h_hz_per_tesla = 13.996244936e9;

// Lande g-factor of the D_{5/2} manifold; the CLI accepts an override.
inline constexpr double default_g_factor = 6.0 / 5.0;

// Approximate g-factor of the S_{1/2} ground manifold (auxiliary qubit).
inline constexpr double ground_manifold_g_factor = 2.0;

inline constexpr double hz_to_angular(double f_hz) { return two_pi * f_hz; }
inline constexpr double angular_to_hz(double w) { return w / two_pi; }

} // namespace aqec::constants
