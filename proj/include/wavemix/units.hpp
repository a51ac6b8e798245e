// Frequency conversions at the I/O boundary
//
// Internally every frequency is an angular frequency in rad/us. Rates, Rabi
// amplitudes and detunings cross the boundary as linear MHz, transition
// frequencies as linear GHz.

#pragma once

#include <numbers>

namespace wavemix::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduced Planck constant, J s.
inline constexpr double hbar = 1.054571817e-34;

constexpr double from_mhz(double f_mhz) { return two_pi * f_mhz; }
constexpr double to_mhz(double omega) { return omega / two_pi; }
constexpr double from_ghz(double f_ghz) { return two_pi * 1.0e3 * f_ghz; }
constexpr double to_ghz(double omega) { return omega / (two_pi * 1.0e3); }

// rad/us -> rad/s
constexpr double to_per_second(double omega) { return omega * 1.0e6; }

} // namespace wavemix::units
