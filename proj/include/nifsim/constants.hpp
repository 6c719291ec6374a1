#pragma once

#include <numbers>

namespace nifsim::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double planck = two_pi * hbar;         // J s
inline constexpr double neutron_mass = 1.67492749804e-27;  // kg

}  // namespace nifsim::constants
