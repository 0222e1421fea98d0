#pragma once

#include <numbers>

namespace nanoloc {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// HITRAN reference temperature.
inline constexpr double kDefaultTemperature = 296.0;  // K

inline constexpr double kTera = 1e12;

}  // namespace nanoloc
