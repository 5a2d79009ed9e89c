#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace spikeforge {

// Physical constants (CODATA 2018 exact values).
constexpr double k_boltzmann = 1.380649e-23;   // J/K
constexpr double q_electron  = 1.602176634e-19; // C

inline double thermal_voltage(double temp_k) {
    return k_boltzmann * temp_k / q_electron;
}

// Parses "0.2", "100n", "1f", "2.5u", "10k" etc. into a double.
// Recognized suffixes: a f p n u m k M G T (µ accepted as "u").
double parse_si(const std::string& text);

// Fixed, locale-independent float formatting used by every CSV/JSON
// emitter; shortest representation that round-trips a double.
std::string format_double(double v);

} // namespace spikeforge
