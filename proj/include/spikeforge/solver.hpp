#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeforge/netlist.hpp"

namespace spikeforge {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StartMode {
    zero, // power-on: rails at source values, everything else at 0 V
    dc    // solve the operating point first, fall back to zero on failure
};

struct SolverOptions {
    double reltol = 1e-4;
    double abstol_i = 1e-12;  // [A]
    double abstol_v = 1e-6;   // [V]
    double gmin = 1e-12;      // [S], node-to-ground regularization
    int max_newton_iters = 1000;
    double dt_init = 1e-12;   // [s]
    double dt_min = 1e-15;    // [s]
    double dt_max = 100e-12;  // [s]
    double t_end = 50e-9;     // [s]
    double lte_tol = 1e-3;
    StartMode start = StartMode::zero;
    std::map<std::string, double> initial_v; // per-node overrides [V]

    void validate() const;
};

// Waveform set on a monotone (possibly nonuniform) time grid.
struct Trace {
    std::vector<double> time;                     // [s], strictly increasing
    std::vector<std::string> node_names;          // non-ground nodes
    std::vector<std::vector<double>> v;           // v[node][sample]
    std::vector<std::string> element_names;
    std::vector<std::vector<double>> i;           // i[element][sample]
    std::vector<double> p_total;                  // [W], dissipative elements
    std::vector<double> p_supply;                 // [W], source-delivered
    bool dc_converged = true;                     // start-point provenance

    size_t samples() const { return time.size(); }
    int node_index(const std::string& name) const; // throws if absent
    const std::vector<double>& voltage(const std::string& name) const;

    // Linear-interpolation resample onto a uniform grid of step dt,
    // starting at time.front(). max_samples caps the grid (the step is
    // widened when needed).
    Trace resampled(double dt, size_t max_samples = 20'000'000) const;

    // CSV: time_s, v_<node>..., p_total_w, p_supply_w (exact order).
    std::string to_csv() const;
};

// Newton-Raphson on the MNA equations with a GMIN ladder fallback.
// Returns node voltages including ground at index 0.
std::vector<double> dc_operating_point(const Circuit& ckt, const SolverOptions& opt);

// Adaptive trapezoidal transient (local-truncation-error step control,
// Newton at every step). Deterministic: same circuit and options give a
// bit-identical Trace.
Trace transient(const Circuit& ckt, const SolverOptions& opt);

} // namespace spikeforge
