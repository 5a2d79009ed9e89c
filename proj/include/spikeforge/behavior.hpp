#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeforge {

struct behavior_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exponential synapse kernel: each event contributes
// i0 * exp(-(t - t_k)/tau_syn); `tonic` ignores events and delivers a
// constant i0.
struct SynParams {
    double i0 = 100e-9;      // [A]
    double tau_syn = 1e-9;   // [s]
    std::vector<double> event_times; // [s], sorted ascending
    bool tonic = false;

    void validate() const;
};

double syn_current(const SynParams& p, double t);

struct LifParams {
    double tau_m = 1e-6;   // [s]
    double v_rest = 0.0;   // [V]
    double r_mem = 1e9;    // [ohm]; implied C_eff = tau_m / r_mem
    double v_th = 0.1;     // [V]
    double v_reset = 0.0;  // [V]
    double t_ref = 0.0;    // [s]

    void validate() const;
};

struct MlGating {
    double v1 = -1.2e-3, v2 = 18e-3;  // m_inf half-activation / slope [V]
    double v3 = 12e-3, v4 = 17.4e-3;  // W_inf half-activation / slope [V]
    double phi = 67.0;                // gating rate [1/s]
};

// Slow square-wave-burster extension: I_burst = -alpha * z * (V - e_k),
// dz/dt = epsilon * (sigmoid((V - z_half)/z_slope) - z).
struct MlBurst {
    double alpha = 1.5e-3;   // [S]
    double epsilon = 2.0;    // [1/s]
    double z_half = -20e-3;  // [V]
    double z_slope = 4e-3;   // [V]
};

struct MlParams {
    double c = 20e-6;        // [F]
    double i_ext = 90e-6;    // [A]
    double g_ca = 4e-3, g_k = 8e-3, g_l = 2e-3;        // [S]
    double e_ca = 120e-3, e_k = -84e-3, e_l = -60e-3;  // [V]
    MlGating gating;
    MlBurst burst;

    void validate() const;
};

struct AhParams {
    double c = 1e-15;        // [F], the sole capacitor
    double g_l = 1e-9;       // [S]
    double v_rest = 0.0;     // [V]
    double v_th = 0.1;       // [V]
    double i_reset = 300e-9; // [A], discharge current during the spike
    double v_floor = 0.0;    // [V], reset target

    void validate() const;
};

struct BehavioralTrace {
    std::vector<double> time;
    std::vector<double> v_m;
    std::vector<double> w;       // ML gating (empty otherwise)
    std::vector<double> z;       // ML slow burst variable (empty otherwise)
    std::vector<double> i_leak;  // LIF Eq-style leak series (empty otherwise)
    std::vector<double> spike_times;

    // Same CSV layout as the solver Trace; the membrane is the single
    // voltage column, gating columns appended.
    std::string to_csv() const;
};

// Fixed-step RK4 integrators. A step <= tau-scale/200 is enforced; pass
// dt_override > 0 to pin the step (validated against the same bound).
BehavioralTrace simulate_lif(const LifParams& p, const SynParams& syn,
                             double t_end, double dt_override = 0);
BehavioralTrace simulate_ml(const MlParams& p, double t_end, bool burst_enabled,
                            double dt_override = 0);
BehavioralTrace simulate_ah(const AhParams& p, const SynParams& syn,
                            double t_end, double dt_override = 0);

} // namespace spikeforge
