#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeforge/netlist.hpp"
#include "spikeforge/solver.hpp"

namespace spikeforge {

struct metrics_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FiringPattern { silent, periodic, bursting, irregular };

std::string to_string(FiringPattern p);

struct IsiStats {
    double mean = 0, min = 0, max = 0, cv = 0;
};

struct SpikeTrain {
    std::vector<double> spike_times; // [s], strictly increasing
    FiringPattern pattern = FiringPattern::silent;
    IsiStats isi;

    std::vector<double> isis() const;
};

struct MetricsOptions {
    double grid_dt = 0.1e-12;        // uniform metric grid step [s]
    size_t max_grid_samples = 2'000'000; // grid cap; dt widens beyond it
    int discard_first = 3;           // settling spikes dropped up front
    double v_hi_frac = 0.6;          // rising hysteresis threshold
    double v_lo_frac = 0.4;          // re-arm threshold
};

struct MetricsRecord {
    NeuronKind kind = NeuronKind::LIF;
    std::string level = "circuit"; // "circuit" or "behavioral"
    double v_supp = 0;
    std::optional<double> c_mem;   // absent for AH
    double c_res = 0;
    double i_syn = 0;
    double f_spike = 0;                     // [Hz]
    std::optional<double> e_spike;          // [J]
    std::optional<double> p_static;         // [W], static runs only
    FiringPattern pattern = FiringPattern::silent;
    bool converged = true;
    bool settled = true;
    std::string note; // failure diagnostics for sweep rows
};

// Hysteresis spike detector on a uniform-grid trace: a spike is a
// rising v_hi crossing after the signal has been below v_lo; the spike
// instant is the interpolated v_hi crossing.
SpikeTrain detect_spikes(const std::vector<double>& time,
                         const std::vector<double>& v_spike_out, double v_supp,
                         const MetricsOptions& mopt = {});
SpikeTrain detect_spikes(const Trace& uniform, const std::string& spike_node,
                         double v_supp, const MetricsOptions& mopt = {});

// 1 / mean(ISI) after discarding the first discard_first spikes;
// 0 Hz when fewer than discard_first + 2 spikes are present.
double spike_frequency(const SpikeTrain& train, int discard_first = 3);

FiringPattern classify_pattern(const SpikeTrain& train);

struct EnergyResult {
    double e_spike;      // [J] mean of the last complete ISIs
    double supply_ratio; // |supply - total| / supply closure check
    bool settled;        // closure within 2 %
};

// Integral of p_total over one steady inter-spike interval, averaged
// over the last 3 complete ISIs, cross-checked against the supply
// integral over the same window.
std::optional<EnergyResult> energy_per_spike(const Trace& uniform,
                                             const SpikeTrain& train);

// Idle power: i_syn forced to zero, 50 ns transient, p_supply averaged
// over the final 20 % window. Throws if the circuit self-oscillates.
double static_power(const NeuronConfig& cfg, const SolverOptions& sopt = {},
                    const MetricsOptions& mopt = {});

// One dynamic run -> metrics row (no p_static). t_end <= 0 picks a
// heuristic window long enough for a settled train.
MetricsRecord measure_circuit(const NeuronConfig& cfg, SolverOptions sopt = {},
                              const MetricsOptions& mopt = {}, double t_end = 0);

} // namespace spikeforge
