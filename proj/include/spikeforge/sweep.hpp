#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeforge/metrics.hpp"

namespace spikeforge {

struct sweep_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    NeuronKind kind = NeuronKind::LIF;
    std::string level = "circuit"; // "circuit" | "behavioral"
    std::vector<double> v_supp_values; // [V]; empty -> 0.10..0.90 step 0.05
    std::vector<double> c_mem_values;  // [F]; empty -> {0.1..0.9, 1..10} fF
    std::vector<double> c_res_values;  // [F]; empty -> same ladder
    double i_syn = 100e-9;             // [A]
    SolverOptions solver;
    MetricsOptions metrics;
    double t_end = 0;       // 0 -> per-config heuristic window
    int threads = 0;        // 0 -> SPIKEFORGE_THREADS or hardware count
    bool with_static = true; // per-voltage static ladder (circuit level)

    static std::vector<double> default_v_supp();
    static std::vector<double> default_caps();
    void fill_defaults();
    void validate() const;
};

struct ScoreRow {
    MetricsRecord rec;
    bool valid = false; // converged, settled, non-silent, metrics present
    std::optional<double> e_norm;          // literal Eq-7 value, in [-1, 0]
    std::optional<double> f_norm;          // in [0, 1]
    std::optional<double> score_literal;   // e_norm * f_norm
    std::optional<double> score_corrected; // (1 + e_norm) * f_norm
};

struct Extremes {
    double e_min = 0, e_max = 0; // [J]
    double f_min = 0, f_max = 0; // [Hz]
};

struct ScoreTable {
    std::vector<ScoreRow> rows; // expand_grid order
    Extremes extremes;          // over valid rows
    std::optional<size_t> best_literal;
    std::optional<size_t> best_corrected;
    std::vector<size_t> pareto; // row indices, f ascending
    std::vector<std::pair<double, double>> static_ladder; // (v_supp, W)

    // CSV schema (exact order): kind, level, v_supp_V, c_mem_fF,
    // c_res_fF, i_syn_nA, converged, settled, pattern, f_spike_Hz,
    // e_spike_J, p_static_W, e_norm, f_norm, score_literal,
    // score_corrected. Missing values are empty fields.
    std::string to_csv() const;
    static ScoreTable from_csv(const std::string& text);

    std::string summary_json() const;
};

enum class ScoreVariant { literal, corrected };

// Full Cartesian product in lexicographic (v_supp, c_mem, c_res) order;
// the AH grid drops the c_mem axis.
std::vector<NeuronConfig> expand_grid(const SweepSpec& spec);

// Simulates every configuration (parallel, order-independent), scores
// the valid rows and recomputes extremes / best / Pareto. Row order
// always equals expand_grid order.
ScoreTable run_sweep(const SweepSpec& spec);

// Eq-7/8 normalization against per-sweep extremes.
std::pair<double, double> normalize(double e_spike, double f_spike,
                                    const Extremes& ex);

double score(double e_norm, double f_norm, ScoreVariant variant);

// Recomputes norms, scores, extremes, best rows and the Pareto front
// in place from the rows' raw metrics.
void score_table(ScoreTable& table);

size_t best_point(const ScoreTable& table, ScoreVariant variant);
std::vector<size_t> pareto_front(const ScoreTable& table);

} // namespace spikeforge
