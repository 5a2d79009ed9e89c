#pragma once

#include <string>
#include <vector>

#include "spikeforge/sweep.hpp"

namespace spikeforge {

// Derived tables from a finished sweep: capacitance grids averaged over
// the per-architecture supply range, a voltage line table at the best
// capacitor pair, the static-power ladder, and a one-line summary.
struct ReportBundle {
    std::string grid_e_csv;      // voltage-averaged e_spike vs (c_mem, c_res)
    std::string grid_f_csv;      // voltage-averaged f_spike
    std::string grid_score_csv;  // voltage-averaged corrected score
    std::string vline_csv;       // v_supp line table at the best cap pair
    std::string static_csv;      // v_supp vs p_static
    std::string summary_json;    // Table-1-style row
};

struct ReportOptions {
    // open choice: average metrics then score (default), or average the
    // per-row scores directly
    bool average_scores = false;
};

ReportBundle make_report(const ScoreTable& table, const ReportOptions& opt = {});

// Writes the bundle as report_*.csv / report_summary.json under dir.
void write_report(const ReportBundle& bundle, const std::string& dir);

// Supply range the figure-style averages use, per architecture.
std::pair<double, double> averaging_range(NeuronKind kind);

} // namespace spikeforge
