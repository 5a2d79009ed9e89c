#include "spikeforge/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spikeforge/units.hpp"

namespace spikeforge {

std::pair<double, double> averaging_range(NeuronKind kind) {
    switch (kind) {
        case NeuronKind::LIF: return {0.1, 0.7};
        case NeuronKind::ML: return {0.1, 0.6};
        case NeuronKind::AH: return {0.1, 0.9};
    }
    return {0.1, 0.9};
}

namespace {

struct Cell {
    double e_sum = 0, f_sum = 0, s_sum = 0;
    int n = 0;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

ReportBundle make_report(const ScoreTable& table, const ReportOptions& opt) {
    if (table.rows.empty()) throw sweep_error("cannot report on an empty table");
    const NeuronKind kind = table.rows.front().rec.kind;
    const auto [v_lo, v_hi] = averaging_range(kind);
    const double eps = 1e-9;

    // cap-pair averages over the supply range, invalid rows skipped
    std::set<double> cmems, cress;
    std::map<std::pair<double, double>, Cell> cells;
    for (const auto& row : table.rows) {
        const auto& r = row.rec;
        const double cm = r.c_mem ? *r.c_mem : 0.0;
        cmems.insert(cm);
        cress.insert(r.c_res);
        if (!row.valid) continue;
        if (r.v_supp < v_lo - eps || r.v_supp > v_hi + eps) continue;
        auto& c = cells[{cm, r.c_res}];
        c.e_sum += *r.e_spike;
        c.f_sum += r.f_spike;
        c.s_sum += *row.score_corrected;
        c.n += 1;
    }

    auto grid_csv = [&](auto value_of) {
        std::ostringstream os;
        os << "c_mem_fF\\c_res_fF";
        for (double cr : cress) os << "," << fmt(cr * 1e15);
        os << "\n";
        for (double cm : cmems) {
            os << fmt(cm * 1e15);
            for (double cr : cress) {
                os << ",";
                auto it = cells.find({cm, cr});
                if (it != cells.end() && it->second.n > 0)
                    os << fmt(value_of(it->second));
            }
            os << "\n";
        }
        return os.str();
    };

    ReportBundle out;
    out.grid_e_csv = grid_csv([](const Cell& c) { return c.e_sum / c.n; });
    out.grid_f_csv = grid_csv([](const Cell& c) { return c.f_sum / c.n; });
    if (opt.average_scores) {
        out.grid_score_csv = grid_csv([](const Cell& c) { return c.s_sum / c.n; });
    } else {
        // score the averaged metrics (default reading)
        Extremes ex;
        bool first = true;
        for (const auto& [key, c] : cells) {
            if (c.n == 0) continue;
            const double e = c.e_sum / c.n, f = c.f_sum / c.n;
            if (first) { ex = {e, e, f, f}; first = false; }
            ex.e_min = std::min(ex.e_min, e);
            ex.e_max = std::max(ex.e_max, e);
            ex.f_min = std::min(ex.f_min, f);
            ex.f_max = std::max(ex.f_max, f);
        }
        out.grid_score_csv = grid_csv([&](const Cell& c) {
            auto [en, fn] = normalize(c.e_sum / c.n, c.f_sum / c.n, ex);
            return score(en, fn, ScoreVariant::corrected);
        });
    }

    // best cap pair by the averaged corrected score
    std::optional<std::pair<double, double>> best_pair;
    double best_score = -1;
    {
        Extremes ex;
        bool first = true;
        for (const auto& [key, c] : cells) {
            if (c.n == 0) continue;
            const double e = c.e_sum / c.n, f = c.f_sum / c.n;
            if (first) { ex = {e, e, f, f}; first = false; }
            ex.e_min = std::min(ex.e_min, e);
            ex.e_max = std::max(ex.e_max, e);
            ex.f_min = std::min(ex.f_min, f);
            ex.f_max = std::max(ex.f_max, f);
        }
        for (const auto& [key, c] : cells) {
            if (c.n == 0) continue;
            double s;
            if (opt.average_scores) {
                s = c.s_sum / c.n;
            } else {
                auto [en, fn] = normalize(c.e_sum / c.n, c.f_sum / c.n, ex);
                s = score(en, fn, ScoreVariant::corrected);
            }
            if (s > best_score) { best_score = s; best_pair = key; }
        }
    }

    {
        std::ostringstream os;
        os << "v_supp_V,f_spike_Hz,e_spike_J,score_literal,score_corrected\n";
        if (best_pair) {
            for (const auto& row : table.rows) {
                const auto& r = row.rec;
                const double cm = r.c_mem ? *r.c_mem : 0.0;
                if (std::abs(cm - best_pair->first) > 1e-21) continue;
                if (std::abs(r.c_res - best_pair->second) > 1e-21) continue;
                os << fmt(r.v_supp) << ",";
                if (row.valid)
                    os << format_double(r.f_spike) << "," << format_double(*r.e_spike)
                       << "," << format_double(*row.score_literal) << ","
                       << format_double(*row.score_corrected);
                else
                    os << format_double(r.f_spike) << ",,,";
                os << "\n";
            }
        }
        out.vline_csv = os.str();
    }

    {
        std::ostringstream os;
        os << "v_supp_V,p_static_W\n";
        std::map<double, double> ladder;
        for (const auto& row : table.rows)
            if (row.rec.p_static) ladder[row.rec.v_supp] = *row.rec.p_static;
        for (const auto& [v, p] : ladder)
            os << fmt(v) << "," << format_double(p) << "\n";
        out.static_csv = os.str();
    }

    {
        nlohmann::json j;
        j["kind"] = to_string(kind);
        if (table.best_corrected) {
            const auto& b = table.rows[*table.best_corrected].rec;
            j["optimal_v_supp_V"] = b.v_supp;
            if (b.c_mem) j["c_mem_fF"] = *b.c_mem * 1e15;
            j["c_res_fF"] = b.c_res * 1e15;
            j["i_syn_nA"] = b.i_syn * 1e9;
            j["f_at_best_Hz"] = b.f_spike;
            if (b.e_spike) j["e_at_best_J"] = *b.e_spike;
        }
        bool have_valid = false;
        for (const auto& row : table.rows) have_valid |= row.valid;
        if (have_valid) {
            j["eps_min_J"] = table.extremes.e_min;
            j["f_max_Hz"] = table.extremes.f_max;
        }
        std::map<double, double> ladder;
        for (const auto& row : table.rows)
            if (row.rec.p_static) ladder[row.rec.v_supp] = *row.rec.p_static;
        auto nearest = [&](double v) -> std::optional<double> {
            std::optional<double> best;
            double dmin = 0.051;
            for (const auto& [vv, p] : ladder)
                if (std::abs(vv - v) < dmin) { dmin = std::abs(vv - v); best = p; }
            return best;
        };
        if (auto p = nearest(0.1)) j["p_static_0v1_W"] = *p;
        if (auto p = nearest(0.9)) j["p_static_0v9_W"] = *p;
        out.summary_json = j.dump(2) + "\n";
    }
    return out;
}

void write_report(const ReportBundle& bundle, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw sweep_error("cannot write " + name + " under " + dir);
        f << text;
    };
    put("report_grid_e_spike.csv", bundle.grid_e_csv);
    put("report_grid_f_spike.csv", bundle.grid_f_csv);
    put("report_grid_score.csv", bundle.grid_score_csv);
    put("report_vline_best_pair.csv", bundle.vline_csv);
    put("report_static_power.csv", bundle.static_csv);
    put("report_summary.json", bundle.summary_json);
}

} // namespace spikeforge
