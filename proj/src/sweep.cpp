#include "spikeforge/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "spikeforge/behavior.hpp"
#include "spikeforge/units.hpp"

namespace spikeforge {

std::vector<double> SweepSpec::default_v_supp() {
    std::vector<double> v;
    for (int k = 0; k <= 16; ++k) v.push_back((10 + 5 * k) / 100.0);
    return v;
}

std::vector<double> SweepSpec::default_caps() {
    std::vector<double> c;
    for (int k = 1; k <= 9; ++k) c.push_back(k / 10.0 * 1e-15);
    for (int k = 1; k <= 10; ++k) c.push_back(k * 1e-15);
    return c;
}

void SweepSpec::fill_defaults() {
    if (v_supp_values.empty()) v_supp_values = default_v_supp();
    if (c_mem_values.empty()) c_mem_values = default_caps();
    if (c_res_values.empty()) c_res_values = default_caps();
}

void SweepSpec::validate() const {
    if (level != "circuit" && level != "behavioral")
        throw sweep_error("level must be circuit or behavioral");
    if (v_supp_values.empty() || c_res_values.empty() ||
        (kind != NeuronKind::AH && c_mem_values.empty()))
        throw sweep_error("empty sweep axis");
    if (!(i_syn >= 0)) throw sweep_error("i_syn must be nonnegative");
}

std::vector<NeuronConfig> expand_grid(const SweepSpec& spec) {
    SweepSpec s = spec;
    s.fill_defaults();
    s.validate();
    std::vector<NeuronConfig> out;
    for (double v : s.v_supp_values) {
        if (s.kind == NeuronKind::AH) {
            for (double cr : s.c_res_values) {
                NeuronConfig cfg;
                cfg.kind = s.kind;
                cfg.v_supp = v;
                cfg.c_mem.reset();
                cfg.c_res = cr;
                cfg.i_syn = s.i_syn;
                out.push_back(cfg);
            }
        } else {
            for (double cm : s.c_mem_values)
                for (double cr : s.c_res_values) {
                    NeuronConfig cfg;
                    cfg.kind = s.kind;
                    cfg.v_supp = v;
                    cfg.c_mem = cm;
                    cfg.c_res = cr;
                    cfg.i_syn = s.i_syn;
                    out.push_back(cfg);
                }
        }
    }
    return out;
}

std::pair<double, double> normalize(double e_spike, double f_spike,
                                    const Extremes& ex) {
    double e_norm = 0, f_norm = 0;
    if (ex.e_max > ex.e_min)
        e_norm = -(e_spike - ex.e_min) / (ex.e_max - ex.e_min);
    if (ex.f_max > ex.f_min)
        f_norm = (f_spike - ex.f_min) / (ex.f_max - ex.f_min);
    return {e_norm, f_norm};
}

double score(double e_norm, double f_norm, ScoreVariant variant) {
    return variant == ScoreVariant::literal ? e_norm * f_norm
                                            : (1.0 + e_norm) * f_norm;
}

namespace {

bool row_better(const ScoreTable& t, size_t a, size_t b, ScoreVariant variant) {
    auto sc = [&](size_t k) {
        const auto& r = t.rows[k];
        return variant == ScoreVariant::literal ? *r.score_literal
                                                : *r.score_corrected;
    };
    if (sc(a) != sc(b)) return sc(a) > sc(b);
    const double ea = *t.rows[a].rec.e_spike, eb = *t.rows[b].rec.e_spike;
    if (ea != eb) return ea < eb;
    if (t.rows[a].rec.v_supp != t.rows[b].rec.v_supp)
        return t.rows[a].rec.v_supp < t.rows[b].rec.v_supp;
    return a < b;
}

} // namespace

void score_table(ScoreTable& table) {
    std::vector<size_t> valid;
    for (size_t k = 0; k < table.rows.size(); ++k) {
        auto& row = table.rows[k];
        row.valid = row.rec.converged && row.rec.settled &&
                    row.rec.pattern != FiringPattern::silent &&
                    row.rec.f_spike > 0 && row.rec.e_spike.has_value();
        row.e_norm.reset();
        row.f_norm.reset();
        row.score_literal.reset();
        row.score_corrected.reset();
        if (row.valid) valid.push_back(k);
    }
    table.best_literal.reset();
    table.best_corrected.reset();
    table.pareto.clear();
    table.extremes = {};
    if (valid.empty()) return;

    Extremes ex;
    ex.e_min = ex.e_max = *table.rows[valid[0]].rec.e_spike;
    ex.f_min = ex.f_max = table.rows[valid[0]].rec.f_spike;
    for (size_t k : valid) {
        const auto& r = table.rows[k].rec;
        ex.e_min = std::min(ex.e_min, *r.e_spike);
        ex.e_max = std::max(ex.e_max, *r.e_spike);
        ex.f_min = std::min(ex.f_min, r.f_spike);
        ex.f_max = std::max(ex.f_max, r.f_spike);
    }
    table.extremes = ex;
    for (size_t k : valid) {
        auto& row = table.rows[k];
        auto [en, fn] = normalize(*row.rec.e_spike, row.rec.f_spike, ex);
        row.e_norm = en;
        row.f_norm = fn;
        row.score_literal = score(en, fn, ScoreVariant::literal);
        row.score_corrected = score(en, fn, ScoreVariant::corrected);
    }
    table.best_literal = best_point(table, ScoreVariant::literal);
    table.best_corrected = best_point(table, ScoreVariant::corrected);
    table.pareto = pareto_front(table);
}

size_t best_point(const ScoreTable& table, ScoreVariant variant) {
    std::optional<size_t> best;
    for (size_t k = 0; k < table.rows.size(); ++k) {
        if (!table.rows[k].valid) continue;
        if (!best || row_better(table, k, *best, variant)) best = k;
    }
    if (!best) throw sweep_error("no valid rows to pick a best point from");
    return *best;
}

std::vector<size_t> pareto_front(const ScoreTable& table) {
    std::vector<size_t> valid;
    for (size_t k = 0; k < table.rows.size(); ++k)
        if (table.rows[k].valid) valid.push_back(k);
    std::vector<size_t> front;
    for (size_t a : valid) {
        const double fa = table.rows[a].rec.f_spike;
        const double ea = *table.rows[a].rec.e_spike;
        bool dominated = false;
        for (size_t b : valid) {
            if (a == b) continue;
            const double fb = table.rows[b].rec.f_spike;
            const double eb = *table.rows[b].rec.e_spike;
            if (fb >= fa && eb <= ea && (fb > fa || eb < ea)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(a);
    }
    std::stable_sort(front.begin(), front.end(), [&](size_t a, size_t b) {
        return table.rows[a].rec.f_spike < table.rows[b].rec.f_spike;
    });
    return front;
}

namespace {

int worker_count(const SweepSpec& spec) {
    if (spec.threads > 0) return spec.threads;
    if (const char* env = std::getenv("SPIKEFORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 2;
}

// Behavioral reference mapping for a sweep row. The LIF uses the
// near-ideal-integrator regime (large R) with the half-supply
// threshold; the AH mirrors its two-phase circuit. The reported energy
// is the charge-to-threshold estimate C * dV * V_supp, since the ODE
// level has no dissipation bookkeeping.
MetricsRecord measure_behavioral(const NeuronConfig& cfg, const SweepSpec& spec) {
    MetricsRecord rec;
    rec.kind = cfg.kind;
    rec.level = "behavioral";
    rec.v_supp = cfg.v_supp;
    rec.c_mem = cfg.kind == NeuronKind::AH ? std::nullopt : cfg.c_mem;
    rec.c_res = cfg.c_res;
    rec.i_syn = cfg.i_syn;
    try {
        SynParams syn;
        syn.tonic = true;
        syn.i0 = cfg.i_syn;
        const double v_th = 0.5 * cfg.v_supp;
        BehavioralTrace tr;
        double cap = 0;
        if (cfg.kind == NeuronKind::LIF) {
            LifParams p;
            p.r_mem = 1e9;
            cap = *cfg.c_mem;
            p.tau_m = p.r_mem * cap;
            p.v_rest = 0;
            p.v_th = v_th;
            p.v_reset = 0;
            const double period = cap * v_th / std::max(cfg.i_syn, 1e-12);
            tr = simulate_lif(p, syn, 12.0 * period);
        } else if (cfg.kind == NeuronKind::AH) {
            AhParams p;
            p.c = cap = cfg.c_res;
            p.v_th = v_th;
            p.v_floor = 0;
            p.i_reset = 3.0 * std::max(cfg.i_syn, 1e-12);
            const double period =
                cap * v_th * (1.0 / std::max(cfg.i_syn, 1e-12) + 1.0 / p.i_reset);
            tr = simulate_ah(p, syn, 12.0 * period);
        } else {
            throw behavior_error(
                "behavioral sweep level is not defined for the ml kind "
                "(its parameter space is biophysical, not the circuit grid)");
        }
        SpikeTrain train;
        train.spike_times = tr.spike_times;
        train.pattern = classify_pattern(train);
        rec.pattern = train.pattern;
        rec.f_spike = spike_frequency(train, spec.metrics.discard_first);
        if (rec.f_spike > 0) rec.e_spike = cap * v_th * cfg.v_supp;
        rec.settled = train.spike_times.empty() || rec.f_spike > 0;
    } catch (const std::exception& ex) {
        rec.converged = false;
        rec.settled = false;
        rec.note = ex.what();
    }
    return rec;
}

} // namespace

ScoreTable run_sweep(const SweepSpec& spec_in) {
    SweepSpec spec = spec_in;
    spec.fill_defaults();
    spec.validate();
    const auto grid = expand_grid(spec);

    ScoreTable table;
    table.rows.resize(grid.size());

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= grid.size()) return;
            if (spec.level == "circuit")
                table.rows[k].rec =
                    measure_circuit(grid[k], spec.solver, spec.metrics, spec.t_end);
            else
                table.rows[k].rec = measure_behavioral(grid[k], spec);
        }
    };
    const int nw = std::min<int>(worker_count(spec), static_cast<int>(grid.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    if (std::none_of(table.rows.begin(), table.rows.end(),
                     [](const ScoreRow& r) { return r.rec.converged; }))
        throw sweep_error("every sweep configuration failed");

    if (spec.level == "circuit" && spec.with_static) {
        std::map<double, std::optional<double>> ladder;
        for (const auto& cfg : grid) ladder.emplace(cfg.v_supp, std::nullopt);
        for (auto& [v, p] : ladder) {
            NeuronConfig cfg;
            cfg.kind = spec.kind;
            cfg.v_supp = v;
            cfg.c_mem = spec.kind == NeuronKind::AH
                            ? std::optional<double>{}
                            : std::optional<double>{spec.c_mem_values.front()};
            cfg.c_res = spec.c_res_values.front();
            cfg.i_syn = 0;
            try {
                p = static_power(cfg, spec.solver, spec.metrics);
            } catch (const std::exception&) {
                p.reset(); // self-oscillating or non-convergent: left empty
            }
        }
        for (auto& row : table.rows) {
            auto it = ladder.find(row.rec.v_supp);
            if (it != ladder.end() && it->second) row.rec.p_static = *it->second;
        }
        for (const auto& [v, p] : ladder)
            if (p) table.static_ladder.emplace_back(v, *p);
    }

    score_table(table);
    return table;
}

namespace {

std::string fmt_unit(double v) {
    // unit-scaled axis columns; 12 significant digits hide the
    // femto/nano rescaling noise while staying exact for grid values
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace

std::string ScoreTable::to_csv() const {
    std::ostringstream os;
    os << "kind,level,v_supp_V,c_mem_fF,c_res_fF,i_syn_nA,converged,settled,"
          "pattern,f_spike_Hz,e_spike_J,p_static_W,e_norm,f_norm,score_literal,"
          "score_corrected\n";
    for (const auto& row : rows) {
        const auto& r = row.rec;
        os << to_string(r.kind) << "," << r.level << "," << fmt_unit(r.v_supp) << ","
           << (r.c_mem ? fmt_unit(*r.c_mem * 1e15) : std::string()) << ","
           << fmt_unit(r.c_res * 1e15) << "," << fmt_unit(r.i_syn * 1e9) << ","
           << (r.converged ? 1 : 0) << "," << (r.settled ? 1 : 0) << ","
           << to_string(r.pattern) << "," << format_double(r.f_spike) << ","
           << opt_field(r.e_spike) << "," << opt_field(r.p_static) << ","
           << opt_field(row.e_norm) << "," << opt_field(row.f_norm) << ","
           << opt_field(row.score_literal) << "," << opt_field(row.score_corrected)
           << "\n";
    }
    return os.str();
}

ScoreTable ScoreTable::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw sweep_error("empty score CSV");
    const std::string expect =
        "kind,level,v_supp_V,c_mem_fF,c_res_fF,i_syn_nA,converged,settled,"
        "pattern,f_spike_Hz,e_spike_J,p_static_W,e_norm,f_norm,score_literal,"
        "score_corrected";
    if (line != expect)
        throw sweep_error("score CSV header mismatch:\n  expected: " + expect +
                          "\n  found:    " + line);
    ScoreTable table;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        f.resize(16);
        ScoreRow row;
        auto& r = row.rec;
        r.kind = neuron_kind_from_string(f[0]);
        r.level = f[1];
        r.v_supp = std::stod(f[2]);
        if (!f[3].empty()) r.c_mem = std::stod(f[3]) * 1e-15;
        r.c_res = std::stod(f[4]) * 1e-15;
        r.i_syn = std::stod(f[5]) * 1e-9;
        r.converged = f[6] == "1";
        r.settled = f[7] == "1";
        if (f[8] == "periodic") r.pattern = FiringPattern::periodic;
        else if (f[8] == "bursting") r.pattern = FiringPattern::bursting;
        else if (f[8] == "irregular") r.pattern = FiringPattern::irregular;
        else r.pattern = FiringPattern::silent;
        r.f_spike = f[9].empty() ? 0.0 : std::stod(f[9]);
        if (!f[10].empty()) r.e_spike = std::stod(f[10]);
        if (!f[11].empty()) r.p_static = std::stod(f[11]);
        table.rows.push_back(row);
    }
    score_table(table);
    return table;
}

std::string ScoreTable::summary_json() const {
    nlohmann::json j;
    auto row_json = [&](size_t k) {
        const auto& row = rows[k];
        nlohmann::json o;
        o["row"] = k;
        o["kind"] = to_string(row.rec.kind);
        o["v_supp_V"] = row.rec.v_supp;
        if (row.rec.c_mem) o["c_mem_fF"] = *row.rec.c_mem * 1e15;
        o["c_res_fF"] = row.rec.c_res * 1e15;
        o["f_spike_Hz"] = row.rec.f_spike;
        if (row.rec.e_spike) o["e_spike_J"] = *row.rec.e_spike;
        if (row.score_literal) o["score_literal"] = *row.score_literal;
        if (row.score_corrected) o["score_corrected"] = *row.score_corrected;
        return o;
    };
    j["rows"] = rows.size();
    size_t valid = 0;
    for (const auto& r : rows) valid += r.valid ? 1 : 0;
    j["valid_rows"] = valid;
    if (valid > 0) {
        j["extremes"] = {{"e_min_J", extremes.e_min},
                         {"e_max_J", extremes.e_max},
                         {"f_min_Hz", extremes.f_min},
                         {"f_max_Hz", extremes.f_max}};
        if (best_literal) j["best_literal"] = row_json(*best_literal);
        if (best_corrected) j["best_corrected"] = row_json(*best_corrected);
        nlohmann::json front = nlohmann::json::array();
        for (size_t k : pareto) front.push_back(row_json(k));
        j["pareto_front"] = front;
    }
    if (!static_ladder.empty()) {
        nlohmann::json lad = nlohmann::json::array();
        for (const auto& [v, p] : static_ladder)
            lad.push_back({{"v_supp_V", v}, {"p_static_W", p}});
        j["static_ladder"] = lad;
    }
    return j.dump(2) + "\n";
}

} // namespace spikeforge
