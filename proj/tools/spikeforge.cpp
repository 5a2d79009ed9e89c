// spikeforge: spiking-neuron circuit simulation and design-space
// exploration. Subcommands: sim | sweep | report | validate.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spikeforge/behavior.hpp"
#include "spikeforge/metrics.hpp"
#include "spikeforge/netlist.hpp"
#include "spikeforge/report.hpp"
#include "spikeforge/solver.hpp"
#include "spikeforge/sweep.hpp"
#include "spikeforge/units.hpp"
#include "spikeforge/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spikeforge;

namespace {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// config values may be JSON numbers or SI-suffixed strings ("100n")
double num(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_si(j.get<std::string>());
    throw config_error("expected a number or SI string, got " + j.dump());
}

DeviceParams device_from_json(const json& j, Polarity pol) {
    DeviceParams p;
    p.polarity = pol;
    if (j.contains("vt0")) p.vt0 = num(j["vt0"]);
    if (j.contains("slope_n")) p.slope_n = num(j["slope_n"]);
    if (j.contains("i_spec")) p.i_spec = num(j["i_spec"]);
    if (j.contains("temp")) p.temp = num(j["temp"]);
    p.validate();
    return p;
}

DeviceDefaults resolve_devices(const json& cfg) {
    DeviceDefaults dd = DeviceDefaults::finfet7();
    std::string preset = cfg.value("device_preset", std::string("finfet7-like"));
    if (preset != "finfet7-like") {
        if (!cfg.contains("presets") || !cfg["presets"].contains(preset))
            throw config_error("preset '" + preset + "' not found in config");
        const json& pj = cfg["presets"][preset];
        if (pj.contains("nmos")) dd.nmos = device_from_json(pj["nmos"], Polarity::N);
        if (pj.contains("pmos")) dd.pmos = device_from_json(pj["pmos"], Polarity::P);
        if (pj.contains("c_par")) dd.c_par = num(pj["c_par"]);
    }
    if (cfg.contains("device")) {
        const json& dj = cfg["device"];
        if (dj.contains("nmos")) dd.nmos = device_from_json(dj["nmos"], Polarity::N);
        if (dj.contains("pmos")) dd.pmos = device_from_json(dj["pmos"], Polarity::P);
        if (dj.contains("c_par")) dd.c_par = num(dj["c_par"]);
    }
    return dd;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& ex) {
        throw config_error("config parse error in " + path + ": " + ex.what());
    }
    return j;
}

void apply_solver_json(SolverOptions& opt, const json& j) {
    if (j.contains("reltol")) opt.reltol = num(j["reltol"]);
    if (j.contains("abstol_i")) opt.abstol_i = num(j["abstol_i"]);
    if (j.contains("abstol_v")) opt.abstol_v = num(j["abstol_v"]);
    if (j.contains("gmin")) opt.gmin = num(j["gmin"]);
    if (j.contains("max_newton_iters")) opt.max_newton_iters = j["max_newton_iters"];
    if (j.contains("dt_init")) opt.dt_init = num(j["dt_init"]);
    if (j.contains("dt_min")) opt.dt_min = num(j["dt_min"]);
    if (j.contains("dt_max")) opt.dt_max = num(j["dt_max"]);
    if (j.contains("t_end")) opt.t_end = num(j["t_end"]);
    if (j.contains("lte_tol")) opt.lte_tol = num(j["lte_tol"]);
}

void apply_metrics_json(MetricsOptions& opt, const json& j) {
    if (j.contains("grid_dt")) opt.grid_dt = num(j["grid_dt"]);
    if (j.contains("discard_first")) opt.discard_first = j["discard_first"];
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_si(tok));
    }
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path().string());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw config_error("cannot write " + p.string());
    f << text;
}

json record_json(const MetricsRecord& r) {
    json j;
    j["kind"] = to_string(r.kind);
    j["level"] = r.level;
    j["v_supp_V"] = r.v_supp;
    if (r.c_mem) j["c_mem_fF"] = *r.c_mem * 1e15;
    j["c_res_fF"] = r.c_res * 1e15;
    j["i_syn_nA"] = r.i_syn * 1e9;
    j["f_spike_Hz"] = r.f_spike;
    if (r.e_spike) j["e_spike_J"] = *r.e_spike;
    if (r.p_static) j["p_static_W"] = *r.p_static;
    j["pattern"] = to_string(r.pattern);
    j["converged"] = r.converged;
    j["settled"] = r.settled;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

struct SimArgs {
    std::string config_path, kind = "lif", level = "circuit", out_dir = "out";
    std::string vsupp, cmem, cres, isyn, tend;
    std::vector<std::string> biases;
    bool burst = false;
};

int cmd_sim(const SimArgs& a) {
    const json cfg = load_config(a.config_path);
    NeuronConfig nc;
    nc.devices = resolve_devices(cfg);
    if (cfg.contains("neuron")) {
        const json& nj = cfg["neuron"];
        if (nj.contains("kind")) nc.kind = neuron_kind_from_string(nj["kind"]);
        if (nj.contains("v_supp")) nc.v_supp = num(nj["v_supp"]);
        if (nj.contains("c_mem")) nc.c_mem = num(nj["c_mem"]);
        if (nj.contains("c_res")) nc.c_res = num(nj["c_res"]);
        if (nj.contains("i_syn")) nc.i_syn = num(nj["i_syn"]);
        if (nj.contains("biases"))
            for (auto& [k, v] : nj["biases"].items()) nc.biases[k] = num(v);
    }
    if (!a.kind.empty()) nc.kind = neuron_kind_from_string(a.kind);
    if (!a.vsupp.empty()) nc.v_supp = parse_si(a.vsupp);
    if (!a.cmem.empty()) nc.c_mem = parse_si(a.cmem);
    if (!a.cres.empty()) nc.c_res = parse_si(a.cres);
    if (!a.isyn.empty()) nc.i_syn = parse_si(a.isyn);
    for (const auto& b : a.biases) {
        const auto eq = b.find('=');
        if (eq == std::string::npos) throw config_error("bias must be name=value");
        nc.biases[b.substr(0, eq)] = parse_si(b.substr(eq + 1));
    }
    if (nc.kind == NeuronKind::AH) nc.c_mem.reset();

    SolverOptions sopt;
    MetricsOptions mopt;
    if (cfg.contains("solver")) apply_solver_json(sopt, cfg["solver"]);
    if (cfg.contains("metrics")) apply_metrics_json(mopt, cfg["metrics"]);
    double t_end = a.tend.empty() ? 0.0 : parse_si(a.tend);

    const std::string out_dir = cfg.value("out_dir", a.out_dir);
    if (a.level == "circuit") {
        MetricsRecord rec = measure_circuit(nc, sopt, mopt, t_end);
        if (!rec.converged) throw solver_error("simulation failed: " + rec.note);
        // rerun once more for the waveform dump at the same window
        Circuit ckt = build_neuron(nc);
        SolverOptions dump_opt = sopt;
        dump_opt.t_end = t_end > 0 ? t_end : [&] {
            const double c_sum = (nc.c_mem ? *nc.c_mem : 0.0) + nc.c_res;
            const double period =
                2.5 * c_sum * (0.6 * nc.v_supp) / std::max(nc.i_syn, 1e-9);
            return std::clamp(12.0 * period, 50e-9, 2000e-9);
        }();
        Trace tr = transient(ckt, dump_opt);
        write_file(fs::path(out_dir) / "trace.csv", tr.to_csv());
        write_file(fs::path(out_dir) / "netlist.txt", ckt.dump());
        write_file(fs::path(out_dir) / "metrics.json", record_json(rec).dump(2) + "\n");
        std::cerr << "wrote " << out_dir << "/trace.csv, metrics.json (f="
                  << format_double(rec.f_spike) << " Hz)\n";
        return 0;
    }
    // behavioral level
    BehavioralTrace tr;
    MetricsRecord rec;
    rec.kind = nc.kind;
    rec.level = "behavioral";
    rec.v_supp = nc.v_supp;
    rec.c_res = nc.c_res;
    rec.i_syn = nc.i_syn;
    SynParams syn;
    syn.tonic = true;
    syn.i0 = nc.i_syn;
    const double v_th = 0.5 * nc.v_supp;
    if (nc.kind == NeuronKind::LIF) {
        rec.c_mem = nc.c_mem;
        LifParams p;
        p.r_mem = 1e9;
        p.tau_m = p.r_mem * (nc.c_mem ? *nc.c_mem : 1e-15);
        p.v_th = v_th;
        const double period =
            (nc.c_mem ? *nc.c_mem : 1e-15) * v_th / std::max(nc.i_syn, 1e-12);
        tr = simulate_lif(p, syn, t_end > 0 ? t_end : 12 * period);
    } else if (nc.kind == NeuronKind::AH) {
        AhParams p;
        p.c = nc.c_res;
        p.v_th = v_th;
        p.i_reset = 3.0 * std::max(nc.i_syn, 1e-12);
        const double period =
            nc.c_res * v_th * (1.0 / std::max(nc.i_syn, 1e-12) + 1.0 / p.i_reset);
        tr = simulate_ah(p, syn, t_end > 0 ? t_end : 12 * period);
    } else {
        MlParams p; // documented canonical set; circuit knobs do not map
        tr = simulate_ml(p, t_end > 0 ? t_end : 2.0, a.burst);
    }
    SpikeTrain train;
    train.spike_times = tr.spike_times;
    train.pattern = classify_pattern(train);
    rec.pattern = train.pattern;
    rec.f_spike = spike_frequency(train);
    write_file(fs::path(out_dir) / "trace.csv", tr.to_csv());
    write_file(fs::path(out_dir) / "metrics.json", record_json(rec).dump(2) + "\n");
    std::cerr << "wrote " << out_dir << "/trace.csv, metrics.json (f="
              << format_double(rec.f_spike) << " Hz)\n";
    return 0;
}

struct SweepArgs {
    std::string config_path, kind = "lif", level = "circuit", out_dir = "out";
    std::string vsupp_list, cmem_list, cres_list, isyn, tend;
    int threads = 0;
    bool no_static = false;
};

int cmd_sweep(const SweepArgs& a) {
    const json cfg = load_config(a.config_path);
    SweepSpec spec;
    if (cfg.contains("sweep")) {
        const json& sj = cfg["sweep"];
        if (sj.contains("kind")) spec.kind = neuron_kind_from_string(sj["kind"]);
        if (sj.contains("level")) spec.level = sj["level"];
        auto list = [&](const char* key) {
            std::vector<double> v;
            for (const auto& x : sj[key]) v.push_back(num(x));
            return v;
        };
        if (sj.contains("v_supp_values")) spec.v_supp_values = list("v_supp_values");
        if (sj.contains("c_mem_values")) spec.c_mem_values = list("c_mem_values");
        if (sj.contains("c_res_values")) spec.c_res_values = list("c_res_values");
        if (sj.contains("i_syn")) spec.i_syn = num(sj["i_syn"]);
        if (sj.contains("threads")) spec.threads = sj["threads"];
        if (sj.contains("t_end")) spec.t_end = num(sj["t_end"]);
        if (sj.contains("with_static")) spec.with_static = sj["with_static"];
    }
    if (cfg.contains("solver")) apply_solver_json(spec.solver, cfg["solver"]);
    if (cfg.contains("metrics")) apply_metrics_json(spec.metrics, cfg["metrics"]);
    if (!a.kind.empty()) spec.kind = neuron_kind_from_string(a.kind);
    if (!a.level.empty()) spec.level = a.level;
    if (!a.vsupp_list.empty()) spec.v_supp_values = parse_list(a.vsupp_list);
    if (!a.cmem_list.empty()) spec.c_mem_values = parse_list(a.cmem_list);
    if (!a.cres_list.empty()) spec.c_res_values = parse_list(a.cres_list);
    if (!a.isyn.empty()) spec.i_syn = parse_si(a.isyn);
    if (!a.tend.empty()) spec.t_end = parse_si(a.tend);
    if (a.threads > 0) spec.threads = a.threads;
    if (a.no_static) spec.with_static = false;
    spec.fill_defaults();
    spec.validate();

    std::cerr << "sweep: " << expand_grid(spec).size() << " configurations ("
              << to_string(spec.kind) << ", " << spec.level << ")\n";
    ScoreTable table = run_sweep(spec);
    const std::string out_dir = cfg.value("out_dir", a.out_dir);
    write_file(fs::path(out_dir) / "score_table.csv", table.to_csv());
    write_file(fs::path(out_dir) / "summary.json", table.summary_json());
    std::cerr << "wrote " << out_dir << "/score_table.csv, summary.json\n";
    return 0;
}

int cmd_report(const std::string& table_path, const std::string& out_dir,
               bool average_scores) {
    std::ifstream f(table_path, std::ios::binary);
    if (!f) throw config_error("cannot open score table: " + table_path);
    std::stringstream buf;
    buf << f.rdbuf();
    ScoreTable table = ScoreTable::from_csv(buf.str());
    ReportOptions ropt;
    ropt.average_scores = average_scores;
    write_report(make_report(table, ropt), out_dir);
    std::cerr << "wrote report tables under " << out_dir << "\n";
    return 0;
}

int cmd_validate(double fault_scale) {
    ValidateOptions opt;
    opt.fault_current_scale = fault_scale;
    const auto results = run_validation(opt);
    for (const auto& r : results)
        std::printf("%s - %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
    return all_passed(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spiking-neuron circuit simulator and design-space explorer"};
    app.require_subcommand(1);

    SimArgs sim;
    auto* s = app.add_subcommand("sim", "one transient run, waveform CSV + metrics");
    s->add_option("--config", sim.config_path, "JSON run configuration");
    s->add_option("--kind", sim.kind, "lif | ml | ah")->capture_default_str();
    s->add_option("--level", sim.level, "circuit | behavioral")
        ->check(CLI::IsMember({"circuit", "behavioral"}))
        ->capture_default_str();
    s->add_option("--vsupp", sim.vsupp, "supply voltage, e.g. 0.2");
    s->add_option("--cmem", sim.cmem, "membrane capacitance, e.g. 1f");
    s->add_option("--cres", sim.cres, "reset capacitance, e.g. 1f");
    s->add_option("--isyn", sim.isyn, "synapse current, e.g. 100n");
    s->add_option("--tend", sim.tend, "simulation window, e.g. 100n");
    s->add_option("--bias", sim.biases, "bias override name=value (repeatable)");
    s->add_flag("--burst", sim.burst, "enable the ML burst term (behavioral)");
    s->add_option("--out", sim.out_dir, "output directory")->capture_default_str();

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "parametric sweep, score table CSV + JSON");
    w->add_option("--config", sw.config_path, "JSON run configuration");
    w->add_option("--kind", sw.kind, "lif | ml | ah")->capture_default_str();
    w->add_option("--level", sw.level, "circuit | behavioral")
        ->check(CLI::IsMember({"circuit", "behavioral"}))
        ->capture_default_str();
    w->add_option("--vsupp-list", sw.vsupp_list, "comma list, e.g. 0.2,0.3");
    w->add_option("--cmem-list", sw.cmem_list, "comma list, e.g. 0.5f,1f");
    w->add_option("--cres-list", sw.cres_list, "comma list");
    w->add_option("--isyn", sw.isyn, "synapse current");
    w->add_option("--tend", sw.tend, "per-config window override");
    w->add_option("--threads", sw.threads, "worker count (SPIKEFORGE_THREADS wins)");
    w->add_flag("--no-static", sw.no_static, "skip the static-power ladder");
    w->add_option("--out", sw.out_dir, "output directory")->capture_default_str();

    std::string table_path, report_out = "out";
    bool average_scores = false;
    auto* r = app.add_subcommand("report", "derived tables from a sweep CSV");
    r->add_option("--table", table_path, "score_table.csv path")->required();
    r->add_option("--out", report_out, "output directory")->capture_default_str();
    r->add_flag("--average-scores", average_scores,
                "average per-row scores instead of scoring averaged metrics");

    double fault_scale = 1.0;
    auto* v = app.add_subcommand("validate", "run the pinned oracle suite");
    v->add_option("--fault-scale", fault_scale,
                  "test hook: scale device/synapse currents")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (s->parsed()) return cmd_sim(sim);
        if (w->parsed()) return cmd_sweep(sw);
        if (r->parsed()) return cmd_report(table_path, report_out, average_scores);
        if (v->parsed()) return cmd_validate(fault_scale);
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const construction_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
