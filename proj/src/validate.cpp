#include "spikeforge/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikeforge/behavior.hpp"
#include "spikeforge/metrics.hpp"
#include "spikeforge/netlist.hpp"
#include "spikeforge/solver.hpp"
#include "spikeforge/units.hpp"

namespace spikeforge {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

CheckResult device_fd_check(double fault) {
    auto dd = DeviceDefaults::finfet7();
    CheckResult res{"device jacobian vs finite differences", false, ""};
    const double h = 10e-6;
    double worst = 0;
    for (const auto& p_base : {dd.nmos, dd.pmos}) {
        DeviceParams p = p_base;
        p.i_spec *= fault;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c) {
                    const double vg = -0.1 + 0.2 * a;
                    const double vs = -0.1 + 0.1 * b;
                    const double vd = -0.1 + 0.2 * c;
                    const auto an = drain_current_derivs(p, vg, vs, vd, 0.0);
                    const double i0 = std::abs(drain_current(p, vg, vs, vd, 0.0));
                    // skip components the central difference cannot
                    // resolve to 1e-4 in double precision
                    const double fd_noise =
                        32.0 * std::numeric_limits<double>::epsilon() *
                        std::max(i0, 1e-12) / (2.0 * h);
                    auto fd = [&](double dg, double ds, double dd2) {
                        return (drain_current(p, vg + dg, vs + ds, vd + dd2, 0.0) -
                                drain_current(p, vg - dg, vs - ds, vd - dd2, 0.0)) /
                               (2.0 * h);
                    };
                    const double num[3] = {fd(h, 0, 0), fd(0, 0, h), fd(0, h, 0)};
                    const double ana[3] = {an.gm, an.gds, an.gms};
                    for (int k = 0; k < 3; ++k) {
                        const double scale =
                            std::max(std::abs(num[k]), std::abs(ana[k]));
                        if (scale * 0.25e-4 <= fd_noise) continue;
                        worst = std::max(worst, std::abs(num[k] - ana[k]) / scale);
                    }
                }
    }
    res.pass = worst <= 1e-4;
    res.detail = "max relative error " + fmt(worst) +
                 " (tol 1e-4, 125-point grid, FD-resolvable components)";
    return res;
}

CheckResult swing_check(double fault) {
    auto dd = DeviceDefaults::finfet7();
    DeviceParams p = dd.nmos;
    p.i_spec *= fault;
    CheckResult res{"subthreshold swing in [60, 80] mV/dec", false, ""};
    // least-squares slope of log10(I) over vgs in [0.05, 0.15] V
    std::vector<double> xs, ys;
    for (int k = 0; k <= 20; ++k) {
        const double vgs = 0.05 + 0.005 * k;
        xs.push_back(vgs);
        ys.push_back(std::log10(drain_current(p, vgs, 0.0, 0.2, 0.0)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k]; sy += ys[k];
        sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double swing_mv = 1000.0 / slope;
    res.pass = swing_mv >= 60.0 && swing_mv <= 80.0;
    res.detail = "measured " + fmt(swing_mv) + " mV/dec";
    return res;
}

CheckResult rc_check() {
    CheckResult res{"RC transient vs analytic exponential", false, ""};
    Circuit ckt;
    NodeId n1 = ckt.add_node("n1");
    ckt.capacitors.push_back({"C1", 1e-15, n1, 0});
    ckt.resistors.push_back({"R1", 1e6, n1, 0});
    SolverOptions opt;
    opt.t_end = 5e-9; // 5 tau
    opt.initial_v = {{"n1", 0.5}};
    opt.dt_max = 10e-12;
    Trace tr = transient(ckt, opt);
    const double rc = 1e6 * 1e-15;
    double worst = 0;
    for (size_t k = 0; k < tr.samples(); ++k) {
        const double exact = 0.5 * std::exp(-tr.time[k] / rc);
        worst = std::max(worst, std::abs(tr.v[0][k] - exact) / 0.5);
    }
    res.pass = worst <= 1e-3;
    res.detail = "max relative error " + fmt(worst) + " over 5 tau (tol 1e-3)";
    return res;
}

double lif_formula_rate(const LifParams& p, double i) {
    const double arg = 1.0 - (p.v_th - p.v_rest) / (p.r_mem * i);
    return 1.0 / (p.t_ref - p.tau_m * std::log(arg));
}

double measured_rate(const BehavioralTrace& tr) {
    SpikeTrain train;
    train.spike_times = tr.spike_times;
    return spike_frequency(train, 3);
}

CheckResult lif_closed_form_check(double fault) {
    CheckResult res{"LIF closed-form firing rate", false, ""};
    struct Point { LifParams p; double i; };
    LifParams ghz;           // charge-to-threshold point: 1 fF, 0.1 V, 100 nA
    ghz.tau_m = 1e-6;
    ghz.r_mem = 1e9;
    ghz.v_th = 0.1;
    LifParams leaky;
    leaky.tau_m = 20e-9;
    leaky.r_mem = 2e6;       // C_eff = 10 fF
    leaky.v_th = 0.12;
    LifParams refr = leaky;
    refr.t_ref = 5e-9;
    const Point pts[3] = {{ghz, 100e-9}, {leaky, 100e-9}, {refr, 100e-9}};
    double worst = 0;
    for (const auto& [p, i] : pts) {
        SynParams syn;
        syn.tonic = true;
        syn.i0 = i * fault; // fault hook: the drive the simulation sees
        const double want = lif_formula_rate(p, i);
        const auto tr = simulate_lif(p, syn, 12.0 / want);
        const double got = measured_rate(tr);
        worst = std::max(worst, std::abs(got - want) / want);
    }
    // the 1 GHz point also pins the absolute charge-to-threshold value
    const double ghz_want = 1e9;
    SynParams syn;
    syn.tonic = true;
    syn.i0 = 100e-9 * fault;
    const double ghz_got = measured_rate(simulate_lif(ghz, syn, 12e-9));
    worst = std::max(worst, std::abs(ghz_got - ghz_want) / ghz_want);
    res.pass = worst <= 0.01;
    res.detail = "max relative error " + fmt(worst) + " over 3 points (tol 1e-2)";
    return res;
}

CheckResult closure_check(NeuronKind kind, double fault) {
    CheckResult res{"energy closure (" + to_string(kind) + " at 0.2 V)", false, ""};
    NeuronConfig cfg;
    cfg.kind = kind;
    cfg.v_supp = 0.2;
    cfg.i_syn = 100e-9;
    cfg.c_mem = kind == NeuronKind::AH ? std::optional<double>{} :
                                         std::optional<double>{1e-15};
    cfg.c_res = 1e-15;
    cfg.devices.nmos.i_spec *= fault;
    cfg.devices.pmos.i_spec *= fault;
    Circuit ckt = build_neuron(cfg);
    SolverOptions sopt;
    sopt.t_end = 60e-9;
    Trace tr = transient(ckt, sopt);
    Trace uni = tr.resampled(std::max(0.1e-12, sopt.t_end / 2e6));
    const auto train = detect_spikes(uni, "n_spike", cfg.v_supp);
    if (train.spike_times.size() < 5) {
        res.detail = "only " + std::to_string(train.spike_times.size()) + " spikes";
        return res;
    }
    const auto e = energy_per_spike(uni, train);
    if (!e) {
        res.detail = "energy window unavailable";
        return res;
    }
    res.pass = e->supply_ratio <= 0.01;
    res.detail = "supply/total mismatch " + fmt(e->supply_ratio * 100) +
                 " % over final 3 ISIs (tol 1 %)";
    return res;
}

} // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& opt) {
    std::vector<CheckResult> out;
    out.push_back(device_fd_check(opt.fault_current_scale));
    out.push_back(swing_check(opt.fault_current_scale));
    out.push_back(rc_check());
    out.push_back(lif_closed_form_check(opt.fault_current_scale));
    for (auto kind : {NeuronKind::LIF, NeuronKind::ML, NeuronKind::AH})
        out.push_back(closure_check(kind, opt.fault_current_scale));
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

} // namespace spikeforge
