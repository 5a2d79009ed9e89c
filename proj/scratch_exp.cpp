// scratch experiment: do the three neurons oscillate at the Fig-2-style
// operating point with the current preset? (not part of the build)
#include <cstdio>
#include <cmath>
#include "spikeforge/devmodel.hpp"
#include "spikeforge/netlist.hpp"
#include "spikeforge/solver.hpp"

using namespace spikeforge;

static void probe_device() {
    auto dd = DeviceDefaults::finfet7();
    std::printf("i_spec_n = %.6g A\n", dd.nmos.i_spec);
    std::printf("I(0.7,0.7)   = %.6g A\n", drain_current(dd.nmos, 0.7, 0, 0.7, 0));
    std::printf("I(0.2,0.2)   = %.6g A\n", drain_current(dd.nmos, 0.2, 0, 0.2, 0));
    std::printf("I(0.25,0.25) = %.6g A\n", drain_current(dd.nmos, 0.25, 0, 0.25, 0));
    std::printf("I(0.1,0.1)   = %.6g A\n", drain_current(dd.nmos, 0.1, 0, 0.1, 0));
    std::printf("Ioff(0,0.2)  = %.6g A\n", drain_current(dd.nmos, 0.0, 0, 0.2, 0));
}

static void run_neuron(NeuronKind kind, double vsupp, double isyn, double tend) {
    NeuronConfig cfg;
    cfg.kind = kind;
    cfg.v_supp = vsupp;
    cfg.i_syn = isyn;
    cfg.c_mem = 1e-15;
    cfg.c_res = 1e-15;
    Circuit ckt = build_neuron(cfg);
    SolverOptions opt;
    opt.t_end = tend;
    Trace tr = transient(ckt, opt);
    // count rising 0.6*vsupp crossings (after below 0.4) on spike_out
    const auto& vs = tr.voltage(ckt.nodes[ckt.labels.at("spike_out")]);
    const auto& vm = tr.voltage(ckt.nodes[ckt.labels.at("membrane")]);
    bool armed = false;
    int spikes = 0;
    double first = -1, last = -1;
    for (size_t k = 0; k < vs.size(); ++k) {
        if (vs[k] < 0.4 * vsupp) armed = true;
        if (armed && vs[k] > 0.6 * vsupp) {
            ++spikes;
            if (first < 0) first = tr.time[k];
            last = tr.time[k];
            armed = false;
        }
    }
    double vmin = 1e9, vmax = -1e9;
    for (double x : vm) { vmin = std::min(vmin, x); vmax = std::max(vmax, x); }
    std::printf("%s v=%.2f isyn=%.3g: spikes=%d  f~=%.4g Hz  mem[%.3f,%.3f] steps=%zu\n",
                to_string(kind).c_str(), vsupp, isyn, spikes,
                spikes > 1 ? (spikes - 1) / (last - first) : 0.0, vmin, vmax,
                tr.samples());
}

int main() {
    probe_device();
    for (auto kind : {NeuronKind::LIF, NeuronKind::ML, NeuronKind::AH}) {
        for (double v : {0.15, 0.2, 0.45, 0.9}) run_neuron(kind, v, 100e-9, 80e-9);
    }
    // capacitance corners at 0.3 V
    for (auto kind : {NeuronKind::LIF, NeuronKind::ML, NeuronKind::AH}) {
        for (double c : {0.1e-15, 10e-15}) {
            NeuronConfig cfg;
            cfg.kind = kind;
            cfg.v_supp = 0.3;
            cfg.c_mem = c;
            cfg.c_res = c;
            Circuit ckt = build_neuron(cfg);
            SolverOptions opt;
            opt.t_end = (c > 5e-15) ? 400e-9 : 40e-9;
            Trace tr = transient(ckt, opt);
            const auto& vs = tr.voltage("n_spike");
            bool armed = false;
            int spikes = 0;
            for (size_t k = 0; k < vs.size(); ++k) {
                if (vs[k] < 0.4 * 0.3) armed = true;
                if (armed && vs[k] > 0.6 * 0.3) { ++spikes; armed = false; }
            }
            std::printf("%s caps=%.2g fF: spikes=%d over %.3g ns (steps=%zu)\n",
                        to_string(kind).c_str(), c * 1e15, spikes, opt.t_end * 1e9,
                        tr.samples());
        }
    }
    return 0;
}
