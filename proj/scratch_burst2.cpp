// fine scan of the ML excitation boundary (not part of the build)
#include <cstdio>
#include "spikeforge/metrics.hpp"

using namespace spikeforge;

static void probe(double v, double isyn, double cm, double cr, double kslow_scale) {
    NeuronConfig cfg;
    cfg.kind = NeuronKind::ML;
    cfg.v_supp = v;
    cfg.i_syn = isyn;
    cfg.c_mem = cm;
    cfg.c_res = cr;
    if (kslow_scale > 0)
        cfg.biases["v_kslow"] =
            kslow_scale * gate_bias_for_current(cfg.devices.nmos, 6.0 * isyn);
    MetricsOptions mopt;
    SolverOptions sopt;
    MetricsRecord rec = measure_circuit(cfg, sopt, mopt, 400e-9);
    // isi histogram info
    std::printf("v=%.2f isyn=%5.1fn cm=%.1ff cr=%4.1ff ks=%.2f -> %-9s f=%.3g\n", v,
                isyn * 1e9, cm * 1e15, cr * 1e15, kslow_scale,
                to_string(rec.pattern).c_str(), rec.f_spike);
    std::fflush(stdout);
}

int main() {
    for (double v : {0.17, 0.18, 0.19})
        for (double isyn : {40e-9, 70e-9, 100e-9, 130e-9, 160e-9})
            probe(v, isyn, 1e-15, 1e-15, 0);
    for (double v : {0.17, 0.18})
        for (double isyn : {70e-9, 100e-9})
            probe(v, isyn, 1e-15, 8e-15, 0);
    return 0;
}
