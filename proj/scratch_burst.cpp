// hunt for bursting ML circuit configurations (not part of the build)
#include <cstdio>
#include "spikeforge/metrics.hpp"

using namespace spikeforge;

int main() {
    for (double v : {0.2, 0.25, 0.3})
        for (double isyn : {60e-9, 100e-9, 140e-9, 180e-9, 240e-9})
            for (double cm : {0.5e-15, 1e-15, 4e-15})
                for (double cr : {1e-15, 5e-15, 10e-15}) {
                    NeuronConfig cfg;
                    cfg.kind = NeuronKind::ML;
                    cfg.v_supp = v;
                    cfg.i_syn = isyn;
                    cfg.c_mem = cm;
                    cfg.c_res = cr;
                    MetricsRecord rec = measure_circuit(cfg);
                    std::printf(
                        "v=%.2f isyn=%5.0fn cm=%4.1ff cr=%4.1ff -> %-9s f=%.3g%s\n",
                        v, isyn * 1e9, cm * 1e15, cr * 1e15,
                        to_string(rec.pattern).c_str(), rec.f_spike,
                        rec.converged ? "" : " FAIL");
                    std::fflush(stdout);
                }
    return 0;
}
