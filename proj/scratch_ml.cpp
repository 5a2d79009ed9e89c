// dump ML @0.2V node trajectories (not part of the build)
#include <cstdio>
#include "spikeforge/netlist.hpp"
#include "spikeforge/solver.hpp"

using namespace spikeforge;

int main(int argc, char** argv) {
    NeuronConfig cfg;
    cfg.kind = NeuronKind::ML;
    cfg.v_supp = argc > 1 ? std::atof(argv[1]) : 0.2;
    Circuit ckt = build_ml(cfg);
    SolverOptions opt;
    opt.t_end = 30e-9;
    Trace tr = transient(ckt, opt);
    const auto& vm = tr.voltage("n_mem");
    const auto& va = tr.voltage("n_a");
    const auto& vs = tr.voltage("n_spike");
    const auto& vk = tr.voltage("n_k");
    std::printf("samples=%zu\n", tr.samples());
    double tprev = -1;
    for (size_t k = 0; k < tr.samples(); ++k) {
        if (tr.time[k] - tprev > 0.2e-9 || k + 1 == tr.samples()) {
            std::printf("t=%8.4f ns  mem=%.4f  a=%.4f  spike=%.4f  k=%.4f\n",
                        tr.time[k] * 1e9, vm[k], va[k], vs[k], vk[k]);
            tprev = tr.time[k];
        }
    }
    return 0;
}
