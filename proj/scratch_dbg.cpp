// dump LIF @0.7V node trajectories around the stall (not part of the build)
#include <cstdio>
#include "spikeforge/netlist.hpp"
#include "spikeforge/solver.hpp"

using namespace spikeforge;

int main() {
    NeuronConfig cfg;
    cfg.kind = NeuronKind::LIF;
    cfg.v_supp = 0.7;
    Circuit ckt = build_lif(cfg);
    SolverOptions opt;
    opt.t_end = 8e-9;
    Trace tr = transient(ckt, opt);
    const auto& vm = tr.voltage("n_mem");
    const auto& va = tr.voltage("n_a");
    const auto& vs = tr.voltage("n_spike");
    const auto& vin = tr.voltage("n_in");
    std::printf("samples=%zu\n", tr.samples());
    double tprev = -1;
    for (size_t k = 0; k < tr.samples(); ++k) {
        if (tr.time[k] - tprev > 0.05e-9 || k + 1 == tr.samples()) {
            std::printf("t=%8.4f ns  mem=%.4f  a=%.4f  spike=%.4f  in=%.4f\n",
                        tr.time[k] * 1e9, vm[k], va[k], vs[k], vin[k]);
            tprev = tr.time[k];
        }
    }
    return 0;
}
