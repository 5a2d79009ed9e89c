// measure membrane rise/drop structure at the Fig-2-style point
#include <cstdio>
#include <algorithm>
#include "spikeforge/metrics.hpp"

using namespace spikeforge;

int main() {
    for (auto kind : {NeuronKind::LIF, NeuronKind::ML, NeuronKind::AH}) {
        NeuronConfig cfg;
        cfg.kind = kind;
        cfg.v_supp = 0.2;
        cfg.i_syn = 100e-9;
        cfg.c_mem = kind == NeuronKind::AH ? std::optional<double>{}
                                           : std::optional<double>{1e-15};
        cfg.c_res = 1e-15;
        Circuit ckt = build_neuron(cfg);
        SolverOptions opt;
        opt.t_end = 60e-9;
        Trace uni = transient(ckt, opt).resampled(1e-12);
        for (const char* node : {"n_mem", "n_spike"}) {
            const auto& v = uni.voltage(node);
            const size_t W = 500; // 0.5 ns at 1 ps
            double best_drop = 0;
            // max drop achieved within any 0.5 ns forward window
            for (size_t k = 0; k + W < v.size(); ++k) {
                double mn = v[k];
                for (size_t j = k; j <= k + W; ++j) mn = std::min(mn, v[j]);
                best_drop = std::max(best_drop, v[k] - mn);
            }
            double vmax = *std::max_element(v.begin(), v.end());
            double vmin = *std::min_element(v.begin(), v.end());
            std::printf("%s %-8s range [%.4f, %.4f]  max 0.5ns drop %.4f (0.3*v=%.3f)\n",
                        to_string(kind).c_str(), node, vmin, vmax, best_drop, 0.06);
        }
    }
    return 0;
}
