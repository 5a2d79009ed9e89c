#include <algorithm>
#include <cstdio>
#include "spikeforge/behavior.hpp"
#include "spikeforge/metrics.hpp"

using namespace spikeforge;

static void probe(double i_ext, double alpha, double eps) {
    MlParams p;
    p.gating.phi = 230.0; // homoclinic regime: bistable fast subsystem
    p.i_ext = i_ext;
    p.burst.alpha = alpha;
    p.burst.z_half = 0.0;
    p.burst.z_slope = 4e-3;
    p.burst.epsilon = eps;
    auto tr = simulate_ml(p, 12.0, true);
    SpikeTrain train;
    train.spike_times = tr.spike_times;
    train.pattern = classify_pattern(train);
    auto isis = train.isis();
    double ratio = 0;
    if (!isis.empty())
        ratio = *std::max_element(isis.begin(), isis.end()) /
                *std::min_element(isis.begin(), isis.end());
    std::printf("I=%.0fu a=%.1fm eps=%.1f: n=%3zu ratio=%7.2f %s\n  isis(ms):",
                i_ext * 1e6, alpha * 1e3, eps, train.spike_times.size(), ratio,
                to_string(train.pattern).c_str());
    for (size_t k = 0; k < isis.size() && k < 30; ++k)
        std::printf(" %.0f", isis[k] * 1e3);
    std::printf("\n");
    std::fflush(stdout);
}

int main() {
    for (double i : {36e-6, 40e-6, 44e-6})
        for (double a : {1e-3, 2e-3, 4e-3})
            for (double e : {1.0, 2.0}) probe(i, a, e);
    return 0;
}
