// locate the worst FD-vs-analytic point (not part of the build)
#include <cstdio>
#include <cmath>
#include "spikeforge/devmodel.hpp"

using namespace spikeforge;

int main() {
    auto dd = DeviceDefaults::finfet7();
    const double h = 10e-6;
    const auto& p = dd.nmos;
    double worst = 0;
    double wg = 0, ws = 0, wd = 0;
    int wk = -1;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c) {
                const double vg = -0.1 + 0.2 * a;
                const double vs = -0.1 + 0.1 * b;
                const double vd = -0.1 + 0.2 * c;
                const auto an = drain_current_derivs(p, vg, vs, vd, 0);
                auto fd = [&](double dg, double ds, double dd2) {
                    return (drain_current(p, vg + dg, vs + ds, vd + dd2, 0) -
                            drain_current(p, vg - dg, vs - ds, vd - dd2, 0)) /
                           (2 * h);
                };
                const double num[3] = {fd(h, 0, 0), fd(0, 0, h), fd(0, h, 0)};
                const double ana[3] = {an.gm, an.gds, an.gms};
                for (int k = 0; k < 3; ++k) {
                    const double s = std::max(std::abs(num[k]), std::abs(ana[k]));
                    if (s < 1e-15) continue;
                    const double err = std::abs(num[k] - ana[k]) / s;
                    if (err > worst) { worst = err; wg = vg; ws = vs; wd = vd; wk = k; }
                }
            }
    std::printf("worst=%.3g at vg=%.2f vs=%.2f vd=%.2f comp=%d\n", worst, wg, ws, wd, wk);
    const auto an = drain_current_derivs(p, wg, ws, wd, 0);
    std::printf("analytic gm=%.9g gds=%.9g gms=%.9g\n", an.gm, an.gds, an.gms);
    auto fd = [&](double dg, double ds, double dd2) {
        return (drain_current(p, wg + dg, ws + ds, wd + dd2, 0) -
                drain_current(p, wg - dg, ws - ds, wd - dd2, 0)) / (2 * h);
    };
    std::printf("numeric  gm=%.9g gds=%.9g gms=%.9g\n", fd(h, 0, 0), fd(0, 0, h), fd(0, h, 0));
    std::printf("I=%.9g\n", drain_current(p, wg, ws, wd, 0));
    return 0;
}
