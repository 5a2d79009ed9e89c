#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikeforge/devmodel.hpp"
#include "spikeforge/units.hpp"

using namespace spikeforge;

TEST_CASE("zero-bias and symmetric-terminal currents vanish") {
    auto dd = DeviceDefaults::finfet7();
    CHECK(drain_current(dd.nmos, 0, 0, 0, 0) == doctest::Approx(0.0));
    CHECK(drain_current(dd.pmos, 0, 0, 0, 0) == doctest::Approx(0.0));
    for (double vg : {0.0, 0.15, 0.4, 0.9})
        for (double v : {0.0, 0.1, 0.3}) {
            CHECK(drain_current(dd.nmos, vg, v, v, 0) == doctest::Approx(0.0));
            CHECK(drain_current(dd.pmos, vg, v, v, 0) == doctest::Approx(0.0));
        }
}

TEST_CASE("preset calibration hits the 0.7 V / 0.7 V on-current target") {
    auto dd = DeviceDefaults::finfet7();
    const double i_n = drain_current(dd.nmos, 0.7, 0, 0.7, 0);
    CHECK(i_n == doctest::Approx(40e-6).epsilon(0.05));
    // PMOS mirrored with the hole-drive factor
    const double i_p = drain_current(dd.pmos, -0.7, 0, -0.7, 0);
    CHECK(i_p == doctest::Approx(-1.2 * 40e-6).epsilon(0.05));
}

TEST_CASE("source-drain exchange flips the sign exactly") {
    auto dd = DeviceDefaults::finfet7();
    for (double vg : {0.05, 0.2, 0.5})
        for (double vs : {0.0, 0.12})
            for (double vd : {0.03, 0.3, 0.7}) {
                const double fwd = drain_current(dd.nmos, vg, vs, vd, 0);
                const double rev = drain_current(dd.nmos, vg, vd, vs, 0);
                CHECK(fwd == doctest::Approx(-rev).epsilon(1e-14));
            }
}

TEST_CASE("analytic partials match central finite differences on a 5x5x5 grid") {
    auto dd = DeviceDefaults::finfet7();
    const double h = 10e-6;
    for (const auto& p : {dd.nmos, dd.pmos}) {
        double worst = 0;
        int asserted = 0, total = 0;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c) {
                    const double vg = -0.1 + 0.2 * a;
                    const double vs = -0.1 + 0.1 * b;
                    const double vd = -0.1 + 0.2 * c;
                    const auto an = drain_current_derivs(p, vg, vs, vd, 0);
                    const double i0 = std::abs(drain_current(p, vg, vs, vd, 0));
                    // rounding floor of the central difference itself: a
                    // component is only resolvable to 1e-4 when the
                    // difference carries at least 4 digits above it
                    const double fd_noise =
                        32.0 * std::numeric_limits<double>::epsilon() *
                        std::max(i0, 1e-12) / (2 * h);
                    auto fd = [&](double dg, double ds, double dd2) {
                        return (drain_current(p, vg + dg, vs + ds, vd + dd2, 0) -
                                drain_current(p, vg - dg, vs - ds, vd - dd2, 0)) /
                               (2 * h);
                    };
                    const double num[3] = {fd(h, 0, 0), fd(0, 0, h), fd(0, h, 0)};
                    const double ana[3] = {an.gm, an.gds, an.gms};
                    for (int k = 0; k < 3; ++k) {
                        ++total;
                        const double s = std::max(std::abs(num[k]), std::abs(ana[k]));
                        if (s * 0.25e-4 <= fd_noise) continue;
                        ++asserted;
                        worst = std::max(worst, std::abs(num[k] - ana[k]) / s);
                    }
                }
        CHECK(worst <= 1e-4);
        CHECK(asserted >= (total * 3) / 5); // the oracle must keep its teeth
    }
}

TEST_CASE("channel conductance is strictly positive at the origin") {
    auto dd = DeviceDefaults::finfet7();
    CHECK(drain_current_derivs(dd.nmos, 0, 0, 0, 0).gds > 0.0);
    CHECK(drain_current_derivs(dd.pmos, 0, 0, 0, 0).gds > 0.0);
}

TEST_CASE("subthreshold transconductance efficiency approaches 1/(n Ut)") {
    auto dd = DeviceDefaults::finfet7();
    const double i = drain_current(dd.nmos, 0.10, 0, 0.20, 0);
    const auto g = drain_current_derivs(dd.nmos, 0.10, 0, 0.20, 0);
    const double want = 1.0 / (dd.nmos.slope_n * dd.nmos.thermal());
    CHECK(g.gm / i == doctest::Approx(want).epsilon(0.10));
}

TEST_CASE("gate monotonicity over the sweep window") {
    auto dd = DeviceDefaults::finfet7();
    for (int a = 0; a <= 18; ++a)
        for (int b = 0; b <= 9; ++b) {
            const double vg = 0.05 * a;
            const double vd = 0.1 * b;
            CHECK(drain_current_derivs(dd.nmos, vg, 0, vd, 0).gm >= 0.0);
        }
}

TEST_CASE("deep-subthreshold log-current slope matches the analytic swing") {
    // a higher-vt variant keeps the whole [0.05, 0.15] window in the
    // exponential regime, isolating the law from moderate inversion
    auto dd = DeviceDefaults::finfet7();
    DeviceParams p = dd.nmos;
    p.vt0 = 0.40;
    std::vector<double> xs, ys;
    for (int k = 0; k <= 20; ++k) {
        const double vgs = 0.05 + 0.005 * k;
        xs.push_back(vgs);
        ys.push_back(std::log10(drain_current(p, vgs, 0, 0.2, 0)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
    }
    const double n = double(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double want = 1.0 / (p.slope_n * p.thermal() * std::log(10.0));
    CHECK(slope == doctest::Approx(want).epsilon(0.03));
}

TEST_CASE("preset swing over the spec window stays in the 60-80 mV/dec band") {
    auto dd = DeviceDefaults::finfet7();
    std::vector<double> xs, ys;
    for (int k = 0; k <= 20; ++k) {
        const double vgs = 0.05 + 0.005 * k;
        xs.push_back(vgs);
        ys.push_back(std::log10(drain_current(dd.nmos, vgs, 0, 0.2, 0)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
    }
    const double n = double(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double swing_mv = 1000.0 / slope;
    CHECK(swing_mv >= 60.0);
    CHECK(swing_mv <= 80.0);
    // analytic value at 300 K
    const double analytic =
        dd.nmos.slope_n * dd.nmos.thermal() * std::log(10.0) * 1000.0;
    CHECK(analytic >= 60.0);
    CHECK(analytic <= 80.0);
}

TEST_CASE("non-finite terminal voltages raise a model error") {
    auto dd = DeviceDefaults::finfet7();
    CHECK_THROWS_AS(drain_current(dd.nmos, std::nan(""), 0, 0, 0), model_error);
    CHECK_THROWS_AS(
        drain_current_derivs(dd.nmos, 0, std::numeric_limits<double>::infinity(), 0, 0),
        model_error);
}

TEST_CASE("parameter validation enforces the stated ranges") {
    DeviceParams p = DeviceDefaults::finfet7().nmos;
    p.slope_n = 0.9;
    CHECK_THROWS_AS(p.validate(), model_error);
    p = DeviceDefaults::finfet7().nmos;
    p.i_spec = 0;
    CHECK_THROWS_AS(p.validate(), model_error);
    p = DeviceDefaults::finfet7().nmos;
    p.vt0 = -0.1;
    CHECK_THROWS_AS(p.validate(), model_error);
}

TEST_CASE("gate bias inversion round-trips through the current law") {
    auto dd = DeviceDefaults::finfet7();
    for (double target : {1e-9, 100e-9, 5e-6}) {
        const double vg = gate_bias_for_current(dd.nmos, target);
        const double i = drain_current(dd.nmos, vg, 0, 1.0, 0);
        CHECK(i == doctest::Approx(target).epsilon(1e-6));
    }
}
