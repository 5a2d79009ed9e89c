#include "spikeforge/devmodel.hpp"

#include <cmath>

#include "spikeforge/units.hpp"

namespace spikeforge {

void DeviceParams::validate() const {
    if (!(slope_n >= 1.0 && slope_n <= 2.0))
        throw model_error("slope_n out of [1, 2]");
    if (!(i_spec > 0.0)) throw model_error("i_spec must be positive");
    if (!(vt0 > 0.0)) throw model_error("vt0 must be positive");
    if (!(temp > 0.0)) throw model_error("temp must be positive");
}

double DeviceParams::thermal() const { return thermal_voltage(temp); }

namespace {

// ln(1 + e^h), overflow-safe for any h.
inline double softplus(double h) {
    if (h > 40.0) return h + std::log1p(std::exp(-h));
    if (h < -40.0) return std::exp(h); // log1p(x) ~ x
    return std::log1p(std::exp(h));
}

inline double sigmoid(double h) {
    if (h >= 0.0) return 1.0 / (1.0 + std::exp(-h));
    double e = std::exp(h);
    return e / (1.0 + e);
}

inline void check_finite(const DeviceParams& p, double v_g, double v_s,
                         double v_d, double v_b) {
    if (!std::isfinite(v_g) || !std::isfinite(v_s) || !std::isfinite(v_d) ||
        !std::isfinite(v_b)) {
        throw model_error("non-finite terminal voltage: v_g=" +
                          std::to_string(v_g) + " v_s=" + std::to_string(v_s) +
                          " v_d=" + std::to_string(v_d) +
                          " v_b=" + std::to_string(v_b) +
                          (p.polarity == Polarity::N ? " (nmos)" : " (pmos)"));
    }
}

} // namespace

double ekv_f(double x) {
    double s = softplus(0.5 * x);
    return s * s;
}

double ekv_f_prime(double x) {
    return softplus(0.5 * x) * sigmoid(0.5 * x);
}

double drain_current(const DeviceParams& p, double v_g, double v_s,
                     double v_d, double v_b) {
    check_finite(p, v_g, v_s, v_d, v_b);
    double sign = 1.0;
    if (p.polarity == Polarity::P) {
        v_g = -v_g; v_s = -v_s; v_d = -v_d; v_b = -v_b;
        sign = -1.0;
    }
    const double ut = p.thermal();
    const double v_p = (v_g - v_b - p.vt0) / p.slope_n;
    const double xf = (v_p - (v_s - v_b)) / ut;
    const double xr = (v_p - (v_d - v_b)) / ut;
    return sign * p.i_spec * (ekv_f(xf) - ekv_f(xr));
}

DeviceDerivs drain_current_derivs(const DeviceParams& p, double v_g,
                                  double v_s, double v_d, double v_b) {
    check_finite(p, v_g, v_s, v_d, v_b);
    if (p.polarity == Polarity::P) {
        // I_P(v) = -I_core(-v), so dI_P/dv = dI_core/dv at the mirrored
        // point: conductances carry over unchanged.
        v_g = -v_g; v_s = -v_s; v_d = -v_d; v_b = -v_b;
    }
    const double ut = p.thermal();
    const double v_p = (v_g - v_b - p.vt0) / p.slope_n;
    const double xf = (v_p - (v_s - v_b)) / ut;
    const double xr = (v_p - (v_d - v_b)) / ut;
    const double ff = ekv_f_prime(xf);
    const double fr = ekv_f_prime(xr);
    DeviceDerivs d;
    d.gm = p.i_spec * (ff - fr) / (p.slope_n * ut);
    d.gds = p.i_spec * fr / ut;
    d.gms = -p.i_spec * ff / ut;
    return d;
}

double gate_bias_for_current(const DeviceParams& p, double i_target) {
    if (!(i_target > 0)) throw model_error("bias target current must be positive");
    // F(x) = ln^2(1+e^{x/2})  =>  x = 2 ln(e^{sqrt(F)} - 1)
    const double root = std::sqrt(i_target / p.i_spec);
    const double x = 2.0 * std::log(std::expm1(root));
    return p.vt0 + p.slope_n * (x * p.thermal());
}

DeviceDefaults DeviceDefaults::finfet7() {
    DeviceDefaults dd;
    dd.nmos.polarity = Polarity::N;
    dd.nmos.i_spec = 1.0; // placeholder, rescaled below
    // scale i_spec so I_D(cal_vgs, cal_vgs) lands exactly on target;
    // the EKV current is linear in i_spec so no iteration is needed
    double unit = drain_current(dd.nmos, cal_vgs, 0.0, cal_vgs, 0.0);
    dd.nmos.i_spec = on_current / unit;
    dd.pmos = dd.nmos;
    dd.pmos.polarity = Polarity::P;
    dd.pmos.i_spec = dd.nmos.i_spec * pmos_drive;
    dd.nmos.validate();
    dd.pmos.validate();
    return dd;
}

} // namespace spikeforge
