#pragma once

#include <stdexcept>
#include <string>

namespace spikeforge {

enum class Polarity { N, P };

// Compact-model parameters for one transistor polarity.
// The I-V law is a single-piece EKV-style expression, C1-continuous in
// all terminal voltages, valid from deep subthreshold through strong
// inversion. One "fin" per device: drive strength is set solely by
// i_spec, there is no width parameter.
struct DeviceParams {
    Polarity polarity = Polarity::N;
    double vt0 = 0.19;      // threshold voltage magnitude [V], > 0
    double slope_n = 1.1;   // subthreshold slope factor, in [1, 2]
    double i_spec = 0.0;    // specific current [A], > 0
    double temp = 300.0;    // device temperature [K], sets U_T

    void validate() const;
    double thermal() const; // U_T = k*temp/q
};

struct DeviceDerivs {
    double gm;  // dI/dVg
    double gds; // dI/dVd
    double gms; // dI/dVs
};

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signed conventional drain->source current. PMOS is evaluated with all
// terminal voltages negated and the current sign flipped.
double drain_current(const DeviceParams& p, double v_g, double v_s,
                     double v_d, double v_b);

// Analytic partials of drain_current w.r.t. gate, drain and source.
DeviceDerivs drain_current_derivs(const DeviceParams& p, double v_g,
                                  double v_s, double v_d, double v_b);

// EKV interpolation function F(x) = ln^2(1 + e^{x/2}) and its
// derivative, exposed for tests; both stay finite for any |x|.
double ekv_f(double x);
double ekv_f_prime(double x);

// Gate bias (source and bulk grounded) at which the device carries
// `i_target` in saturation; closed-form inverse of the EKV law.
double gate_bias_for_current(const DeviceParams& p, double i_target);

// The "finfet7-like" preset pair. i_spec is calibrated so the NMOS
// carries on_current at V_GS = V_DS = cal_vgs; the PMOS specific
// current is scaled by pmos_drive for the stronger hole branch.
struct DeviceDefaults {
    DeviceParams nmos;
    DeviceParams pmos;
    double c_par = 0.01e-15; // parasitic capacitance per circuit node [F]

    static constexpr double cal_vgs = 0.70;      // calibration bias [V]
    static constexpr double on_current = 40e-6;  // target I_D at cal bias [A]
    static constexpr double pmos_drive = 1.2;

    static DeviceDefaults finfet7();
};

} // namespace spikeforge
