#include "spikeforge/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikeforge/units.hpp"

namespace spikeforge {

void SynParams::validate() const {
    if (!(i0 >= 0)) throw behavior_error("syn i0 must be nonnegative");
    if (!(tau_syn > 0)) throw behavior_error("tau_syn must be positive");
    if (!std::is_sorted(event_times.begin(), event_times.end()))
        throw behavior_error("event_times must be ascending");
}

void LifParams::validate() const {
    if (!(tau_m > 0 && r_mem > 0)) throw behavior_error("tau_m, r_mem must be positive");
    if (!(v_th > v_rest)) throw behavior_error("need v_th > v_rest");
    if (!(t_ref >= 0)) throw behavior_error("t_ref must be nonnegative");
}

void MlParams::validate() const {
    if (!(c > 0)) throw behavior_error("ml capacitance must be positive");
    if (g_ca < 0 || g_k < 0 || g_l < 0)
        throw behavior_error("ml conductances must be nonnegative");
    if (!(e_ca > e_l && e_l > e_k))
        throw behavior_error("need e_ca > e_l > e_k");
}

void AhParams::validate() const {
    if (!(c > 0 && g_l > 0 && i_reset > 0))
        throw behavior_error("ah c, g_l, i_reset must be positive");
    if (!(v_th > v_floor)) throw behavior_error("need v_th > v_floor");
}

double syn_current(const SynParams& p, double t) {
    if (p.tonic) return p.i0;
    double i = 0;
    for (double tk : p.event_times) {
        if (tk > t) break;
        i += p.i0 * std::exp(-(t - tk) / p.tau_syn);
    }
    return i;
}

std::string BehavioralTrace::to_csv() const {
    std::ostringstream os;
    os << "time_s,v_m";
    if (!w.empty()) os << ",w";
    if (!z.empty()) os << ",z";
    if (!i_leak.empty()) os << ",i_leak_a";
    os << "\n";
    for (size_t k = 0; k < time.size(); ++k) {
        os << format_double(time[k]) << "," << format_double(v_m[k]);
        if (!w.empty()) os << "," << format_double(w[k]);
        if (!z.empty()) os << "," << format_double(z[k]);
        if (!i_leak.empty()) os << "," << format_double(i_leak[k]);
        os << "\n";
    }
    return os.str();
}

BehavioralTrace simulate_lif(const LifParams& p, const SynParams& syn,
                             double t_end, double dt_override) {
    p.validate();
    syn.validate();
    if (!(t_end > 0)) throw behavior_error("t_end must be positive");

    // resolve both the membrane time constant and the charge ramp
    const double c_eff = p.tau_m / p.r_mem;
    const double i_peak = std::max(syn.i0, 1e-18);
    const double t_charge = c_eff * (p.v_th - p.v_reset) / i_peak;
    double h = std::min(p.tau_m / 200.0, t_charge / 200.0);
    h = std::min(h, t_end / 100.0);
    if (dt_override > 0) {
        if (dt_override > p.tau_m / 200.0)
            throw behavior_error("dt exceeds tau_m/200 stability bound");
        h = dt_override;
    }

    BehavioralTrace tr;
    auto deriv = [&](double t, double v) {
        return (-(v - p.v_rest) + p.r_mem * syn_current(syn, t)) / p.tau_m;
    };
    double t = 0, v = p.v_rest;
    auto record = [&](double tt, double vv) {
        tr.time.push_back(tt);
        tr.v_m.push_back(vv);
        tr.i_leak.push_back((vv - p.v_rest) / p.r_mem);
    };
    record(t, v);
    while (t < t_end) {
        const double hs = std::min(h, t_end - t);
        const double k1 = deriv(t, v);
        const double k2 = deriv(t + 0.5 * hs, v + 0.5 * hs * k1);
        const double k3 = deriv(t + 0.5 * hs, v + 0.5 * hs * k2);
        const double k4 = deriv(t + hs, v + hs * k3);
        double vn = v + hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (vn >= p.v_th) {
            const double w = (p.v_th - v) / (vn - v);
            const double t_sp = t + w * hs;
            tr.spike_times.push_back(t_sp);
            record(t_sp, p.v_th);
            t = t_sp + p.t_ref;
            v = p.v_reset;
            if (t > t_end) t = t_end;
            record(t, v);
            continue;
        }
        t += hs;
        v = vn;
        record(t, v);
    }
    return tr;
}

namespace {

inline double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

BehavioralTrace simulate_ml(const MlParams& p, double t_end, bool burst_enabled,
                            double dt_override) {
    p.validate();
    if (!(t_end > 0)) throw behavior_error("t_end must be positive");

    const auto& g = p.gating;
    auto m_inf = [&](double v) { return 0.5 * (1.0 + std::tanh((v - g.v1) / g.v2)); };
    auto w_inf = [&](double v) { return 0.5 * (1.0 + std::tanh((v - g.v3) / g.v4)); };
    auto w_rate = [&](double v) { return g.phi * std::cosh((v - g.v3) / (2.0 * g.v4)); };

    struct S { double v, w, z; };
    auto deriv = [&](const S& s) {
        double i_ion = p.g_ca * m_inf(s.v) * (s.v - p.e_ca) +
                       p.g_k * s.w * (s.v - p.e_k) + p.g_l * (s.v - p.e_l);
        double i_burst =
            burst_enabled ? -p.burst.alpha * s.z * (s.v - p.e_k) : 0.0;
        S d;
        d.v = (p.i_ext - i_ion + i_burst) / p.c;
        d.w = w_rate(s.v) * (w_inf(s.v) - s.w);
        d.z = burst_enabled
                  ? p.burst.epsilon *
                        (logistic((s.v - p.burst.z_half) / p.burst.z_slope) - s.z)
                  : 0.0;
        return d;
    };

    // fastest local rate: membrane g/C or gating phi*cosh at the rails
    const double rate_v = (p.g_ca + p.g_k + p.g_l) / p.c;
    const double rate_w = w_rate(p.e_ca);
    double h = 0.2 / std::max(rate_v, rate_w);
    h = std::min(h, t_end / 1000.0);
    if (dt_override > 0) h = dt_override;

    BehavioralTrace tr;
    S s{p.e_l, w_inf(p.e_l), 0.0};
    double t = 0;
    auto record = [&]() {
        tr.time.push_back(t);
        tr.v_m.push_back(s.v);
        tr.w.push_back(s.w);
        if (burst_enabled) tr.z.push_back(s.z);
    };
    record();
    // spike = rising 0 V crossing after dipping below -20 mV
    bool armed = s.v < -20e-3;
    while (t < t_end) {
        const double hs = std::min(h, t_end - t);
        auto step = [&](const S& y, const S& d, double f) {
            return S{y.v + f * d.v, y.w + f * d.w, y.z + f * d.z};
        };
        const S k1 = deriv(s);
        const S k2 = deriv(step(s, k1, 0.5 * hs));
        const S k3 = deriv(step(s, k2, 0.5 * hs));
        const S k4 = deriv(step(s, k3, hs));
        S sn{s.v + hs / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
             s.w + hs / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w),
             s.z + hs / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
        if (sn.v < -20e-3) armed = true;
        if (armed && s.v < 0.0 && sn.v >= 0.0) {
            const double w = (0.0 - s.v) / (sn.v - s.v);
            tr.spike_times.push_back(t + w * hs);
            armed = false;
        }
        s = sn;
        t += hs;
        record();
    }
    return tr;
}

BehavioralTrace simulate_ah(const AhParams& p, const SynParams& syn,
                            double t_end, double dt_override) {
    p.validate();
    syn.validate();
    if (!(t_end > 0)) throw behavior_error("t_end must be positive");

    const double i_peak = std::max(syn.i0, p.g_l * (p.v_th - p.v_rest));
    const double t_charge = p.c * (p.v_th - p.v_floor) / std::max(i_peak, 1e-18);
    double h = std::min(t_charge / 200.0, t_end / 100.0);
    if (dt_override > 0) h = dt_override;

    BehavioralTrace tr;
    double t = 0, v = p.v_rest;
    auto record = [&](double tt, double vv) {
        tr.time.push_back(tt);
        tr.v_m.push_back(vv);
    };
    auto deriv = [&](double tt, double vv) {
        return (syn_current(syn, tt) - p.g_l * (vv - p.v_rest)) / p.c;
    };
    record(t, v);
    while (t < t_end) {
        const double hs = std::min(h, t_end - t);
        const double k1 = deriv(t, v);
        const double k2 = deriv(t + 0.5 * hs, v + 0.5 * hs * k1);
        const double k3 = deriv(t + 0.5 * hs, v + 0.5 * hs * k2);
        const double k4 = deriv(t + hs, v + hs * k3);
        double vn = v + hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (vn >= p.v_th) {
            const double w = (p.v_th - v) / (vn - v);
            const double t_sp = t + w * hs;
            tr.spike_times.push_back(t_sp);
            record(t_sp, p.v_th);
            // constant-current discharge: exact linear ramp down
            const double t_dis = p.c * (p.v_th - p.v_floor) / p.i_reset;
            t = std::min(t_sp + t_dis, t_end);
            v = t_sp + t_dis <= t_end
                    ? p.v_floor
                    : p.v_th - p.i_reset * (t_end - t_sp) / p.c;
            record(t, v);
            continue;
        }
        t += hs;
        v = vn;
        record(t, v);
    }
    return tr;
}

} // namespace spikeforge
