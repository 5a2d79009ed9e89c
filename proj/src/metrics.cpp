#include "spikeforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spikeforge {

std::string to_string(FiringPattern p) {
    switch (p) {
        case FiringPattern::silent: return "silent";
        case FiringPattern::periodic: return "periodic";
        case FiringPattern::bursting: return "bursting";
        case FiringPattern::irregular: return "irregular";
    }
    return "?";
}

std::vector<double> SpikeTrain::isis() const {
    std::vector<double> out;
    for (size_t k = 1; k < spike_times.size(); ++k)
        out.push_back(spike_times[k] - spike_times[k - 1]);
    return out;
}

namespace {

IsiStats isi_stats(const std::vector<double>& isis) {
    IsiStats s;
    if (isis.empty()) return s;
    s.min = *std::min_element(isis.begin(), isis.end());
    s.max = *std::max_element(isis.begin(), isis.end());
    s.mean = std::accumulate(isis.begin(), isis.end(), 0.0) /
             static_cast<double>(isis.size());
    double var = 0;
    for (double x : isis) var += (x - s.mean) * (x - s.mean);
    var /= static_cast<double>(isis.size());
    s.cv = s.mean > 0 ? std::sqrt(var) / s.mean : 0.0;
    return s;
}

} // namespace

SpikeTrain detect_spikes(const std::vector<double>& time,
                         const std::vector<double>& v, double v_supp,
                         const MetricsOptions& mopt) {
    if (time.size() < 2) throw metrics_error("detection window shorter than 2 samples");
    if (time.size() != v.size()) throw metrics_error("time/voltage length mismatch");
    const double v_hi = mopt.v_hi_frac * v_supp;
    const double v_lo = mopt.v_lo_frac * v_supp;
    SpikeTrain train;
    if (v_supp <= 0) return train;
    bool armed = v[0] < v_lo;
    for (size_t k = 1; k < v.size(); ++k) {
        if (v[k] < v_lo) armed = true;
        if (armed && v[k - 1] < v_hi && v[k] >= v_hi) {
            const double w = (v_hi - v[k - 1]) / (v[k] - v[k - 1]);
            train.spike_times.push_back(time[k - 1] + w * (time[k] - time[k - 1]));
            armed = false;
        }
    }
    train.isi = isi_stats(train.isis());
    train.pattern = classify_pattern(train);
    return train;
}

SpikeTrain detect_spikes(const Trace& uniform, const std::string& spike_node,
                         double v_supp, const MetricsOptions& mopt) {
    return detect_spikes(uniform.time, uniform.voltage(spike_node), v_supp, mopt);
}

double spike_frequency(const SpikeTrain& train, int discard_first) {
    const size_t need = static_cast<size_t>(discard_first) + 2;
    if (train.spike_times.size() < need) return 0.0;
    const auto& t = train.spike_times;
    const size_t first = static_cast<size_t>(discard_first);
    const double span = t.back() - t[first];
    const double n_isi = static_cast<double>(t.size() - 1 - first);
    return n_isi / span; // 1 / mean(ISI) over the kept spikes
}

FiringPattern classify_pattern(const SpikeTrain& train) {
    if (train.spike_times.size() < 4) return FiringPattern::silent;
    const auto isis = train.isis();
    const auto s = isi_stats(isis);
    if (s.min > 0 && s.max / s.min > 5.0) {
        // short/long split at the geometric mean of the extremes;
        // bursting = at least two runs of >= 2 short ISIs separated by
        // a long one
        const double split = std::sqrt(s.min * s.max);
        int runs_ge2 = 0, run = 0;
        bool saw_long_between = false, separated = false;
        for (double x : isis) {
            if (x < split) {
                ++run;
                if (run == 2) {
                    if (runs_ge2 >= 1 && saw_long_between) separated = true;
                    ++runs_ge2;
                }
            } else {
                if (runs_ge2 >= 1) saw_long_between = true;
                run = 0;
            }
        }
        if (runs_ge2 >= 2 && separated) return FiringPattern::bursting;
    }
    if (s.cv < 0.1) return FiringPattern::periodic;
    return FiringPattern::irregular;
}

namespace {

// trapezoid integral of series y over [t0, t1] with fractional end
// cells (uniform grid assumed)
double integrate_window(const std::vector<double>& t, const std::vector<double>& y,
                        double t0, double t1) {
    double acc = 0;
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        const double a = t[k], b = t[k + 1];
        if (b <= t0 || a >= t1) continue;
        const double lo = std::max(a, t0), hi = std::min(b, t1);
        auto at = [&](double tt) {
            const double w = (tt - a) / (b - a);
            return y[k] + w * (y[k + 1] - y[k]);
        };
        acc += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    return acc;
}

} // namespace

std::optional<EnergyResult> energy_per_spike(const Trace& uniform,
                                             const SpikeTrain& train) {
    const auto& t = train.spike_times;
    if (t.size() < 2) return std::nullopt;
    const size_t nwin = std::min<size_t>(3, t.size() - 1);
    double e_tot = 0, e_sup = 0;
    for (size_t k = t.size() - nwin; k < t.size(); ++k) {
        e_tot += integrate_window(uniform.time, uniform.p_total, t[k - 1], t[k]);
        e_sup += integrate_window(uniform.time, uniform.p_supply, t[k - 1], t[k]);
    }
    EnergyResult r;
    r.e_spike = e_tot / static_cast<double>(nwin);
    r.supply_ratio = e_sup != 0 ? std::abs(e_sup - e_tot) / std::abs(e_sup) : 1.0;
    r.settled = r.supply_ratio <= 0.02;
    return r;
}

double static_power(const NeuronConfig& cfg, const SolverOptions& sopt,
                    const MetricsOptions& mopt) {
    if (cfg.v_supp <= 0) return 0.0;
    NeuronConfig idle = cfg;
    idle.i_syn = 0.0;
    Circuit ckt = build_neuron(idle);
    SolverOptions opt = sopt;
    opt.t_end = 50e-9;
    Trace tr = transient(ckt, opt);
    Trace uni = tr.resampled(
        std::max(mopt.grid_dt, opt.t_end / static_cast<double>(mopt.max_grid_samples)),
        mopt.max_grid_samples);
    const auto train = detect_spikes(uni, "n_spike", idle.v_supp, mopt);
    const double t1 = uni.time.back();
    const double t0 = t1 - 0.2 * (t1 - uni.time.front());
    for (double ts : train.spike_times)
        if (ts >= t0)
            throw metrics_error("circuit self-oscillates at zero input (" +
                                to_string(idle.kind) + ", v_supp=" +
                                std::to_string(idle.v_supp) + ")");
    return integrate_window(uni.time, uni.p_supply, t0, t1) / (t1 - t0);
}

MetricsRecord measure_circuit(const NeuronConfig& cfg, SolverOptions sopt,
                              const MetricsOptions& mopt, double t_end) {
    MetricsRecord rec;
    rec.kind = cfg.kind;
    rec.level = "circuit";
    rec.v_supp = cfg.v_supp;
    rec.c_mem = cfg.kind == NeuronKind::AH ? std::nullopt : cfg.c_mem;
    rec.c_res = cfg.c_res;
    rec.i_syn = cfg.i_syn;
    if (t_end <= 0) {
        // window sized from the charge-to-threshold estimate so slow
        // configurations still collect a settled train
        const double c_sum = (rec.c_mem ? *rec.c_mem : 0.0) + cfg.c_res;
        const double drive = std::max(cfg.i_syn, 1e-9);
        const double period_est = 2.5 * c_sum * (0.6 * cfg.v_supp) / drive;
        t_end = std::clamp(12.0 * period_est, 50e-9, 2000e-9);
    }
    sopt.t_end = t_end;
    try {
        Circuit ckt = build_neuron(cfg);
        Trace tr = transient(ckt, sopt);
        Trace uni = tr.resampled(
            std::max(mopt.grid_dt, t_end / static_cast<double>(mopt.max_grid_samples)),
            mopt.max_grid_samples);
        SpikeTrain train = detect_spikes(uni, "n_spike", cfg.v_supp, mopt);
        rec.pattern = train.pattern;
        rec.f_spike = spike_frequency(train, mopt.discard_first);
        if (auto e = energy_per_spike(uni, train); e && rec.f_spike > 0) {
            rec.e_spike = e->e_spike;
            rec.settled = e->settled;
        } else {
            rec.settled = train.spike_times.empty() || rec.f_spike > 0;
        }
    } catch (const std::exception& ex) {
        rec.converged = false;
        rec.settled = false;
        rec.note = ex.what();
    }
    return rec;
}

} // namespace spikeforge
