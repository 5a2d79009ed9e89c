#include "spikeforge/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikeforge/units.hpp"

namespace spikeforge {

void SolverOptions::validate() const {
    if (!(reltol > 0 && abstol_i > 0 && abstol_v > 0 && gmin > 0 && lte_tol > 0))
        throw solver_error("tolerances must be positive");
    if (!(dt_min > 0 && dt_min <= dt_init && dt_init <= dt_max))
        throw solver_error("need dt_min <= dt_init <= dt_max, all positive");
    if (!(t_end > 0)) throw solver_error("t_end must be positive");
    if (max_newton_iters < 1) throw solver_error("max_newton_iters must be >= 1");
}

int Trace::node_index(const std::string& name) const {
    for (size_t k = 0; k < node_names.size(); ++k)
        if (node_names[k] == name) return static_cast<int>(k);
    throw solver_error("trace has no node " + name);
}

const std::vector<double>& Trace::voltage(const std::string& name) const {
    return v[static_cast<size_t>(node_index(name))];
}

Trace Trace::resampled(double dt, size_t max_samples) const {
    if (samples() < 2) throw solver_error("cannot resample a trace with < 2 samples");
    const double t0 = time.front(), t1 = time.back();
    size_t n = static_cast<size_t>(std::floor((t1 - t0) / dt)) + 1;
    if (n > max_samples) {
        n = max_samples;
        dt = (t1 - t0) / static_cast<double>(n - 1);
    }
    Trace out;
    out.node_names = node_names;
    out.element_names = element_names;
    out.dc_converged = dc_converged;
    out.time.resize(n);
    out.v.assign(node_names.size(), std::vector<double>(n));
    out.i.assign(element_names.size(), std::vector<double>(n));
    out.p_total.resize(n);
    out.p_supply.resize(n);

    size_t seg = 0;
    for (size_t k = 0; k < n; ++k) {
        double t = t0 + static_cast<double>(k) * dt;
        if (t > t1) t = t1;
        while (seg + 2 < time.size() && time[seg + 1] < t) ++seg;
        const double ta = time[seg], tb = time[seg + 1];
        const double w = (tb > ta) ? (t - ta) / (tb - ta) : 0.0;
        auto lerp = [&](const std::vector<double>& s) {
            return s[seg] + w * (s[seg + 1] - s[seg]);
        };
        out.time[k] = t;
        for (size_t c = 0; c < v.size(); ++c) out.v[c][k] = lerp(v[c]);
        for (size_t c = 0; c < i.size(); ++c) out.i[c][k] = lerp(i[c]);
        out.p_total[k] = lerp(p_total);
        out.p_supply[k] = lerp(p_supply);
    }
    return out;
}

std::string Trace::to_csv() const {
    std::ostringstream os;
    os << "time_s";
    for (const auto& n : node_names) os << ",v_" << n;
    os << ",p_total_w,p_supply_w\n";
    for (size_t k = 0; k < samples(); ++k) {
        os << format_double(time[k]);
        for (const auto& col : v) os << "," << format_double(col[k]);
        os << "," << format_double(p_total[k]) << "," << format_double(p_supply[k])
           << "\n";
    }
    return os.str();
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Companion state per capacitor at the last accepted time point.
struct CapState {
    double v = 0; // v(np) - v(nn)
    double i = 0; // element current np -> nn
};

struct Engine {
    const Circuit& ckt;
    const SolverOptions& opt;
    int nn;  // non-ground node count
    int nv;  // voltage-source branch count
    int dim;

    Engine(const Circuit& c, const SolverOptions& o)
        : ckt(c), opt(o), nn(c.num_nodes() - 1),
          nv(static_cast<int>(c.vsources.size())), dim(nn + nv) {}

    static double vat(const VectorXd& x, NodeId n) { return n == 0 ? 0.0 : x[n - 1]; }

    // Stamps residual f, Jacobian J and the per-node current scale used
    // by the convergence test. h <= 0 means DC (capacitors open);
    // otherwise the capacitor companion model for the given step is
    // used (trapezoidal, or backward Euler when be_step is set).
    void eval(const VectorXd& x, VectorXd& f, MatrixXd* J, VectorXd* iscale,
              double gmin_eff, double h, bool be_step,
              const std::vector<CapState>* caps) const {
        f.setZero(dim);
        if (J) J->setZero(dim, dim);
        if (iscale) iscale->setZero(dim);
        auto addf = [&](NodeId n, double val) { if (n > 0) f[n - 1] += val; };
        auto addj = [&](NodeId r, int col, double val) {
            if (J && r > 0) (*J)(r - 1, col) += val;
        };
        auto scale = [&](NodeId n, double cur) {
            if (iscale && n > 0) (*iscale)[n - 1] = std::max((*iscale)[n - 1], std::abs(cur));
        };

        for (const auto& m : ckt.mosfets) {
            const double vg = vat(x, m.g), vs = vat(x, m.s), vd = vat(x, m.d),
                         vb = vat(x, m.b);
            const double id = drain_current(m.params, vg, vs, vd, vb);
            const DeviceDerivs dg = drain_current_derivs(m.params, vg, vs, vd, vb);
            addf(m.d, id);
            addf(m.s, -id);
            if (m.g > 0) { addj(m.d, m.g - 1, dg.gm); addj(m.s, m.g - 1, -dg.gm); }
            if (m.d > 0) { addj(m.d, m.d - 1, dg.gds); addj(m.s, m.d - 1, -dg.gds); }
            if (m.s > 0) { addj(m.d, m.s - 1, dg.gms); addj(m.s, m.s - 1, -dg.gms); }
            scale(m.d, id); scale(m.s, id);
        }
        for (size_t k = 0; k < ckt.capacitors.size(); ++k) {
            if (h <= 0) continue;
            const auto& c = ckt.capacitors[k];
            const CapState& st = (*caps)[k];
            const double geq = (be_step ? 1.0 : 2.0) * c.farads / h;
            const double hist = be_step ? geq * st.v : geq * st.v + st.i;
            const double vc = vat(x, c.np) - vat(x, c.nn);
            const double ic = geq * vc - hist;
            addf(c.np, ic); addf(c.nn, -ic);
            if (c.np > 0) { addj(c.np, c.np - 1, geq); addj(c.nn, c.np - 1, -geq); }
            if (c.nn > 0) { addj(c.np, c.nn - 1, -geq); addj(c.nn, c.nn - 1, geq); }
            scale(c.np, ic); scale(c.nn, ic);
        }
        for (const auto& r : ckt.resistors) {
            const double g = 1.0 / r.ohms;
            const double ir = g * (vat(x, r.np) - vat(x, r.nn));
            addf(r.np, ir); addf(r.nn, -ir);
            if (r.np > 0) { addj(r.np, r.np - 1, g); addj(r.nn, r.np - 1, -g); }
            if (r.nn > 0) { addj(r.np, r.nn - 1, -g); addj(r.nn, r.nn - 1, g); }
            scale(r.np, ir); scale(r.nn, ir);
        }
        for (const auto& s : ckt.isources) {
            addf(s.np, s.amps); addf(s.nn, -s.amps);
            scale(s.np, s.amps); scale(s.nn, s.amps);
        }
        for (int j = 0; j < nv; ++j) {
            const auto& s = ckt.vsources[j];
            const double ibr = x[nn + j];
            addf(s.np, ibr); addf(s.nn, -ibr);
            addj(s.np, nn + j, 1.0); addj(s.nn, nn + j, -1.0);
            f[nn + j] = vat(x, s.np) - vat(x, s.nn) - s.volts;
            if (J) {
                if (s.np > 0) (*J)(nn + j, s.np - 1) += 1.0;
                if (s.nn > 0) (*J)(nn + j, s.nn - 1) -= 1.0;
            }
            scale(s.np, ibr); scale(s.nn, ibr);
        }
        for (int n = 1; n <= nn; ++n) {
            f[n - 1] += gmin_eff * x[n - 1];
            if (J) (*J)(n - 1, n - 1) += gmin_eff;
        }
    }

    bool converged(const VectorXd& f, const VectorXd& iscale) const {
        for (int k = 0; k < nn; ++k)
            if (std::abs(f[k]) > opt.abstol_i + opt.reltol * iscale[k]) return false;
        for (int k = nn; k < dim; ++k)
            if (std::abs(f[k]) > opt.abstol_v) return false;
        return true;
    }

    // Damped Newton; returns true on convergence, leaving the solution
    // in x. Per-iteration node updates are limited to 0.5 V.
    bool newton(VectorXd& x, double gmin_eff, double h, bool be_step,
                const std::vector<CapState>* caps, double* last_residual) const {
        VectorXd f(dim), iscale(dim);
        MatrixXd J(dim, dim);
        for (int it = 0; it < opt.max_newton_iters; ++it) {
            eval(x, f, &J, &iscale, gmin_eff, h, be_step, caps);
            if (last_residual) *last_residual = f.cwiseAbs().maxCoeff();
            if (converged(f, iscale)) return true;
            VectorXd dx = J.partialPivLu().solve(-f);
            if (!dx.allFinite()) return false;
            for (int k = 0; k < nn; ++k) dx[k] = std::clamp(dx[k], -0.5, 0.5);
            x += dx;
        }
        eval(x, f, nullptr, &iscale, gmin_eff, h, be_step, caps);
        if (last_residual) *last_residual = f.cwiseAbs().maxCoeff();
        return converged(f, iscale);
    }

    // Start vector: rails pinned to their source values (only
    // node-to-ground sources pin directly), user overrides applied.
    VectorXd start_vector() const {
        VectorXd x = VectorXd::Zero(dim);
        for (const auto& s : ckt.vsources) {
            if (s.nn == 0 && s.np > 0) x[s.np - 1] = s.volts;
            else if (s.np == 0 && s.nn > 0) x[s.nn - 1] = -s.volts;
        }
        for (const auto& [name, volts] : opt.initial_v)
            x[ckt.node(name) - 1] = volts;
        return x;
    }

    VectorXd solve_dc() const {
        VectorXd x = start_vector();
        double resid = 0;
        if (newton(x, opt.gmin, 0, false, nullptr, &resid)) return x;
        // GMIN stepping: heavy regularization first, each solution
        // seeding the next rung
        x = start_vector();
        bool ok = false;
        for (int k = 6; k >= 0; --k) {
            ok = newton(x, opt.gmin * std::pow(10.0, k), 0, false, nullptr, &resid);
        }
        if (!ok)
            throw solver_error("DC operating point did not converge (last residual " +
                               format_double(resid) + " A)");
        return x;
    }

    double power_total(const VectorXd& x) const {
        double p = 0;
        for (const auto& m : ckt.mosfets) {
            const double id = drain_current(m.params, vat(x, m.g), vat(x, m.s),
                                            vat(x, m.d), vat(x, m.b));
            p += (vat(x, m.d) - vat(x, m.s)) * id;
        }
        for (const auto& r : ckt.resistors) {
            const double dv = vat(x, r.np) - vat(x, r.nn);
            p += dv * dv / r.ohms;
        }
        for (int n = 1; n <= nn; ++n) p += opt.gmin * x[n - 1] * x[n - 1];
        return p;
    }

    double power_supply(const VectorXd& x) const {
        double p = 0;
        for (int j = 0; j < nv; ++j)
            p -= ckt.vsources[j].volts * x[nn + j];
        for (const auto& s : ckt.isources)
            p += (vat(x, s.nn) - vat(x, s.np)) * s.amps;
        return p;
    }
};

} // namespace

std::vector<double> dc_operating_point(const Circuit& ckt, const SolverOptions& opt) {
    opt.validate();
    ckt.validate();
    Engine eng(ckt, opt);
    VectorXd x = eng.solve_dc();
    std::vector<double> v(ckt.num_nodes(), 0.0);
    for (int n = 1; n < ckt.num_nodes(); ++n) v[n] = x[n - 1];
    return v;
}

Trace transient(const Circuit& ckt, const SolverOptions& opt) {
    opt.validate();
    ckt.validate();
    Engine eng(ckt, opt);

    VectorXd x;
    bool dc_ok = true;
    if (opt.start == StartMode::dc) {
        try {
            x = eng.solve_dc();
        } catch (const solver_error&) {
            x = eng.start_vector();
            dc_ok = false;
        }
    } else {
        x = eng.start_vector();
    }

    const size_t ncap = ckt.capacitors.size();
    std::vector<CapState> caps(ncap);
    for (size_t k = 0; k < ncap; ++k)
        caps[k].v = Engine::vat(x, ckt.capacitors[k].np) -
                    Engine::vat(x, ckt.capacitors[k].nn);

    Trace tr;
    tr.dc_converged = dc_ok;
    for (int n = 1; n < ckt.num_nodes(); ++n) tr.node_names.push_back(ckt.nodes[n]);
    for (const auto& m : ckt.mosfets) tr.element_names.push_back(m.name);
    for (const auto& c : ckt.capacitors) tr.element_names.push_back(c.name);
    for (const auto& r : ckt.resistors) tr.element_names.push_back(r.name);
    for (const auto& s : ckt.isources) tr.element_names.push_back(s.name);
    for (const auto& s : ckt.vsources) tr.element_names.push_back(s.name);
    tr.v.resize(tr.node_names.size());
    tr.i.resize(tr.element_names.size());

    auto record = [&](double t, const VectorXd& xs, const std::vector<CapState>& cs) {
        tr.time.push_back(t);
        for (int n = 0; n < eng.nn; ++n) tr.v[n].push_back(xs[n]);
        size_t col = 0;
        for (const auto& m : ckt.mosfets)
            tr.i[col++].push_back(drain_current(m.params, Engine::vat(xs, m.g),
                                                Engine::vat(xs, m.s),
                                                Engine::vat(xs, m.d),
                                                Engine::vat(xs, m.b)));
        for (size_t k = 0; k < ncap; ++k) tr.i[col++].push_back(cs[k].i);
        for (const auto& r : ckt.resistors)
            tr.i[col++].push_back((Engine::vat(xs, r.np) - Engine::vat(xs, r.nn)) /
                                  r.ohms);
        for (const auto& s : ckt.isources) tr.i[col++].push_back(s.amps);
        for (int j = 0; j < eng.nv; ++j) tr.i[col++].push_back(xs[eng.nn + j]);
        tr.p_total.push_back(eng.power_total(xs));
        tr.p_supply.push_back(eng.power_supply(xs));
    };
    record(0.0, x, caps);

    // quadratic-extrapolation history for the LTE estimate
    std::vector<double> ht;           // last accepted times (up to 3)
    std::vector<VectorXd> hv;         // matching solutions
    auto push_hist = [&](double t, const VectorXd& xs) {
        ht.push_back(t); hv.push_back(xs);
        if (ht.size() > 3) { ht.erase(ht.begin()); hv.erase(hv.begin()); }
    };
    push_hist(0.0, x);

    double t = 0.0;
    double h = std::min(opt.dt_init, opt.t_end);
    bool first_step = true; // backward Euler to damp the start-up
    const double tstop = opt.t_end;

    while (t < tstop * (1.0 - 1e-15)) {
        const double h_taken = std::min(h, tstop - t);
        VectorXd xn = x;
        bool ok = eng.newton(xn, opt.gmin, h_taken, first_step, &caps, nullptr) &&
                  xn.allFinite();
        if (!ok) {
            if (h_taken <= opt.dt_min * 1.0000001)
                throw solver_error("transient Newton divergence at t=" +
                                   format_double(t) + " s with dt=dt_min");
            h = std::max(h_taken * 0.5, opt.dt_min);
            continue;
        }

        h = h_taken;
        if (ht.size() == 3) {
            // LTE estimate: distance from the quadratic predictor
            const double t0 = ht[0], t1 = ht[1], t2 = ht[2], tn = t + h_taken;
            const double l0 = (tn - t1) * (tn - t2) / ((t0 - t1) * (t0 - t2));
            const double l1 = (tn - t0) * (tn - t2) / ((t1 - t0) * (t1 - t2));
            const double l2 = (tn - t0) * (tn - t1) / ((t2 - t0) * (t2 - t1));
            double worst = 0;
            for (int n = 0; n < eng.nn; ++n) {
                const double pred = l0 * hv[0][n] + l1 * hv[1][n] + l2 * hv[2][n];
                const double tol =
                    opt.lte_tol * (opt.abstol_v + opt.reltol * std::abs(xn[n]));
                worst = std::max(worst, std::abs(xn[n] - pred) / tol);
            }
            if (worst > 1.0 && h_taken > opt.dt_min * 1.0000001) {
                h = std::max(h_taken * 0.5, opt.dt_min);
                continue;
            }
            if (worst < 0.25) h = std::min(h_taken * 1.5, opt.dt_max);
        }

        // accept: refresh capacitor companion state
        for (size_t k = 0; k < ncap; ++k) {
            const auto& c = ckt.capacitors[k];
            const double geq = (first_step ? 1.0 : 2.0) * c.farads / h_taken;
            const double hist =
                first_step ? geq * caps[k].v : geq * caps[k].v + caps[k].i;
            const double vc = Engine::vat(xn, c.np) - Engine::vat(xn, c.nn);
            caps[k].i = geq * vc - hist;
            caps[k].v = vc;
        }
        t += h_taken;
        x = xn;
        first_step = false;
        record(t, x, caps);
        push_hist(t, x);
    }
    return tr;
}

} // namespace spikeforge
