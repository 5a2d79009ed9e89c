#include "spikeforge/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikeforge/units.hpp"

namespace spikeforge {

std::string to_string(NeuronKind k) {
    switch (k) {
        case NeuronKind::LIF: return "lif";
        case NeuronKind::ML: return "ml";
        case NeuronKind::AH: return "ah";
    }
    return "?";
}

NeuronKind neuron_kind_from_string(const std::string& s) {
    if (s == "lif" || s == "LIF") return NeuronKind::LIF;
    if (s == "ml" || s == "ML") return NeuronKind::ML;
    if (s == "ah" || s == "AH") return NeuronKind::AH;
    throw construction_error("unknown neuron kind: '" + s + "'");
}

NodeId Circuit::add_node(const std::string& name) {
    for (int i = 0; i < num_nodes(); ++i)
        if (nodes[i] == name) throw construction_error("duplicate node " + name);
    nodes.push_back(name);
    return num_nodes() - 1;
}

NodeId Circuit::node(const std::string& name) const {
    for (int i = 0; i < num_nodes(); ++i)
        if (nodes[i] == name) return i;
    throw construction_error("no such node: " + name);
}

void Circuit::validate() const {
    auto check = [&](NodeId n, const std::string& owner) {
        if (n < 0 || n >= num_nodes())
            throw construction_error(owner + " references missing node");
    };
    for (const auto& m : mosfets) {
        check(m.d, m.name); check(m.g, m.name);
        check(m.s, m.name); check(m.b, m.name);
        m.params.validate();
    }
    for (const auto& c : capacitors) {
        check(c.np, c.name); check(c.nn, c.name);
        if (!(c.farads > 0.0))
            throw construction_error(c.name + ": capacitance must be positive");
    }
    for (const auto& r : resistors) {
        check(r.np, r.name); check(r.nn, r.name);
        if (!(r.ohms > 0.0))
            throw construction_error(r.name + ": resistance must be positive");
    }
    for (const auto& s : isources) { check(s.np, s.name); check(s.nn, s.name); }
    for (const auto& s : vsources) { check(s.np, s.name); check(s.nn, s.name); }

    int supplies = 0;
    for (const auto& s : vsources) supplies += s.supply ? 1 : 0;
    bool neuronish = !labels.empty();
    if (neuronish) {
        if (supplies != 1)
            throw construction_error("neuron circuit needs exactly one supply rail");
        if (isources.size() != 1)
            throw construction_error("neuron circuit needs exactly one synapse source");
    }

    // connectivity to ground through conducting/defining element edges
    std::vector<char> seen(nodes.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    auto edge = [&](NodeId a, NodeId b) {
        if (seen[a] && !seen[b]) { seen[b] = 1; stack.push_back(b); }
        if (seen[b] && !seen[a]) { seen[a] = 1; stack.push_back(a); }
    };
    while (!stack.empty()) {
        stack.pop_back();
        for (const auto& m : mosfets) { edge(m.d, m.s); edge(m.g, m.d); edge(m.b, m.s); }
        for (const auto& c : capacitors) edge(c.np, c.nn);
        for (const auto& r : resistors) edge(r.np, r.nn);
        for (const auto& s : isources) edge(s.np, s.nn);
        for (const auto& s : vsources) edge(s.np, s.nn);
        if (std::all_of(seen.begin(), seen.end(), [](char c) { return c; })) break;
    }
    for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw construction_error("node " + nodes[i] + " not connected to ground");
}

std::string Circuit::dump() const {
    std::ostringstream os;
    for (int i = 0; i < num_nodes(); ++i) os << "node " << i << " " << nodes[i] << "\n";
    for (const auto& m : mosfets)
        os << m.name << " " << (m.params.polarity == Polarity::N ? "nmos" : "pmos")
           << " d=" << nodes[m.d] << " g=" << nodes[m.g] << " s=" << nodes[m.s]
           << " b=" << nodes[m.b] << "\n";
    for (const auto& c : capacitors)
        os << c.name << " cap " << nodes[c.np] << " " << nodes[c.nn] << " "
           << format_double(c.farads) << "\n";
    for (const auto& r : resistors)
        os << r.name << " res " << nodes[r.np] << " " << nodes[r.nn] << " "
           << format_double(r.ohms) << "\n";
    for (const auto& s : isources)
        os << s.name << " isrc " << nodes[s.np] << " " << nodes[s.nn] << " "
           << format_double(s.amps) << "\n";
    for (const auto& s : vsources)
        os << s.name << " vsrc " << nodes[s.np] << " " << nodes[s.nn] << " "
           << format_double(s.volts) << (s.supply ? " supply" : "") << "\n";
    for (const auto& [role, n] : labels) os << "label " << role << " " << nodes[n] << "\n";
    return os.str();
}

void NeuronConfig::validate() const {
    if (!(v_supp >= 0.05 && v_supp <= 1.0))
        throw construction_error("v_supp out of [0.05, 1.0] V");
    auto check_cap = [](double c, const char* name) {
        if (!(c >= 0.01e-15 && c <= 100e-15))
            throw construction_error(std::string(name) + " out of [0.01 fF, 100 fF]");
    };
    if (kind != NeuronKind::AH) {
        if (!c_mem) throw construction_error("c_mem required for this neuron kind");
        check_cap(*c_mem, "c_mem");
    }
    check_cap(c_res, "c_res");
    if (!(i_syn >= 0.0)) throw construction_error("i_syn must be nonnegative");
}

namespace {

double bias_or(const NeuronConfig& cfg, const std::string& name, double dflt) {
    auto it = cfg.biases.find(name);
    return it == cfg.biases.end() ? dflt : it->second;
}

// Every non-ground node gets the preset parasitic to ground; this both
// regularizes the dynamics and gives spikes a realistic nonzero width.
void attach_parasitics(Circuit& ckt, double c_par) {
    int n = ckt.num_nodes();
    for (int i = 1; i < n; ++i)
        ckt.capacitors.push_back({"Cp_" + ckt.nodes[i], c_par, i, 0});
}

struct InverterNodes { NodeId in, out; };

void add_inverter(Circuit& ckt, const NeuronConfig& cfg, const std::string& pn,
                  const std::string& nn, NodeId vdd, InverterNodes io) {
    ckt.mosfets.push_back({pn, cfg.devices.pmos, io.out, io.in, vdd, vdd});
    ckt.mosfets.push_back({nn, cfg.devices.nmos, io.out, io.in, 0, 0});
}

} // namespace

// LIF, Fig 1(e) reconstruction. Node table:
//   n_in    mirror reference; the synapse source sinks I_syn from it
//   n_mem   membrane, holds C_mem
//   n_a     first inverter output
//   n_spike second inverter output
// M1/M2 PMOS mirror copies the synapse current onto the membrane, M8 is
// the bias-controlled leak, M3-M6 the two sensing inverters, M7 the
// spike-gated reset. C_res spans spike_out -> membrane: the coupling
// latches the inverter pair rail-to-rail once the membrane trips, so
// the spike completes before the reset pulls the membrane back down
// (output-loaded C_res leaves a stable mid-rail servo instead of a
// relaxation cycle once the supply clears ~0.4 V).
Circuit build_lif(const NeuronConfig& cfg) {
    if (cfg.kind != NeuronKind::LIF) throw construction_error("config kind is not lif");
    cfg.validate();
    Circuit ckt;
    NodeId vdd = ckt.add_node("vdd");
    NodeId n_in = ckt.add_node("n_in");
    NodeId n_mem = ckt.add_node("n_mem");
    NodeId n_a = ckt.add_node("n_a");
    NodeId n_spike = ckt.add_node("n_spike");
    NodeId n_leak = ckt.add_node("n_vleak");

    ckt.mosfets.push_back({"M1", cfg.devices.pmos, n_in, n_in, vdd, vdd});
    ckt.mosfets.push_back({"M2", cfg.devices.pmos, n_mem, n_in, vdd, vdd});
    add_inverter(ckt, cfg, "M3", "M4", vdd, {n_mem, n_a});
    add_inverter(ckt, cfg, "M5", "M6", vdd, {n_a, n_spike});
    ckt.mosfets.push_back({"M7", cfg.devices.nmos, n_mem, n_spike, 0, 0});
    ckt.mosfets.push_back({"M8", cfg.devices.nmos, n_mem, n_leak, 0, 0});

    ckt.capacitors.push_back({"C_mem", *cfg.c_mem, n_mem, 0});
    ckt.capacitors.push_back({"C_res", cfg.c_res, n_spike, n_mem});
    ckt.isources.push_back({"Isyn", cfg.i_syn, n_in, 0});
    ckt.vsources.push_back({"Vdd", cfg.v_supp, vdd, 0, true});
    ckt.vsources.push_back(
        {"Vleak", bias_or(cfg, "v_leak", 0.15 * cfg.v_supp), n_leak, 0, false});

    ckt.labels = {{"membrane", n_mem}, {"spike_out", n_spike}, {"synapse_in", n_in}};
    attach_parasitics(ckt, cfg.devices.c_par);
    ckt.validate();
    return ckt;
}

// ML, Fig 1(f) reconstruction: the synapse drives the membrane directly
// (no decoupling mirror). M1-M4 are the sensing inverters; M5 gated by
// the spike node in series with M6 gated by V_kslow forms the
// adjustable potassium-like repolarization path. M6 caps the discharge
// to a few multiples of I_syn, so repolarization stays slow at every
// supply; C_res spans spike_out -> membrane (same latching role as in
// the LIF). The default V_kslow is an absolute bias sized for
// 6 x I_syn saturation through M6 rather than a supply fraction, which
// keeps the stack above I_syn at 0.2 V and below runaway at 0.9 V.
Circuit build_ml(const NeuronConfig& cfg) {
    if (cfg.kind != NeuronKind::ML) throw construction_error("config kind is not ml");
    cfg.validate();
    Circuit ckt;
    NodeId vdd = ckt.add_node("vdd");
    NodeId n_mem = ckt.add_node("n_mem");
    NodeId n_a = ckt.add_node("n_a");
    NodeId n_spike = ckt.add_node("n_spike");
    NodeId n_k = ckt.add_node("n_k");
    NodeId n_ks = ckt.add_node("n_vkslow");

    add_inverter(ckt, cfg, "M1", "M2", vdd, {n_mem, n_a});
    add_inverter(ckt, cfg, "M3", "M4", vdd, {n_a, n_spike});
    ckt.mosfets.push_back({"M5", cfg.devices.nmos, n_mem, n_spike, n_k, 0});
    ckt.mosfets.push_back({"M6", cfg.devices.nmos, n_k, n_ks, 0, 0});

    ckt.capacitors.push_back({"C_mem", *cfg.c_mem, n_mem, 0});
    ckt.capacitors.push_back({"C_res", cfg.c_res, n_spike, n_mem});
    ckt.isources.push_back({"Isyn", cfg.i_syn, 0, n_mem});
    ckt.vsources.push_back({"Vdd", cfg.v_supp, vdd, 0, true});
    const double kslow_target = std::max(6.0 * cfg.i_syn, 1e-9);
    ckt.vsources.push_back(
        {"Vkslow",
         bias_or(cfg, "v_kslow", gate_bias_for_current(cfg.devices.nmos, kslow_target)),
         n_ks, 0, false});

    ckt.labels = {{"membrane", n_mem}, {"spike_out", n_spike}, {"synapse_in", n_mem}};
    attach_parasitics(ckt, cfg.devices.c_par);
    ckt.validate();
    return ckt;
}

// AH, Fig 1(g) reconstruction. The single capacitor C_res spans
// spike_out -> membrane: it integrates the synapse current while the
// output is low and snaps the membrane up regeneratively when the
// output fires, so it is membrane and reset element at once. M5 holds
// the integrated charge while the output is low and discharges the
// membrane once the spike threshold trips.
Circuit build_ah(const NeuronConfig& cfg) {
    if (cfg.kind != NeuronKind::AH) throw construction_error("config kind is not ah");
    cfg.validate();
    Circuit ckt;
    NodeId vdd = ckt.add_node("vdd");
    NodeId n_mem = ckt.add_node("n_mem");
    NodeId n_a = ckt.add_node("n_a");
    NodeId n_spike = ckt.add_node("n_spike");

    add_inverter(ckt, cfg, "M1", "M2", vdd, {n_mem, n_a});
    add_inverter(ckt, cfg, "M3", "M4", vdd, {n_a, n_spike});
    ckt.mosfets.push_back({"M5", cfg.devices.nmos, n_mem, n_spike, 0, 0});

    ckt.capacitors.push_back({"C_res", cfg.c_res, n_spike, n_mem});
    ckt.isources.push_back({"Isyn", cfg.i_syn, 0, n_mem});
    ckt.vsources.push_back({"Vdd", cfg.v_supp, vdd, 0, true});

    ckt.labels = {{"membrane", n_mem}, {"spike_out", n_spike}, {"synapse_in", n_mem}};
    attach_parasitics(ckt, cfg.devices.c_par);
    ckt.validate();
    return ckt;
}

Circuit build_neuron(const NeuronConfig& cfg) {
    switch (cfg.kind) {
        case NeuronKind::LIF: return build_lif(cfg);
        case NeuronKind::ML: return build_ml(cfg);
        case NeuronKind::AH: return build_ah(cfg);
    }
    throw construction_error("bad neuron kind");
}

} // namespace spikeforge
