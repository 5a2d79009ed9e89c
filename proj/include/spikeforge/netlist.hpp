#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeforge/devmodel.hpp"

namespace spikeforge {

enum class NeuronKind { LIF, ML, AH };

std::string to_string(NeuronKind k);
NeuronKind neuron_kind_from_string(const std::string& s);

struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using NodeId = int; // index into Circuit::nodes; 0 is ground

struct Mosfet {
    std::string name;
    DeviceParams params;
    NodeId d, g, s, b;
};

struct Capacitor {
    std::string name;
    double farads;
    NodeId np, nn;
};

// Test element; the neuron constructors never emit one.
struct Resistor {
    std::string name;
    double ohms;
    NodeId np, nn;
};

// DC current `amps` is taken out of node `np` and pushed into `nn`.
struct CurrentSource {
    std::string name;
    double amps;
    NodeId np, nn;
};

// Ideal source pinning v(np) - v(nn) = volts. `supply` marks the one
// V_supp rail; bias rails leave it false.
struct VoltageSource {
    std::string name;
    double volts;
    NodeId np, nn;
    bool supply = false;
};

struct Circuit {
    std::vector<std::string> nodes; // nodes[0] == "gnd"
    std::vector<Mosfet> mosfets;
    std::vector<Capacitor> capacitors;
    std::vector<Resistor> resistors;
    std::vector<CurrentSource> isources;
    std::vector<VoltageSource> vsources;
    std::map<std::string, NodeId> labels; // membrane / spike_out / synapse_in

    Circuit() { nodes.push_back("gnd"); }

    NodeId add_node(const std::string& name);
    NodeId node(const std::string& name) const; // throws if absent
    int num_nodes() const { return static_cast<int>(nodes.size()); }

    // Checks terminal references, ground connectivity, positive
    // capacitances and the one-supply / one-synapse rule.
    void validate() const;

    // Human-readable netlist dump, one element per line.
    std::string dump() const;
};

struct NeuronConfig {
    NeuronKind kind = NeuronKind::LIF;
    double v_supp = 0.2;                  // [V], in [0.05, 1.0]
    std::optional<double> c_mem = 1e-15;  // [F]; ignored (absent) for AH
    double c_res = 1e-15;                 // [F]
    double i_syn = 100e-9;                // [A], constant synapse current
    std::map<std::string, double> biases; // overrides: v_leak, v_kslow
    DeviceDefaults devices = DeviceDefaults::finfet7();

    void validate() const;
};

// Fig-1-style canonical topologies. Wiring is a reconstruction; each
// builder documents its node table in netlist.cpp.
Circuit build_lif(const NeuronConfig& cfg);
Circuit build_ml(const NeuronConfig& cfg);
Circuit build_ah(const NeuronConfig& cfg);
Circuit build_neuron(const NeuronConfig& cfg);

} // namespace spikeforge
