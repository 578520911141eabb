#ifndef CRNCALC_CIRCUIT_HPP
#define CRNCALC_CIRCUIT_HPP

#include <map>
#include <string>
#include <vector>

#include "crncalc/interval.hpp"
#include "crncalc/modules.hpp"
#include "crncalc/network.hpp"

namespace crncalc {

// A rail-encoded value flowing between modules: species plus the interval
// its limit is known to lie in.
struct Value {
    bool dual = false;
    SpeciesId pos;
    SpeciesId neg;   // empty for single rail
    Interval range;  // range of pos - neg in the limit

    static Value single(SpeciesId s, Interval r) { return {false, std::move(s), {}, r}; }
    static Value dual_rail(SpeciesId p, SpeciesId n, Interval r) {
        return {true, std::move(p), std::move(n), r};
    }
};

struct InputBinding {
    std::string name;  // variable or port name
    bool real = false; // dual-rail encoded
    SpeciesId pos, neg;
    Interval declared;
};

struct RosterEntry {
    std::string instance; // namespace prefix; "" for a top-level module
    std::string kind;
    ModuleFlags flags;
    RateGuarantee stated;   // formula as the module states it
    RateGuarantee resolved; // limit-dependent terms evaluated at worst case
};

// A compiled computation: flattened ODE, wiring metadata, initialization
// rules, and the predicted overall rate.
struct CircuitInstance {
    PolynomialODE ode;
    std::vector<InputBinding> inputs;
    Port output;
    std::vector<InitRule> init;
    std::vector<RosterEntry> roster;
    std::vector<Monitor> monitors;
    bool mass_action = true;
    RateGuarantee predicted;
    std::string expression;
    std::map<SpeciesId, double> driver_init; // inits pinned by input drivers

    const InputBinding& input(const std::string& name) const;
    bool is_driven(const SpeciesId& s) const { return driver_init.count(s) != 0; }
};

// Incrementally assembles a circuit, enforcing single-writer wiring and
// checking module domain requirements against the bound value ranges.
class CircuitBuilder {
  public:
    // species that no module writes: circuit inputs and pinned constants
    SpeciesId add_input_species(const SpeciesId& name);
    SpeciesId add_const_species(const SpeciesId& name, double value);

    // Places `spec` under `prefix` (empty = keep local names), with every
    // input port bound to an existing species.  Returns the local-to-global
    // species map.
    std::map<SpeciesId, SpeciesId> instantiate(const ModuleSpec& spec,
                                               const std::string& prefix,
                                               const std::map<std::string, Value>& bindings);

    CircuitInstance finish(Port output, std::vector<InputBinding> inputs,
                           std::string expression = "");

  private:
    CircuitInstance circuit_;
    std::map<SpeciesId, std::string> writer_; // species -> owning instance
};

// Worst-case value of a guarantee over the bound input ranges: every
// limit-dependent term collapses to a constant.
RateGuarantee resolve_guarantee(const RateGuarantee& g,
                                const std::map<std::string, Interval>& port_ranges);

// Wraps a single library module as a circuit of its own; inputs are named
// after the module's ports.  input_ranges (by port name) feed the domain
// checks and the rate bound.
CircuitInstance module_circuit(const ModuleSpec& spec,
                               const std::map<std::string, Interval>& input_ranges);

// Gives an input species the dynamics s' = rate*(limit - s) with
// s(0) = limit + offset, so it converges to `limit` at exactly `rate`.
// Used to exercise circuits under time-varying inputs.
void add_input_driver(CircuitInstance& c, const SpeciesId& species, double limit,
                      double offset, double rate);

// Evaluates every init rule (inputs from `input_values` by binding name,
// dual-rail values split into positive/negative parts), applies overrides,
// and checks the DerivedLog compatibility laws.  With allow_violation the
// checks are skipped, which deliberately de-tunes the circuit.
std::vector<double> resolve_init(const CircuitInstance& c,
                                 const std::map<std::string, double>& input_values,
                                 const std::map<SpeciesId, double>& overrides = {},
                                 bool allow_violation = false);

} // namespace crncalc

#endif
