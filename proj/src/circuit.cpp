#include "crncalc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace crncalc {

namespace {

std::string qualify(const std::string& prefix, const SpeciesId& local) {
    return prefix.empty() ? local : prefix + "." + local;
}

std::string format_rate_value(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Smallest value a guarantee term can take when the port limit ranges over
// the interval.
double worst_case_term(const RateGuarantee::Term& t,
                       const std::map<std::string, Interval>& ranges) {
    using K = RateGuarantee::Term::Kind;
    auto range = [&](const std::string& port) -> Interval {
        auto it = ranges.find(port);
        return it == ranges.end() ? Interval::real() : it->second;
    };
    switch (t.kind) {
        case K::InputRate: return Interval::kInf; // handled separately
        case K::Const: return t.c;
        case K::ScaledLimit: {
            Interval r = range(t.port_a);
            return r.lo > 0 ? t.c * r.lo : 0.0;
        }
        case K::LimitLnLimit: {
            Interval r = range(t.port_a);
            return r.lo > 1.0 ? r.lo * std::log(r.lo) : 0.0;
        }
        case K::AbsDiffLimit: {
            Interval gap = interval::abs_diff(range(t.port_a), range(t.port_b));
            return std::isfinite(gap.lo) ? gap.lo : 0.0;
        }
        case K::InputDependent: {
            Interval r = range(t.port_a);
            if (!(r.lo > 0.0)) return 0.0;
            if (r.contains(1.0)) return 0.0;
            double edge = r.lo > 1.0 ? r.lo : r.hi;
            if (!std::isfinite(edge)) return 0.0;
            return std::min(std::abs(edge - 1.0), edge * std::abs(std::log(edge)));
        }
    }
    return 0.0;
}

} // namespace

RateGuarantee resolve_guarantee(const RateGuarantee& g,
                                const std::map<std::string, Interval>& port_ranges) {
    RateGuarantee out;
    out.exact_for_const = g.exact_for_const;
    out.certified_cap = g.certified_cap;
    bool has_rho = false;
    double bound = Interval::kInf;
    for (const auto& t : g.terms) {
        if (t.kind == RateGuarantee::Term::Kind::InputRate) {
            has_rho = true;
            continue;
        }
        bound = std::min(bound, worst_case_term(t, port_ranges));
    }
    if (has_rho) out.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    out.terms.push_back({RateGuarantee::Term::Kind::Const, bound, "", ""});
    out.text = has_rho ? "min{rho_in, " + format_rate_value(bound) + "}"
                       : format_rate_value(bound);
    return out;
}

const InputBinding& CircuitInstance::input(const std::string& name) const {
    for (const auto& in : inputs)
        if (in.name == name) return in;
    throw Error(ErrorKind::Invalid, "no input named '" + name + "'");
}

SpeciesId CircuitBuilder::add_input_species(const SpeciesId& name) {
    circuit_.ode.add_variable(name);
    return name;
}

SpeciesId CircuitBuilder::add_const_species(const SpeciesId& name, double value) {
    if (value < 0.0)
        throw Error(ErrorKind::Domain, "constant species " + name + " must be >= 0");
    circuit_.ode.add_variable(name);
    circuit_.init.push_back({name, InitRule::Kind::Fixed, value, {}});
    return name;
}

std::map<SpeciesId, SpeciesId> CircuitBuilder::instantiate(
    const ModuleSpec& spec, const std::string& prefix,
    const std::map<std::string, Value>& bindings) {
    // map local species -> global species
    std::map<SpeciesId, SpeciesId> names;
    std::map<std::string, Interval> port_ranges;
    std::set<SpeciesId> input_locals;

    for (const Port& p : spec.ports) {
        if (p.direction != Port::Direction::Input) continue;
        auto it = bindings.find(p.name);
        if (it == bindings.end())
            throw Error(ErrorKind::Invalid,
                        spec.kind + ": input port '" + p.name + "' not bound");
        const Value& v = it->second;
        if (p.dual != v.dual)
            throw Error(ErrorKind::Domain,
                        spec.kind + ": port '" + p.name + "' expects a " +
                            (p.dual ? "dual" : "single") + "-rail value");
        names[p.pos] = v.pos;
        input_locals.insert(p.pos);
        if (p.dual) {
            names[p.neg] = v.neg;
            input_locals.insert(p.neg);
        }
        port_ranges[p.name] = v.range;
    }

    for (const DomainReq& req : spec.domain) {
        Interval r = port_ranges.at(req.port);
        bool ok = req.strict ? (r.lo > req.min_limit) : (r.lo >= req.min_limit);
        if (!ok)
            throw Error(ErrorKind::Domain,
                        spec.kind + ": input '" + req.port + "' must satisfy " + req.note +
                            " (declared lower bound " + format_rate_value(r.lo) + ")");
    }

    for (const SpeciesId& local : spec.ode.variables()) {
        if (input_locals.count(local)) continue;
        SpeciesId global = qualify(prefix, local);
        if (circuit_.ode.find(global))
            throw Error(ErrorKind::Invalid, "species collision at " + global);
        circuit_.ode.add_variable(global);
        names[local] = global;
        writer_[global] = prefix.empty() ? spec.kind : prefix;
    }

    for (uint32_t i = 0; i < spec.ode.size(); ++i) {
        const SpeciesId& local = spec.ode.variables()[i];
        if (input_locals.count(local)) continue; // catalytic, no terms by construction
        uint32_t target = circuit_.ode.index_of(names.at(local));
        for (const Monomial& m : spec.ode.rhs_of(i)) {
            std::vector<std::pair<uint32_t, uint32_t>> powers;
            powers.reserve(m.powers.size());
            for (const auto& [v, e] : m.powers)
                powers.emplace_back(circuit_.ode.index_of(names.at(spec.ode.variables()[v])), e);
            circuit_.ode.add_term(target, m.coeff, std::move(powers));
        }
    }

    for (const InitRule& r : spec.init) {
        InitRule global = r;
        global.species = names.at(r.species);
        if (!global.of.empty()) global.of = names.at(r.of);
        circuit_.init.push_back(std::move(global));
    }
    for (const Monitor& m : spec.monitors) {
        Monitor global = m;
        global.a = names.at(m.a);
        global.b = names.at(m.b);
        global.label = prefix.empty() ? m.label : prefix + ": " + m.label;
        circuit_.monitors.push_back(std::move(global));
    }

    circuit_.roster.push_back({prefix, spec.kind, spec.flags, spec.rate,
                               resolve_guarantee(spec.rate, port_ranges)});
    circuit_.mass_action = circuit_.mass_action && spec.flags.mass_action;
    return names;
}

CircuitInstance CircuitBuilder::finish(Port output, std::vector<InputBinding> inputs,
                                       std::string expression) {
    circuit_.ode.normalize();
    circuit_.output = std::move(output);
    circuit_.inputs = std::move(inputs);
    circuit_.expression = std::move(expression);

    // predicted rate: the slowest resolved module bound, rho passed through
    double bound = Interval::kInf;
    for (const auto& entry : circuit_.roster)
        bound = std::min(bound, entry.resolved.evaluate(Interval::kInf, {}));
    circuit_.predicted.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    circuit_.predicted.terms.push_back({RateGuarantee::Term::Kind::Const, bound, "", ""});
    circuit_.predicted.text = "min{rho_in, " + format_rate_value(bound) + "}";
    return std::move(circuit_);
}

CircuitInstance module_circuit(const ModuleSpec& spec,
                               const std::map<std::string, Interval>& input_ranges) {
    CircuitBuilder builder;
    std::map<std::string, Value> bindings;
    std::vector<InputBinding> inputs;
    for (const Port& p : spec.ports) {
        if (p.direction != Port::Direction::Input) continue;
        auto it = input_ranges.find(p.name);
        Interval range = it != input_ranges.end()
                             ? it->second
                             : (p.dual ? Interval::real() : Interval::nonneg());
        builder.add_input_species(p.pos);
        if (p.dual) builder.add_input_species(p.neg);
        bindings[p.name] =
            p.dual ? Value::dual_rail(p.pos, p.neg, range) : Value::single(p.pos, range);
        inputs.push_back({p.name, p.dual, p.pos, p.neg, range});
    }
    builder.instantiate(spec, "", bindings);
    return builder.finish(spec.output(), std::move(inputs));
}

void add_input_driver(CircuitInstance& c, const SpeciesId& species, double limit,
                      double offset, double rate) {
    if (!(rate > 0.0)) throw Error(ErrorKind::Domain, "driver rate must be positive");
    uint32_t idx = c.ode.index_of(species);
    if (!c.ode.rhs_of(idx).empty())
        throw Error(ErrorKind::Invalid, species + " already has dynamics");
    if (limit * rate != 0.0) c.ode.add_term(idx, rate * limit, {});
    c.ode.add_term(idx, -rate, {{idx, 1}});
    c.ode.normalize();
    c.driver_init[species] = limit + offset;
}

std::vector<double> resolve_init(const CircuitInstance& c,
                                 const std::map<std::string, double>& input_values,
                                 const std::map<SpeciesId, double>& overrides,
                                 bool allow_violation) {
    const size_t n = c.ode.size();
    std::vector<double> state(n, std::numeric_limits<double>::quiet_NaN());
    auto idx = [&](const SpeciesId& s) { return c.ode.index_of(s); };

    for (const auto& [name, v] : input_values) {
        (void)v;
        if (std::none_of(c.inputs.begin(), c.inputs.end(),
                         [&](const InputBinding& in) { return in.name == name; }))
            throw Error(ErrorKind::Domain, "'" + name + "' is not an input of this circuit");
    }
    for (const auto& [s, v] : overrides) {
        (void)v;
        if (std::none_of(c.init.begin(), c.init.end(),
                         [&](const InitRule& r) { return r.species == s; }))
            throw Error(ErrorKind::Invalid, "no init rule for species '" + s + "'");
    }

    for (const auto& [s, v] : c.driver_init) state[idx(s)] = v;

    for (const InputBinding& in : c.inputs) {
        auto it = input_values.find(in.name);
        if (it == input_values.end()) {
            // driven rails may omit a value
            bool pos_set = !std::isnan(state[idx(in.pos)]);
            bool neg_set = in.neg.empty() || !std::isnan(state[idx(in.neg)]);
            if (pos_set && neg_set) continue;
            throw Error(ErrorKind::Domain, "no value for input '" + in.name + "'");
        }
        double v = it->second;
        if (!in.declared.contains(v))
            throw Error(ErrorKind::Domain,
                        "input '" + in.name + "' = " + std::to_string(v) +
                            " outside its declared range");
        if (in.real) {
            if (std::isnan(state[idx(in.pos)])) state[idx(in.pos)] = v > 0 ? v : 0.0;
            if (std::isnan(state[idx(in.neg)])) state[idx(in.neg)] = v < 0 ? -v : 0.0;
        } else {
            if (v < 0.0)
                throw Error(ErrorKind::Domain,
                            "input '" + in.name + "' must be nonnegative");
            if (std::isnan(state[idx(in.pos)])) state[idx(in.pos)] = v;
        }
    }

    // Fixed and Free rules first, then DerivedLog in dependency order.
    for (const InitRule& r : c.init) {
        if (r.kind == InitRule::Kind::DerivedLog) continue;
        double v = r.value;
        if (auto it = overrides.find(r.species); it != overrides.end()) {
            if (r.kind == InitRule::Kind::Fixed && it->second != r.value && !allow_violation)
                throw Error(ErrorKind::InitViolation,
                            r.species + " must start at " + std::to_string(r.value));
            v = it->second;
        }
        if (v < 0.0 && !allow_violation)
            throw Error(ErrorKind::Domain, r.species + " initial value must be >= 0");
        state[idx(r.species)] = v;
    }

    bool progress = true;
    std::vector<const InitRule*> pending;
    for (const InitRule& r : c.init)
        if (r.kind == InitRule::Kind::DerivedLog) pending.push_back(&r);
    while (!pending.empty() && progress) {
        progress = false;
        std::vector<const InitRule*> next;
        for (const InitRule* r : pending) {
            double target = state[idx(r->of)];
            if (std::isnan(target)) {
                next.push_back(r);
                continue;
            }
            if (!(target > 0.0))
                throw Error(ErrorKind::Domain,
                            r->species + " = ln(" + r->of + "(0)) needs " + r->of +
                                "(0) > 0");
            double derived = std::log(target);
            if (auto it = overrides.find(r->species); it != overrides.end()) {
                if (it->second != derived && !allow_violation)
                    throw Error(ErrorKind::InitViolation,
                                r->species + "(0) must equal ln " + r->of + "(0) = " +
                                    std::to_string(derived));
                derived = it->second;
            }
            state[idx(r->species)] = derived;
            progress = true;
        }
        pending = std::move(next);
    }
    if (!pending.empty())
        throw Error(ErrorKind::CyclicInit,
                    "initialization of " + pending.front()->species +
                        " depends on itself");

    for (size_t i = 0; i < n; ++i)
        if (std::isnan(state[i]))
            throw Error(ErrorKind::Invalid,
                        "species " + c.ode.variables()[i] + " never initialized");
    return state;
}

} // namespace crncalc
