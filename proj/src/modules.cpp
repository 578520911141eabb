#include "crncalc/modules.hpp"

#include <cmath>

namespace crncalc {

namespace {

constexpr double kE = 2.718281828459045;

using P = std::vector<std::pair<SpeciesId, uint32_t>>;

// Fills in the checker-derived flags and validates the wiring conventions
// shared by every factory.
ModuleSpec finalize(ModuleSpec spec, bool chemistry_override = false) {
    spec.ode.normalize();
    spec.flags.mass_action = is_mass_action_realizable(spec.ode).realizable;
    spec.flags.chemistry = spec.flags.mass_action || chemistry_override;
    for (const Port& p : spec.ports) {
        if (p.direction != Port::Direction::Input) continue;
        for (const SpeciesId* s : {&p.pos, &p.neg}) {
            if (s->empty()) continue;
            if (!spec.ode.rhs_of(spec.ode.index_of(*s)).empty())
                throw Error(ErrorKind::Invalid,
                            spec.kind + ": input species " + *s + " is written to");
        }
    }
    return spec;
}

RateGuarantee rate_min_rho_const(double c, const std::string& text) {
    RateGuarantee g;
    g.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    g.terms.push_back({RateGuarantee::Term::Kind::Const, c, "", ""});
    g.text = text;
    return g;
}

InitRule fixed(SpeciesId s, double v) {
    return {std::move(s), InitRule::Kind::Fixed, v, {}};
}
InitRule derived_log(SpeciesId s, SpeciesId of) {
    return {std::move(s), InitRule::Kind::DerivedLog, 0.0, std::move(of)};
}
InitRule free_default(SpeciesId s, double v) {
    return {std::move(s), InitRule::Kind::Free, v, {}};
}

// Shared reusable pieces, written onto an existing spec with local names.

// z' = (a - z) x z,  x' = (a - z) x  with x(0) = ln z(0); x tracks ln z.
void emit_log3_core(ModuleSpec& spec, const SpeciesId& a, const SpeciesId& z,
                    const SpeciesId& x, double z0) {
    spec.ode.add_variable(z);
    spec.ode.add_variable(x);
    spec.ode.add_term(z, 1.0, P{{a, 1}, {x, 1}, {z, 1}});
    spec.ode.add_term(z, -1.0, P{{x, 1}, {z, 2}});
    spec.ode.add_term(x, 1.0, P{{a, 1}, {x, 1}});
    spec.ode.add_term(x, -1.0, P{{x, 1}, {z, 1}});
    spec.init.push_back(fixed(z, z0));
    spec.init.push_back(derived_log(x, z));
    spec.monitors.push_back({Monitor::Kind::AMinusLnB, x, z, x + " - ln " + z});
}

// z' = a - z,  x' = x (a - z)  with ln x(0) = z(0); x tracks e^z.
void emit_exp_core(ModuleSpec& spec, const SpeciesId& a, const SpeciesId& z,
                   const SpeciesId& x, double x0) {
    spec.ode.add_variable(z);
    spec.ode.add_variable(x);
    spec.ode.add_term(z, 1.0, P{{a, 1}});
    spec.ode.add_term(z, -1.0, P{{z, 1}});
    spec.ode.add_term(x, 1.0, P{{a, 1}, {x, 1}});
    spec.ode.add_term(x, -1.0, P{{x, 1}, {z, 1}});
    spec.init.push_back(fixed(x, x0));
    spec.init.push_back(derived_log(z, x));
    spec.monitors.push_back({Monitor::Kind::LnAMinusB, x, z, "ln " + x + " - " + z});
}

// m' = m (b - c - m): rectified subtraction core feeding max/abs_diff.
void emit_rect_core(ModuleSpec& spec, const SpeciesId& out, const SpeciesId& minuend,
                    const SpeciesId& subtrahend, double seed) {
    spec.ode.add_variable(out);
    spec.ode.add_term(out, 1.0, P{{minuend, 1}, {out, 1}});
    spec.ode.add_term(out, -1.0, P{{subtrahend, 1}, {out, 1}});
    spec.ode.add_term(out, -1.0, P{{out, 2}});
    spec.init.push_back(fixed(out, seed));
}

// Constant-e supply: either a static species or the exponential module fed
// by a pinned unit species.  Returns the species carrying (or converging
// to) e.
SpeciesId emit_const_e(ModuleSpec& spec, ConstEMode mode, const std::string& prefix) {
    SpeciesId e = prefix + "E";
    if (mode == ConstEMode::Static) {
        spec.ode.add_variable(e);
        spec.init.push_back(fixed(e, kE));
        return e;
    }
    SpeciesId unit = prefix + "E_IN", z = prefix + "E_Z";
    spec.ode.add_variable(unit);
    spec.init.push_back(fixed(unit, 1.0));
    emit_exp_core(spec, unit, z, e, 1.0);
    return e;
}

} // namespace

double RateGuarantee::evaluate(double rho_in,
                               const std::map<std::string, double>& input_limits) const {
    auto limit = [&](const std::string& port) -> std::optional<double> {
        auto it = input_limits.find(port);
        if (it == input_limits.end()) return std::nullopt;
        return it->second;
    };
    double value = std::numeric_limits<double>::infinity();
    for (const Term& t : terms) {
        double v = 0.0;
        switch (t.kind) {
            case Term::Kind::InputRate: v = rho_in; break;
            case Term::Kind::Const: v = t.c; break;
            case Term::Kind::ScaledLimit: {
                auto l = limit(t.port_a);
                v = l ? t.c * *l : 0.0;
                break;
            }
            case Term::Kind::LimitLnLimit: {
                auto l = limit(t.port_a);
                v = (l && *l > 1.0) ? *l * std::log(*l) : 0.0;
                break;
            }
            case Term::Kind::AbsDiffLimit: {
                auto la = limit(t.port_a), lb = limit(t.port_b);
                v = (la && lb) ? std::abs(*la - *lb) : 0.0;
                break;
            }
            case Term::Kind::InputDependent: {
                auto l = limit(t.port_a);
                v = (l && *l > 0.0) ? std::min(std::abs(*l - 1.0), *l * std::abs(std::log(*l)))
                                    : 0.0;
                break;
            }
        }
        value = std::min(value, v);
    }
    return std::max(value, 0.0);
}

const Port& ModuleSpec::port(const std::string& name) const {
    for (const Port& p : ports)
        if (p.name == name) return p;
    throw Error(ErrorKind::Invalid, kind + " has no port " + name);
}

const Port& ModuleSpec::output() const {
    const Port* out = nullptr;
    for (const Port& p : ports) {
        if (p.direction != Port::Direction::Output) continue;
        if (out) throw Error(ErrorKind::Invalid, kind + " has several outputs");
        out = &p;
    }
    if (!out) throw Error(ErrorKind::Invalid, kind + " has no output");
    return *out;
}

std::string to_string(const ModuleFlags& f) {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    add(f.chemistry, "chemistry");
    add(f.mass_action, "mass_action");
    add(f.full_domain, "full_domain");
    add(f.bounded_time, "bounded_time");
    return out.empty() ? "none" : out;
}

// --- arithmetic -------------------------------------------------------------

ModuleSpec mk_identity() {
    ModuleSpec s;
    s.kind = "identity";
    s.ode.add_variable("A");
    s.ode.add_variable("Z");
    s.ode.add_term("Z", 1.0, P{{"A", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 1}});
    s.ports = {Port::input("a", "A"), Port::output("out", "Z")};
    s.init = {free_default("Z", 0.0)};
    s.domain = {{"a", 0.0, false, "a* >= 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_add() {
    ModuleSpec s;
    s.kind = "add";
    for (const char* v : {"A", "B", "Z"}) s.ode.add_variable(v);
    s.ode.add_term("Z", 1.0, P{{"A", 1}});
    s.ode.add_term("Z", 1.0, P{{"B", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 1}});
    s.ports = {Port::input("a", "A"), Port::input("b", "B"), Port::output("out", "Z")};
    s.init = {free_default("Z", 0.0)};
    s.domain = {{"a", 0.0, false, "a* >= 0"}, {"b", 0.0, false, "b* >= 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_in, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_mul() {
    ModuleSpec s;
    s.kind = "mul";
    for (const char* v : {"A", "B", "Z"}) s.ode.add_variable(v);
    s.ode.add_term("Z", 1.0, P{{"A", 1}, {"B", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 1}});
    s.ports = {Port::input("a", "A"), Port::input("b", "B"), Port::output("out", "Z")};
    s.init = {free_default("Z", 0.0)};
    s.domain = {{"a", 0.0, false, "a* >= 0"}, {"b", 0.0, false, "b* >= 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_in, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_reciprocal(double y0) {
    if (!(y0 > 0.0))
        throw Error(ErrorKind::Domain, "reciprocal needs y(0) > 0");
    ModuleSpec s;
    s.kind = "reciprocal";
    s.ode.add_variable("A");
    s.ode.add_variable("Y");
    s.ode.add_term("Y", 1.0, P{{"Y", 1}});
    s.ode.add_term("Y", -1.0, P{{"A", 1}, {"Y", 2}});
    s.ports = {Port::input("a", "A"), Port::output("out", "Y")};
    s.init = {fixed("Y", y0)};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_mth_root(int m, double x0) {
    if (m < 1 || m + 1 > Complex::kMaxStoichiometry)
        throw Error(ErrorKind::Domain, "root index m must be in [1, " +
                                           std::to_string(Complex::kMaxStoichiometry - 1) + "]");
    if (!(x0 > 0.0)) throw Error(ErrorKind::Domain, "mth_root needs x(0) > 0");
    ModuleSpec s;
    s.kind = "mth_root";
    s.ode.add_variable("A");
    s.ode.add_variable("X");
    s.ode.add_term("X", 1.0, P{{"A", 1}, {"X", 1}});
    s.ode.add_term("X", -1.0, P{{"X", static_cast<uint32_t>(m + 1)}});
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    s.init = {fixed("X", x0)};
    s.domain = {{"a", 0.0, true, "a* > 0 (no roots of zero)"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back(
        {RateGuarantee::Term::Kind::ScaledLimit, static_cast<double>(m), "a", ""});
    s.rate.text = "min{rho_a, " + std::to_string(m) + "*a}";
    s.flags.full_domain = true;
    s.flags.bounded_time = false; // m*a* has no uniform positive floor
    return finalize(std::move(s));
}

ModuleSpec mk_rectified_sub(double seed) {
    if (!(seed > 0.0)) throw Error(ErrorKind::Domain, "rectified_sub needs a positive seed");
    ModuleSpec s;
    s.kind = "rectified_sub";
    s.ode.add_variable("A");
    s.ode.add_variable("B");
    emit_rect_core(s, "Z", "A", "B", seed);
    s.ports = {Port::input("a", "A"), Port::input("b", "B"), Port::output("out", "Z")};
    s.domain = {{"a", 0.0, false, "a* >= 0"}, {"b", 0.0, false, "b* >= 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::AbsDiffLimit, 1.0, "a", "b"});
    s.rate.text = "min{rho_in, |a - b|}"; // degenerates at ties a* = b*
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

ModuleSpec mk_abs_diff(double seed) {
    if (!(seed > 0.0)) throw Error(ErrorKind::Domain, "abs_diff needs a positive seed");
    ModuleSpec s;
    s.kind = "abs_diff";
    s.ode.add_variable("A");
    s.ode.add_variable("B");
    emit_rect_core(s, "M1", "A", "B", seed);
    emit_rect_core(s, "M2", "B", "A", seed);
    s.ode.add_variable("Z");
    s.ode.add_term("Z", 1.0, P{{"M1", 1}});
    s.ode.add_term("Z", 1.0, P{{"M2", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 1}});
    s.init.push_back(free_default("Z", 0.0));
    s.ports = {Port::input("a", "A"), Port::input("b", "B"), Port::output("out", "Z")};
    s.domain = {{"a", 0.0, false, "a* >= 0"}, {"b", 0.0, false, "b* >= 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::AbsDiffLimit, 1.0, "a", "b"});
    s.rate.text = "min{rho_in, |a - b|}";
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

ModuleSpec mk_max(double seed) {
    if (!(seed > 0.0)) throw Error(ErrorKind::Domain, "max needs a positive seed");
    ModuleSpec s;
    s.kind = "max";
    s.ode.add_variable("A");
    s.ode.add_variable("B");
    emit_rect_core(s, "M", "B", "A", seed); // M -> max(b - a, 0)
    s.ode.add_variable("Z");                // Z -> a + M
    s.ode.add_term("Z", 1.0, P{{"A", 1}});
    s.ode.add_term("Z", 1.0, P{{"M", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 1}});
    s.init.push_back(free_default("Z", 0.0));
    s.ports = {Port::input("a", "A"), Port::input("b", "B"), Port::output("out", "Z")};
    s.domain = {{"a", 0.0, false, "a* >= 0"}, {"b", 0.0, false, "b* >= 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::AbsDiffLimit, 1.0, "a", "b"});
    s.rate.text = "min{rho_in, |a - b|}";
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

// --- exponential ------------------------------------------------------------

ModuleSpec mk_exp_nonneg(double x0) {
    if (!(x0 > 0.0)) throw Error(ErrorKind::Domain, "exp_nonneg needs x(0) > 0");
    ModuleSpec s;
    s.kind = "exp_nonneg";
    s.ode.add_variable("A");
    emit_exp_core(s, "A", "Z", "X", x0);
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    s.domain = {{"a", 0.0, false, "a* >= 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_exp_real() {
    ModuleSpec s;
    s.kind = "exp_real";
    s.ode.add_variable("AP");
    s.ode.add_variable("AN");
    emit_exp_core(s, "AP", "ZP", "XP", 1.0); // XP -> e^{ap}
    emit_exp_core(s, "AN", "ZN", "XN", 1.0); // XN -> e^{an}
    s.ode.add_variable("R");                 // R -> 1/e^{an}
    s.ode.add_term("R", 1.0, P{{"R", 1}});
    s.ode.add_term("R", -1.0, P{{"XN", 1}, {"R", 2}});
    s.init.push_back(fixed("R", 1.0));
    s.ode.add_variable("V"); // V -> e^{ap}/e^{an}
    s.ode.add_term("V", 1.0, P{{"XP", 1}, {"R", 1}});
    s.ode.add_term("V", -1.0, P{{"V", 1}});
    s.init.push_back(free_default("V", 0.0));
    s.ports = {Port::input_dual("a", "AP", "AN"), Port::output("out", "V")};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

// --- logarithms -------------------------------------------------------------

ModuleSpec mk_log_system1(double z0) {
    if (!(z0 > 0.0)) throw Error(ErrorKind::Domain, "log_system1 needs z(0) > 0");
    ModuleSpec s;
    s.kind = "log_system1";
    s.ode.add_variable("A");
    s.ode.add_variable("Z");
    s.ode.add_variable("X");
    s.ode.add_term("Z", 1.0, P{{"A", 1}, {"Z", 1}});
    s.ode.add_term("Z", -1.0, P{{"Z", 2}});
    s.ode.add_term("X", 1.0, P{{"A", 1}});
    s.ode.add_term("X", -1.0, P{{"Z", 1}});
    s.init = {fixed("Z", z0), derived_log("X", "Z")};
    s.monitors.push_back({Monitor::Kind::AMinusLnB, "X", "Z", "X - ln Z"});
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::ScaledLimit, 1.0, "a", ""});
    s.rate.text = "min{rho_a, a}";
    s.rate.exact_for_const = true; // constant input converges at rate exactly a
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

ModuleSpec mk_log_system1r(double z0) {
    if (!(z0 >= 1.0)) throw Error(ErrorKind::Domain, "log_system1r needs z(0) >= 1");
    ModuleSpec s = mk_log_system1(z0);
    s.kind = "log_system1r";
    s.domain = {{"a", 1.0, false, "a* >= 1"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = false;
    s.flags.bounded_time = true;
    // not mass-action, but z >= 1 keeps x = ln z nonnegative
    return finalize(std::move(s), /*chemistry_override=*/true);
}

ModuleSpec mk_log_system2(double y0, double z0) {
    if (!(y0 > 0.0) || !(z0 > 0.0))
        throw Error(ErrorKind::Domain, "log_system2 needs y(0) > 0 and z(0) > 0");
    ModuleSpec s;
    s.kind = "log_system2";
    for (const char* v : {"A", "Y", "Z", "X"}) s.ode.add_variable(v);
    s.ode.add_term("Y", 1.0, P{{"Y", 1}});
    s.ode.add_term("Y", -1.0, P{{"A", 1}, {"Y", 2}});
    s.ode.add_term("X", 1.0, P{});
    s.ode.add_term("X", -1.0, P{{"Y", 1}, {"Z", 1}});
    s.ode.add_term("Z", 1.0, P{{"Z", 1}});
    s.ode.add_term("Z", -1.0, P{{"Y", 1}, {"Z", 2}});
    s.init = {fixed("Y", y0), fixed("Z", z0), derived_log("X", "Z")};
    s.monitors.push_back({Monitor::Kind::AMinusLnB, "X", "Z", "X - ln Z"});
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate = rate_min_rho_const(1.0, "min{rho_a, 1}");
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_log_system3(double z0) {
    if (!(z0 > 1.0)) throw Error(ErrorKind::Domain, "log_system3 needs z(0) > 1");
    ModuleSpec s;
    s.kind = "log_system3";
    s.ode.add_variable("A");
    emit_log3_core(s, "A", "Z", "X", z0);
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    // runs on all a > 0 but computes the rectified log below 1; the
    // compiler refuses to lower ln onto it unless a* >= 1 is declared
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::LimitLnLimit, 1.0, "a", ""});
    s.rate.text = "min{rho_a, c*ln c} for a(t) >= c > 1";
    s.flags.full_domain = false;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

ModuleSpec mk_log_system4(double z0, double y0) {
    if (!(z0 >= 1.0) || !(y0 >= 1.0))
        throw Error(ErrorKind::Domain, "log_system4 needs z(0) >= 1 and y(0) >= 1");
    ModuleSpec s;
    s.kind = "log_system4";
    s.ode.add_variable("A");
    // positive rail: System 3 driven by a
    s.ode.add_variable("Z");
    s.ode.add_variable("XP");
    s.ode.add_term("Z", 1.0, P{{"A", 1}, {"XP", 1}, {"Z", 1}});
    s.ode.add_term("Z", -1.0, P{{"XP", 1}, {"Z", 2}});
    s.ode.add_term("XP", 1.0, P{{"A", 1}, {"XP", 1}});
    s.ode.add_term("XP", -1.0, P{{"XP", 1}, {"Z", 1}});
    // negative rail: same mechanism aimed at the reciprocal target 1/a
    s.ode.add_variable("Y");
    s.ode.add_variable("XN");
    s.ode.add_term("Y", 1.0, P{{"XN", 1}, {"Y", 1}});
    s.ode.add_term("Y", -1.0, P{{"A", 1}, {"XN", 1}, {"Y", 2}});
    s.ode.add_term("XN", 1.0, P{{"XN", 1}});
    s.ode.add_term("XN", -1.0, P{{"A", 1}, {"Y", 1}, {"XN", 1}});
    s.init = {fixed("Z", z0), derived_log("XP", "Z"), fixed("Y", y0),
              derived_log("XN", "Y")};
    s.monitors.push_back({Monitor::Kind::AMinusLnB, "XP", "Z", "XP - ln Z"});
    s.monitors.push_back({Monitor::Kind::AMinusLnB, "XN", "Y", "XN - ln Y"});
    s.ports = {Port::input("a", "A"), Port::output_dual("out", "XP", "XN")};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputDependent, 1.0, "a", ""});
    s.rate.text = "input-dependent (degenerates as a -> 1)";
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

ModuleSpec mk_log_system5(ConstEMode e_mode) {
    ModuleSpec s;
    s.kind = "log_system5";
    s.ode.add_variable("A");
    SpeciesId e = emit_const_e(s, e_mode, "");
    s.ode.add_variable("W"); // W -> e * a
    s.ode.add_term("W", 1.0, P{{e, 1}, {"A", 1}});
    s.ode.add_term("W", -1.0, P{{"W", 1}});
    s.init.push_back(free_default("W", 0.0));
    emit_log3_core(s, "W", "Z", "X", kE); // X -> ln(e a*) = 1 + ln a*
    s.ode.add_variable("ONE");            // static unit for the final "- 1"
    s.init.push_back(fixed("ONE", 1.0));
    s.ports = {Port::input("a", "A"), Port::output_dual("out", "X", "ONE")};
    s.domain = {{"a", 1.0, false, "a* >= 1"}};
    s.rate = rate_min_rho_const(kE, "min{rho_a, e}");
    s.rate.certified_cap = 1.0;
    s.flags.full_domain = false;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_log_system6(ConstEMode e_mode) {
    ModuleSpec s;
    s.kind = "log_system6";
    s.ode.add_variable("A");
    SpeciesId e = emit_const_e(s, e_mode, "");
    // W1 -> e*a by relaxation; W2 -> e/a by the scaled-inversion logistic
    // w' = w(e - a w).  Folding the reciprocal into the multiply keeps that
    // branch's convergence rate at e instead of stacking unit-rate stages.
    s.ode.add_variable("W1");
    s.ode.add_term("W1", 1.0, P{{e, 1}, {"A", 1}});
    s.ode.add_term("W1", -1.0, P{{"W1", 1}});
    s.init.push_back(free_default("W1", 0.0));
    s.ode.add_variable("W2");
    s.ode.add_term("W2", 1.0, P{{e, 1}, {"W2", 1}});
    s.ode.add_term("W2", -1.0, P{{"A", 1}, {"W2", 2}});
    s.init.push_back(fixed("W2", 1.0));
    const struct {
        const char* w;   // branch value: e*a or e/a
        const char* m;   // max(w - e, 0)
        const char* u;   // max(w, e) = e + m
        const char* z;   // log stage state
        const char* x;   // log stage output = 1 + max(+-ln a, 0)
    } branches[2] = {{"W1", "M1", "U1", "Z1", "X1"}, {"W2", "M2", "U2", "Z2", "X2"}};
    for (const auto& br : branches) {
        emit_rect_core(s, br.m, br.w, e, 1e-6);
        s.ode.add_variable(br.u);
        s.ode.add_term(br.u, 1.0, P{{e, 1}});
        s.ode.add_term(br.u, 1.0, P{{br.m, 1}});
        s.ode.add_term(br.u, -1.0, P{{br.u, 1}});
        // starting the max output at e keeps u(t) >= e for all t, which is
        // what gives the log stage its c ln c = e rate floor
        s.init.push_back(free_default(br.u, kE));
        emit_log3_core(s, br.u, br.z, br.x, kE);
    }
    // the two unit offsets ln(e*) = 1 cancel in the rail difference
    s.ports = {Port::input("a", "A"), Port::output_dual("out", "X1", "X2")};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate = rate_min_rho_const(kE, "min{rho_a, e}");
    s.rate.certified_cap = 1.0;
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_const_e(ConstEMode mode) {
    ModuleSpec s;
    s.kind = "const_e";
    SpeciesId e = emit_const_e(s, mode, "");
    s.ports = {Port::output("out", e)};
    if (mode == ConstEMode::Static) {
        s.rate.terms.push_back(
            {RateGuarantee::Term::Kind::Const, std::numeric_limits<double>::infinity(), "", ""});
        s.rate.text = "immediate";
    } else {
        s.rate.terms.push_back({RateGuarantee::Term::Kind::Const, 1.0, "", ""});
        s.rate.text = "1";
    }
    s.flags.full_domain = true;
    s.flags.bounded_time = true;
    return finalize(std::move(s));
}

ModuleSpec mk_counterexample(double x0) {
    if (x0 < 0.0) throw Error(ErrorKind::Domain, "counterexample needs x(0) >= 0");
    ModuleSpec s;
    s.kind = "counterexample";
    s.ode.add_variable("A");
    s.ode.add_variable("X");
    s.ode.add_term("X", 1.0, P{});
    s.ode.add_term("X", -1.0, P{{"A", 1}, {"X", 1}});
    s.init = {free_default("X", x0)};
    s.ports = {Port::input("a", "A"), Port::output("out", "X")};
    s.domain = {{"a", 0.0, true, "a* > 0"}};
    s.rate.terms.push_back({RateGuarantee::Term::Kind::InputRate, 1.0, "", ""});
    s.rate.terms.push_back({RateGuarantee::Term::Kind::ScaledLimit, 1.0, "a", ""});
    s.rate.text = "exactly a (input-dependent)";
    s.rate.exact_for_const = true;
    s.flags.full_domain = true;
    s.flags.bounded_time = false;
    return finalize(std::move(s));
}

const std::vector<std::string>& module_catalog() {
    static const std::vector<std::string> names = {
        "identity",     "add",          "mul",          "reciprocal",
        "mth_root",     "rectified_sub","abs_diff",     "max",
        "exp_nonneg",   "exp_real",     "log_system1",  "log_system1r",
        "log_system2",  "log_system3",  "log_system4",  "log_system5",
        "log_system6",  "const_e",      "counterexample",
    };
    return names;
}

ModuleSpec make_module(const std::string& name) {
    if (name == "identity") return mk_identity();
    if (name == "add") return mk_add();
    if (name == "mul") return mk_mul();
    if (name == "reciprocal") return mk_reciprocal();
    if (name == "mth_root") return mk_mth_root(2);
    if (name == "rectified_sub") return mk_rectified_sub();
    if (name == "abs_diff") return mk_abs_diff();
    if (name == "max") return mk_max();
    if (name == "exp_nonneg") return mk_exp_nonneg();
    if (name == "exp_real") return mk_exp_real();
    if (name == "log_system1") return mk_log_system1();
    if (name == "log_system1r") return mk_log_system1r();
    if (name == "log_system2") return mk_log_system2();
    if (name == "log_system3") return mk_log_system3();
    if (name == "log_system4") return mk_log_system4();
    if (name == "log_system5") return mk_log_system5();
    if (name == "log_system6") return mk_log_system6();
    if (name == "const_e") return mk_const_e();
    if (name == "counterexample") return mk_counterexample();
    throw Error(ErrorKind::Invalid, "unknown module '" + name + "'");
}

} // namespace crncalc
