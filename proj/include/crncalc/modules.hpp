#ifndef CRNCALC_MODULES_HPP
#define CRNCALC_MODULES_HPP

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crncalc/network.hpp"

namespace crncalc {

// How a species must be initialized when a circuit is resolved.
struct InitRule {
    enum class Kind {
        Fixed,      // required value
        DerivedLog, // value = ln(init of `of`); the compatibility laws
        Free,       // any nonnegative value works; `value` is the default
    };
    SpeciesId species;
    Kind kind = Kind::Free;
    double value = 0.0; // Fixed value or Free default
    SpeciesId of;       // DerivedLog target
};

struct Port {
    enum class Direction { Input, Output };
    std::string name;
    Direction direction = Direction::Input;
    bool dual = false;
    SpeciesId pos; // the species for single-rail ports
    SpeciesId neg; // only for dual rails; value reads pos - neg

    static Port input(std::string name, SpeciesId s) {
        return {std::move(name), Direction::Input, false, std::move(s), {}};
    }
    static Port output(std::string name, SpeciesId s) {
        return {std::move(name), Direction::Output, false, std::move(s), {}};
    }
    static Port input_dual(std::string name, SpeciesId p, SpeciesId n) {
        return {std::move(name), Direction::Input, true, std::move(p), std::move(n)};
    }
    static Port output_dual(std::string name, SpeciesId p, SpeciesId n) {
        return {std::move(name), Direction::Output, true, std::move(p), std::move(n)};
    }
};

// Guaranteed convergence rate of a module's output, as a min over simple
// terms in the input rate rho and the input limits.  evaluate() returns the
// concrete bound (0 when no uniform positive bound exists at those limits).
struct RateGuarantee {
    struct Term {
        enum class Kind {
            InputRate,     // rho of the named input port
            Const,         // fixed constant c
            ScaledLimit,   // c * a*                     (mth root: m * a*)
            LimitLnLimit,  // a* ln a*                   (System 3 family)
            AbsDiffLimit,  // |a* - b*|                  (rectified subtraction)
            InputDependent // min(|a*-1|, a*|ln a*|)     (System 4, no uniform bound)
        };
        Kind kind = Kind::Const;
        double c = 1.0;
        std::string port_a, port_b;
    };
    std::vector<Term> terms;
    std::string text;            // printable formula, e.g. "min{rho_a, 1}"
    bool exact_for_const = false;// two-sided "rate exactly a" claims
    // Stated bounds above this value are not certified by the verifier
    // (Systems 5/6 state min{rho, e} but are checked at the min{rho, 1}
    // level their arithmetic sub-modules guarantee).
    double certified_cap = std::numeric_limits<double>::infinity();

    double evaluate(double rho_in, const std::map<std::string, double>& input_limits) const;
};

struct ModuleFlags {
    bool chemistry = false;   // compatible with nonnegative-valued kinetics
    bool mass_action = false; // passes the realizability condition
    bool full_domain = false; // computes on the function's whole domain
    bool bounded_time = false;// input-independent speed
};

// Lower bound on an input port's limit required by the module.
struct DomainReq {
    std::string port;
    double min_limit = 0.0;
    bool strict = false;
    std::string note; // shown in DomainViolation diagnostics
};

// Conserved quantity monitors; drift from the t=0 value measures how well a
// trajectory preserves the module's defining identity.
struct Monitor {
    enum class Kind {
        LnAMinusB, // ln a(t) - b(t)   (exponential: ln x - z)
        AMinusLnB, // a(t) - ln b(t)   (logarithms: x - ln z, x_n - ln y)
    };
    Kind kind;
    SpeciesId a, b;
    std::string label;
};

// A reusable computational block: local-named ODE fragment plus everything
// needed to place it into a circuit.  Input-port species are variables with
// empty rhs (catalytic); internal species carry the dynamics and init rules.
struct ModuleSpec {
    std::string kind;
    PolynomialODE ode;
    std::vector<Port> ports;
    std::vector<InitRule> init;
    std::vector<DomainReq> domain;
    RateGuarantee rate;
    ModuleFlags flags;
    std::vector<Monitor> monitors;

    const Port& port(const std::string& name) const;
    const Port& output() const; // the unique output port
};

// --- factories --------------------------------------------------------------
// All rate constants are 1.  Inputs are read catalytically and may vary in
// time inside a larger circuit.

ModuleSpec mk_identity();                       // Z' = A - Z
ModuleSpec mk_add();                            // Z' = A + B - Z
ModuleSpec mk_mul();                            // Z' = A*B - Z
ModuleSpec mk_reciprocal(double y0 = 1.0);      // Y' = Y(1 - A*Y)
ModuleSpec mk_mth_root(int m, double x0 = 1.0); // X' = X(A - X^m)
ModuleSpec mk_rectified_sub(double seed = 1e-6);// Z' = Z(A - B - Z)
ModuleSpec mk_abs_diff(double seed = 1e-6);
ModuleSpec mk_max(double seed = 1e-6);
ModuleSpec mk_exp_nonneg(double x0 = 1.0);      // Z' = A - Z, X' = X(A - Z)
ModuleSpec mk_exp_real();                       // e^(Ap - An), dual-rail input
ModuleSpec mk_log_system1(double z0 = 2.718281828459045);
ModuleSpec mk_log_system1r(double z0 = 2.718281828459045);
ModuleSpec mk_log_system2(double y0 = 1.0, double z0 = 2.718281828459045);
ModuleSpec mk_log_system3(double z0 = 2.718281828459045);
ModuleSpec mk_log_system4(double z0 = 1.0 + 1e-7, double y0 = 1.0 + 1e-7);
// mode: constant-e species pinned at e, or synthesized by the exponential
// module running on a unit input (the self-contained variant)
enum class ConstEMode { Static, Synthesized };
ModuleSpec mk_log_system5(ConstEMode e_mode = ConstEMode::Static);
ModuleSpec mk_log_system6(ConstEMode e_mode = ConstEMode::Static);
ModuleSpec mk_const_e(ConstEMode mode = ConstEMode::Static);
ModuleSpec mk_counterexample(double x0 = 0.0);  // X' = 1 - A*X, rate exactly a

// Catalog of every module under its canonical name; factories are invoked
// with default parameters.
const std::vector<std::string>& module_catalog();
ModuleSpec make_module(const std::string& name);

std::string to_string(const ModuleFlags& flags);

} // namespace crncalc

#endif
