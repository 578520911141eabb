#ifndef CRNCALC_NETWORK_HPP
#define CRNCALC_NETWORK_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crncalc/errors.hpp"

namespace crncalc {

// Species names are dot-separated paths ("log6_0.Z1"); the leading segments
// are the instance namespace added when a module is placed in a circuit.
using SpeciesId = std::string;

bool is_valid_species_name(const SpeciesId& name);

// One side of a reaction: species -> stoichiometric coefficient.
// Coefficients are 1..4; an absent species means 0; empty map is the
// inert complex (written "0").  The cap of 4 covers every construction in
// the library and turns runaway wiring bugs into immediate errors.
class Complex {
  public:
    static constexpr int kMaxStoichiometry = 4;

    Complex() = default;
    explicit Complex(std::map<SpeciesId, int> coeffs);

    void add(const SpeciesId& s, int count = 1);
    int count(const SpeciesId& s) const;
    bool empty() const { return coeffs_.empty(); }
    const std::map<SpeciesId, int>& coefficients() const { return coeffs_; }

    bool operator==(const Complex& o) const { return coeffs_ == o.coeffs_; }

  private:
    std::map<SpeciesId, int> coeffs_;
};

struct Reaction {
    Complex reactant;
    Complex product;
    double rate_constant = 1.0;

    Reaction() = default;
    Reaction(Complex r, Complex p, double k = 1.0);

    bool operator==(const Reaction& o) const {
        return reactant == o.reactant && product == o.product &&
               rate_constant == o.rate_constant;
    }
};

class ReactionNetwork {
  public:
    ReactionNetwork() = default;
    ReactionNetwork(std::vector<SpeciesId> species, std::vector<Reaction> reactions);

    const std::vector<SpeciesId>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }

    bool has_species(const SpeciesId& s) const;

  private:
    std::vector<SpeciesId> species_;
    std::vector<Reaction> reactions_;
};

// coeff * prod_i var^exp, variables addressed by index into the owning
// PolynomialODE's variable list.  powers sorted by variable index.
struct Monomial {
    double coeff = 0.0;
    std::vector<std::pair<uint32_t, uint32_t>> powers;

    Monomial() = default;
    Monomial(double c, std::vector<std::pair<uint32_t, uint32_t>> p);

    uint32_t exponent_of(uint32_t var) const;
    bool same_powers(const Monomial& o) const { return powers == o.powers; }
    bool operator==(const Monomial& o) const {
        return coeff == o.coeff && powers == o.powers;
    }
};

// Autonomous polynomial vector field x_i' = sum of monomials.  Superset of
// mass-action dynamics: also holds the non-realizable systems.
class PolynomialODE {
  public:
    PolynomialODE() = default;
    explicit PolynomialODE(std::vector<SpeciesId> variables);

    size_t size() const { return variables_.size(); }
    const std::vector<SpeciesId>& variables() const { return variables_; }
    const std::vector<std::vector<Monomial>>& rhs() const { return rhs_; }
    const std::vector<Monomial>& rhs_of(uint32_t var) const { return rhs_[var]; }

    uint32_t index_of(const SpeciesId& s) const;         // throws if unknown
    std::optional<uint32_t> find(const SpeciesId& s) const;
    uint32_t add_variable(const SpeciesId& s);           // throws on duplicate

    // Accumulates coeff * prod(powers) onto d(var)/dt; merged and
    // canonicalized lazily via normalize().
    void add_term(uint32_t var, double coeff,
                  std::vector<std::pair<uint32_t, uint32_t>> powers);
    void add_term(const SpeciesId& var, double coeff,
                  const std::vector<std::pair<SpeciesId, uint32_t>>& powers);

    // Merge like monomials, drop zero coefficients, sort deterministically.
    void normalize();

    void eval(const double* state, double* deriv) const;

    bool operator==(const PolynomialODE& o) const {
        return variables_ == o.variables_ && rhs_ == o.rhs_;
    }

  private:
    std::vector<SpeciesId> variables_;
    std::vector<std::vector<Monomial>> rhs_;
};

// --- operations -----------------------------------------------------------

// Mass-action differential equations of a network: every reaction fires at
// k * prod(reactant concentrations with multiplicity) and shifts each
// species by its net stoichiometry.
PolynomialODE derive_ode(const ReactionNetwork& net);

struct RealizabilityResult {
    bool realizable = false;
    // one offending (species, monomial) when not realizable
    std::optional<std::pair<SpeciesId, Monomial>> witness;
};

// Hars-Toth condition: realizable iff every negative monomial in x_i'
// contains a factor of x_i.
RealizabilityResult is_mass_action_realizable(const PolynomialODE& ode);

// Canonical inverse of derive_ode for +-1 coefficients: each monomial
// becomes one reaction (reactant = monomial powers, net change +-1 on the
// target species, everything else catalytic).
ReactionNetwork network_from_ode(const PolynomialODE& ode);

// --- plain-text formats ----------------------------------------------------

// One reaction per line, "A + 2Z -> A + Z ; k=1", "0" for the inert
// complex, "#" comments.  Species are declared implicitly in order of first
// appearance; the writer emits complexes in network species order.
std::string format_network(const ReactionNetwork& net);
ReactionNetwork parse_network(const std::string& text);

// Human-readable equation listing, "Z' = A*X*Z - X*Z^2".
std::string format_ode(const PolynomialODE& ode);

std::string format_monomial(const Monomial& m, const std::vector<SpeciesId>& vars);

} // namespace crncalc

#endif
