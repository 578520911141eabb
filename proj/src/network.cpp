#include "crncalc/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace crncalc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::NotRealizable: return "NotRealizable";
        case ErrorKind::NonUnitCoefficient: return "NonUnitCoefficient";
        case ErrorKind::InitViolation: return "InitViolation";
        case ErrorKind::CyclicInit: return "CyclicInit";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::OracleDisagreement: return "OracleDisagreement";
        case ErrorKind::Invalid: return "Invalid";
    }
    return "Unknown";
}

bool is_valid_species_name(const SpeciesId& name) {
    if (name.empty()) return false;
    // dot-separated nonempty segments of [A-Za-z0-9_]
    char prev = '.';
    for (char c : name) {
        if (c == '.') {
            if (prev == '.') return false;
        } else if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
            return false;
        }
        prev = c;
    }
    return prev != '.';
}

static void check_species_name(const SpeciesId& s) {
    if (!is_valid_species_name(s))
        throw Error(ErrorKind::Invalid, "bad species name '" + s + "'");
}

// --- Complex / Reaction / ReactionNetwork ----------------------------------

Complex::Complex(std::map<SpeciesId, int> coeffs) : coeffs_(std::move(coeffs)) {
    for (const auto& [s, c] : coeffs_) {
        check_species_name(s);
        if (c < 1 || c > kMaxStoichiometry)
            throw Error(ErrorKind::Invalid,
                        "stoichiometry of " + s + " is " + std::to_string(c) +
                            ", must be in [1, " + std::to_string(kMaxStoichiometry) + "]");
    }
}

void Complex::add(const SpeciesId& s, int count) {
    check_species_name(s);
    int next = coeffs_[s] + count;
    if (next < 1 || next > kMaxStoichiometry)
        throw Error(ErrorKind::Invalid,
                    "stoichiometry of " + s + " would become " + std::to_string(next));
    coeffs_[s] = next;
}

int Complex::count(const SpeciesId& s) const {
    auto it = coeffs_.find(s);
    return it == coeffs_.end() ? 0 : it->second;
}

Reaction::Reaction(Complex r, Complex p, double k)
    : reactant(std::move(r)), product(std::move(p)), rate_constant(k) {
    if (reactant == product)
        throw Error(ErrorKind::Invalid, "reaction has identical sides");
    if (!(rate_constant > 0.0))
        throw Error(ErrorKind::Invalid, "rate constant must be positive");
}

ReactionNetwork::ReactionNetwork(std::vector<SpeciesId> species,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
    std::map<SpeciesId, int> seen;
    for (const auto& s : species_) {
        check_species_name(s);
        if (++seen[s] > 1)
            throw Error(ErrorKind::Invalid, "duplicate species " + s);
    }
    auto declared = [&](const Complex& c) {
        for (const auto& [s, n] : c.coefficients())
            if (!seen.count(s))
                throw Error(ErrorKind::Invalid, "undeclared species " + s);
    };
    for (const auto& r : reactions_) {
        declared(r.reactant);
        declared(r.product);
    }
}

bool ReactionNetwork::has_species(const SpeciesId& s) const {
    return std::find(species_.begin(), species_.end(), s) != species_.end();
}

// --- Monomial / PolynomialODE ----------------------------------------------

Monomial::Monomial(double c, std::vector<std::pair<uint32_t, uint32_t>> p)
    : coeff(c), powers(std::move(p)) {
    std::sort(powers.begin(), powers.end());
    for (size_t i = 0; i + 1 < powers.size(); ++i)
        if (powers[i].first == powers[i + 1].first)
            throw Error(ErrorKind::Invalid, "monomial repeats a variable");
    for (const auto& [v, e] : powers)
        if (e == 0) throw Error(ErrorKind::Invalid, "monomial has zero exponent");
    if (coeff == 0.0) throw Error(ErrorKind::Invalid, "monomial has zero coefficient");
}

uint32_t Monomial::exponent_of(uint32_t var) const {
    for (const auto& [v, e] : powers)
        if (v == var) return e;
    return 0;
}

static bool monomial_order(const Monomial& a, const Monomial& b) {
    return a.powers < b.powers;
}

PolynomialODE::PolynomialODE(std::vector<SpeciesId> variables) {
    for (auto& v : variables) add_variable(v);
}

uint32_t PolynomialODE::index_of(const SpeciesId& s) const {
    auto idx = find(s);
    if (!idx) throw Error(ErrorKind::Invalid, "unknown variable " + s);
    return *idx;
}

std::optional<uint32_t> PolynomialODE::find(const SpeciesId& s) const {
    for (uint32_t i = 0; i < variables_.size(); ++i)
        if (variables_[i] == s) return i;
    return std::nullopt;
}

uint32_t PolynomialODE::add_variable(const SpeciesId& s) {
    check_species_name(s);
    if (find(s)) throw Error(ErrorKind::Invalid, "duplicate variable " + s);
    variables_.push_back(s);
    rhs_.emplace_back();
    return static_cast<uint32_t>(variables_.size() - 1);
}

void PolynomialODE::add_term(uint32_t var, double coeff,
                             std::vector<std::pair<uint32_t, uint32_t>> powers) {
    if (var >= variables_.size())
        throw Error(ErrorKind::Invalid, "variable index out of range");
    if (coeff == 0.0) return;
    for (const auto& [v, e] : powers)
        if (v >= variables_.size())
            throw Error(ErrorKind::Invalid, "monomial variable out of range");
    rhs_[var].push_back(Monomial(coeff, std::move(powers)));
}

void PolynomialODE::add_term(const SpeciesId& var, double coeff,
                             const std::vector<std::pair<SpeciesId, uint32_t>>& powers) {
    std::vector<std::pair<uint32_t, uint32_t>> p;
    p.reserve(powers.size());
    for (const auto& [name, e] : powers) p.emplace_back(index_of(name), e);
    add_term(index_of(var), coeff, std::move(p));
}

void PolynomialODE::normalize() {
    for (auto& terms : rhs_) {
        std::sort(terms.begin(), terms.end(), monomial_order);
        std::vector<Monomial> merged;
        for (const auto& m : terms) {
            if (!merged.empty() && merged.back().same_powers(m))
                merged.back().coeff += m.coeff;
            else
                merged.push_back(m);
        }
        std::erase_if(merged, [](const Monomial& m) { return m.coeff == 0.0; });
        terms = std::move(merged);
    }
}

void PolynomialODE::eval(const double* state, double* deriv) const {
    for (size_t i = 0; i < rhs_.size(); ++i) {
        double acc = 0.0;
        for (const Monomial& m : rhs_[i]) {
            double term = m.coeff;
            for (const auto& [v, e] : m.powers) {
                double x = state[v];
                for (uint32_t k = 0; k < e; ++k) term *= x;
            }
            acc += term;
        }
        deriv[i] = acc;
    }
}

// --- derive_ode / realizability / network_from_ode -------------------------

PolynomialODE derive_ode(const ReactionNetwork& net) {
    PolynomialODE ode(net.species());
    for (const Reaction& r : net.reactions()) {
        std::vector<std::pair<uint32_t, uint32_t>> rate_powers;
        for (const auto& [s, n] : r.reactant.coefficients())
            rate_powers.emplace_back(ode.index_of(s), static_cast<uint32_t>(n));
        std::sort(rate_powers.begin(), rate_powers.end());

        for (const auto& s : net.species()) {
            int net_change = r.product.count(s) - r.reactant.count(s);
            if (net_change != 0)
                ode.add_term(ode.index_of(s), net_change * r.rate_constant, rate_powers);
        }
    }
    ode.normalize();
    return ode;
}

RealizabilityResult is_mass_action_realizable(const PolynomialODE& ode) {
    for (uint32_t i = 0; i < ode.size(); ++i) {
        for (const Monomial& m : ode.rhs_of(i)) {
            if (m.coeff < 0.0 && m.exponent_of(i) == 0)
                return {false, std::make_pair(ode.variables()[i], m)};
        }
    }
    return {true, std::nullopt};
}

ReactionNetwork network_from_ode(const PolynomialODE& ode) {
    auto check = is_mass_action_realizable(ode);
    if (!check.realizable) {
        const auto& [species, mono] = *check.witness;
        throw Error(ErrorKind::NotRealizable,
                    "term " + format_monomial(mono, ode.variables()) + " in d(" +
                        species + ")/dt lacks a factor of " + species);
    }
    std::vector<Reaction> reactions;
    for (uint32_t i = 0; i < ode.size(); ++i) {
        const SpeciesId& target = ode.variables()[i];
        for (const Monomial& m : ode.rhs_of(i)) {
            if (std::abs(m.coeff) != 1.0)
                throw Error(ErrorKind::NonUnitCoefficient,
                            "coefficient " + std::to_string(m.coeff) + " in d(" +
                                target + ")/dt is not +-1");
            Complex reactant;
            for (const auto& [v, e] : m.powers)
                reactant.add(ode.variables()[v], static_cast<int>(e));
            Complex product = reactant;
            std::map<SpeciesId, int> prod = product.coefficients();
            prod[target] += (m.coeff > 0 ? 1 : -1);
            if (prod[target] == 0) prod.erase(target);
            reactions.emplace_back(reactant, Complex(prod), 1.0);
        }
    }
    return ReactionNetwork(ode.variables(), std::move(reactions));
}

// --- text formats -----------------------------------------------------------

static std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

static std::string format_complex(const Complex& c, const std::vector<SpeciesId>& order) {
    if (c.empty()) return "0";
    std::string out;
    for (const auto& s : order) {
        int n = c.count(s);
        if (n == 0) continue;
        if (!out.empty()) out += " + ";
        if (n > 1) out += std::to_string(n);
        out += s;
    }
    return out;
}

std::string format_network(const ReactionNetwork& net) {
    std::string out;
    for (const Reaction& r : net.reactions()) {
        out += format_complex(r.reactant, net.species());
        out += " -> ";
        out += format_complex(r.product, net.species());
        out += " ; k=";
        out += format_double(r.rate_constant);
        out += "\n";
    }
    return out;
}

namespace {

struct LineParser {
    const std::string& line;
    size_t pos = 0;
    int lineno;

    LineParser(const std::string& l, int n) : line(l), lineno(n) {}

    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": " + what);
    }
    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }
    bool eat(const std::string& tok) {
        skip_ws();
        if (line.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    bool at_end() {
        skip_ws();
        return pos >= line.size();
    }

    Complex parse_complex(std::vector<SpeciesId>& species_order) {
        Complex c;
        skip_ws();
        if (pos < line.size() && line[pos] == '0' &&
            (pos + 1 >= line.size() || !std::isalnum(static_cast<unsigned char>(line[pos + 1])))) {
            ++pos;
            return c;  // inert complex
        }
        while (true) {
            skip_ws();
            int coeff = 1;
            size_t start = pos;
            while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
            if (pos > start) coeff = std::stoi(line.substr(start, pos - start));
            skip_ws();
            start = pos;
            while (pos < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[pos])) ||
                    line[pos] == '_' || line[pos] == '.'))
                ++pos;
            if (pos == start) fail("expected species name");
            SpeciesId name = line.substr(start, pos - start);
            if (!is_valid_species_name(name)) fail("bad species name '" + name + "'");
            c.add(name, coeff);
            if (std::find(species_order.begin(), species_order.end(), name) ==
                species_order.end())
                species_order.push_back(name);
            if (!eat("+")) break;
        }
        return c;
    }
};

} // namespace

ReactionNetwork parse_network(const std::string& text) {
    std::vector<SpeciesId> species;
    std::vector<Reaction> reactions;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();

        LineParser p(raw, lineno);
        Complex reactant = p.parse_complex(species);
        if (!p.eat("->")) p.fail("expected '->'");
        Complex product = p.parse_complex(species);
        double k = 1.0;
        if (p.eat(";")) {
            if (!p.eat("k") || !p.eat("=")) p.fail("expected 'k=' after ';'");
            p.skip_ws();
            size_t used = 0;
            try {
                k = std::stod(raw.substr(p.pos), &used);
            } catch (const std::exception&) {
                p.fail("bad rate constant");
            }
            p.pos += used;
        }
        if (!p.at_end()) p.fail("trailing text");
        reactions.emplace_back(std::move(reactant), std::move(product), k);
    }
    return ReactionNetwork(std::move(species), std::move(reactions));
}

std::string format_monomial(const Monomial& m, const std::vector<SpeciesId>& vars) {
    if (m.powers.empty()) return format_double(m.coeff);
    std::string out;
    if (m.coeff == -1.0) out = "-";
    else if (m.coeff != 1.0) out = format_double(m.coeff) + "*";
    for (size_t i = 0; i < m.powers.size(); ++i) {
        if (i) out += "*";
        out += vars[m.powers[i].first];
        if (m.powers[i].second > 1) out += "^" + std::to_string(m.powers[i].second);
    }
    return out;
}

std::string format_ode(const PolynomialODE& ode) {
    std::string out = "# species:";
    for (const auto& v : ode.variables()) out += " " + v;
    out += "\n";
    for (uint32_t i = 0; i < ode.size(); ++i) {
        out += ode.variables()[i] + "' =";
        const auto& terms = ode.rhs_of(i);
        if (terms.empty()) {
            out += " 0";
        } else {
            for (size_t j = 0; j < terms.size(); ++j) {
                Monomial m = terms[j];
                bool neg = m.coeff < 0;
                if (neg) m.coeff = -m.coeff;
                out += (j == 0) ? (neg ? " -" : " ") : (neg ? " - " : " + ");
                out += format_monomial(m, ode.variables());
            }
        }
        out += "\n";
    }
    return out;
}

} // namespace crncalc
