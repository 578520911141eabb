#include "doctest.h"

#include <cmath>
#include <set>

#include "crncalc/compiler.hpp"
#include "crncalc/simulate.hpp"

using namespace crncalc;

namespace {

std::map<std::string, InputDecl> decls(std::initializer_list<const char*> texts) {
    std::map<std::string, InputDecl> out;
    for (const char* t : texts) {
        InputDecl d = parse_input_decl(t);
        out[d.name] = d;
    }
    return out;
}

std::set<std::string> roster_kinds(const CircuitInstance& c) {
    std::set<std::string> kinds;
    for (const auto& m : c.roster) kinds.insert(m.kind);
    return kinds;
}

} // namespace

TEST_CASE("expression grammar") {
    CHECK(to_string(*parse("exp(a) * ln(b)")) == "(exp(a) * ln(b))");
    CHECK(to_string(*parse("a")) == "a");
    CHECK(to_string(*parse("root(x, 3) + max(y, 2.5)")) ==
          "(root(x, 3) + max(y, 2.5))");
    CHECK(to_string(*parse("a-b*c")) == "(a - (b * c))"); // precedence
    CHECK(to_string(*parse("(a-b)*c")) == "((a - b) * c)");
    CHECK(to_string(*parse("-a + b")) == "((-a) + b)");
    CHECK(to_string(*parse("absdiff(a, b) / c")) == "(absdiff(a, b) / c)");
}

TEST_CASE("syntax errors carry a byte offset and expectation") {
    auto check_throw = [](const char* text, const char* needle) {
        try {
            parse(text);
            FAIL_CHECK("expected SyntaxError for: " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Syntax);
            CHECK(std::string(e.what()).find("at byte") != std::string::npos);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    check_throw("exp(", "a number");
    check_throw("a +", "a number");
    check_throw("(a", "')'");
    check_throw("a b", "end of input");
    check_throw("foo(a)", "known function");
    check_throw("root(a, b)", "integer root index");
    check_throw("max(a)", "2 argument");
    check_throw("ln", "'(' after function name");
}

TEST_CASE("input declarations") {
    InputDecl a = parse_input_decl("a:real");
    CHECK(a.real);
    CHECK(std::isinf(a.range.lo));
    InputDecl b = parse_input_decl("b:nonneg(0.1,100)");
    CHECK_FALSE(b.real);
    CHECK(b.range.lo == 0.1);
    CHECK(b.range.hi == 100.0);
    CHECK_THROWS_AS(parse_input_decl("x"), Error);
    CHECK_THROWS_AS(parse_input_decl("x:banana"), Error);
    CHECK_THROWS_AS(parse_input_decl("x:nonneg(-1,2)"), Error);
    CHECK_THROWS_AS(parse_input_decl("x:nonneg(3,2)"), Error);
    CHECK_THROWS_AS(parse_input_decl("e:real"), Error); // reserved
}

TEST_CASE("sign inference") {
    auto d = decls({"a:real", "b:nonneg(0.5,10)"});
    SUBCASE("exp of a real value is nonnegative") {
        ExprPtr e = parse("exp(a)");
        infer_signs(*e, d);
        CHECK(e->sign == SignTag::NonNeg);
    }
    SUBCASE("ln of a positive input is real-signed") {
        ExprPtr e = parse("ln(b)");
        infer_signs(*e, d);
        CHECK(e->sign == SignTag::Real);
        CHECK(e->range.lo == doctest::Approx(std::log(0.5)));
    }
    SUBCASE("difference of nonnegatives is real-signed") {
        ExprPtr e = parse("b - b");
        infer_signs(*e, d);
        CHECK(e->sign == SignTag::Real);
    }
    SUBCASE("undeclared variables are rejected") {
        ExprPtr e = parse("q + 1");
        CHECK_THROWS_AS(infer_signs(*e, d), Error);
    }
    SUBCASE("ln needs a declarably positive argument") {
        ExprPtr e = parse("ln(a)");
        CHECK_THROWS_AS(infer_signs(*e, d), Error);
        auto wide = decls({"c:nonneg"});
        ExprPtr f = parse("ln(c)"); // lower bound 0 is not positive
        CHECK_THROWS_AS(infer_signs(*f, wide), Error);
    }
    SUBCASE("division needs a positive divisor") {
        ExprPtr e = parse("b / a");
        CHECK_THROWS_AS(infer_signs(*e, d), Error);
    }
    SUBCASE("max of a real value is rejected") {
        ExprPtr e = parse("max(a, b)");
        CHECK_THROWS_AS(infer_signs(*e, d), Error);
    }
}

TEST_CASE("compiling the exp-times-log composite") {
    auto d = decls({"a:real(-5,5)", "b:nonneg(0.1,100)"});
    CircuitInstance c = compile("exp(a)*ln(b)", d);
    auto kinds = roster_kinds(c);
    CHECK(kinds.count("exp_real"));
    CHECK(kinds.count("log_system6"));
    CHECK(kinds.count("mul"));
    CHECK(c.mass_action);
    CHECK(is_mass_action_realizable(c.ode).realizable);
    CHECK(c.predicted.text == "min{rho_in, 1}");
    CHECK(c.output.dual);
    CHECK(c.inputs.size() == 2);
    CHECK(c.input("a").real);
    CHECK_FALSE(c.input("b").real);
}

TEST_CASE("a bare variable compiles to one identity module") {
    CircuitInstance c = compile("a", decls({"a:nonneg"}));
    REQUIRE(c.roster.size() == 1);
    CHECK(c.roster[0].kind == "identity");
}

TEST_CASE("log-system selection respects module domains") {
    SUBCASE("system 3 rejects inputs that may fall below 1") {
        try {
            CompileOptions opts;
            opts.log_system = 3;
            compile("ln(a)", decls({"a:nonneg(0.5,2)"}), opts);
            FAIL("expected DomainError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Domain);
        }
    }
    SUBCASE("auto picks system 5 for provably >= 1 inputs") {
        CircuitInstance c = compile("ln(a)", decls({"a:nonneg(1,100)"}));
        CHECK(roster_kinds(c).count("log_system5"));
    }
    SUBCASE("auto picks system 6 otherwise") {
        CircuitInstance c = compile("ln(a)", decls({"a:nonneg(0.1,100)"}));
        CHECK(roster_kinds(c).count("log_system6"));
    }
    SUBCASE("ln(a+b) wires the adder into the log from t=0") {
        CircuitInstance c = compile("ln(a+b)", decls({"a:nonneg(1,5)", "b:nonneg(1,5)"}));
        CHECK(roster_kinds(c).count("add"));
        CHECK(roster_kinds(c).count("log_system5")); // a+b >= 2 provably
    }
    SUBCASE("non-mass-action systems flip the circuit flag") {
        CompileOptions opts;
        opts.log_system = 1;
        CircuitInstance c = compile("ln(a)", decls({"a:nonneg(0.5,2)"}), opts);
        CHECK_FALSE(c.mass_action);
        CHECK_FALSE(is_mass_action_realizable(c.ode).realizable);
    }
    SUBCASE("ln of a dual-rail value is rejected") {
        CHECK_THROWS_AS(compile("ln(a-1)", decls({"a:nonneg(2,5)"})), Error);
    }
}

TEST_CASE("division lowers to reciprocal and multiply") {
    CircuitInstance c = compile("a/b", decls({"a:nonneg", "b:nonneg(0.5,10)"}));
    auto kinds = roster_kinds(c);
    CHECK(kinds.count("reciprocal"));
    CHECK(kinds.count("mul"));
}

TEST_CASE("subtraction is rail algebra, not a module") {
    CircuitInstance c = compile("a-b", decls({"a:nonneg", "b:nonneg"}));
    CHECK(c.roster.empty());
    CHECK(c.output.dual);
    CHECK(c.output.pos == "a");
    CHECK(c.output.neg == "b");
}

TEST_CASE("resolved initial states") {
    SUBCASE("the exponential starts at x=1, z=0") {
        CircuitInstance c = module_circuit(mk_exp_nonneg(), {{"a", Interval::point(1.0)}});
        std::vector<double> init = resolve_init(c, {{"a", 1.0}});
        CHECK(init[c.ode.index_of("X")] == 1.0);
        CHECK(init[c.ode.index_of("Z")] == 0.0);
    }
    SUBCASE("system 4n inits follow ln: y=e gives x_n=1") {
        constexpr double kE = 2.718281828459045;
        CircuitInstance c =
            module_circuit(mk_log_system4(kE, kE), {{"a", Interval::point(2.0)}});
        std::vector<double> init = resolve_init(c, {{"a", 2.0}});
        CHECK(init[c.ode.index_of("Y")] == kE);
        CHECK(init[c.ode.index_of("XN")] == 1.0);
        CHECK(init[c.ode.index_of("XP")] == 1.0);
    }
    SUBCASE("every species of a compiled circuit is initialized") {
        auto d = decls({"a:real(-5,5)", "b:nonneg(0.1,100)"});
        CircuitInstance c = compile("exp(a)*ln(b)", d);
        std::vector<double> init = resolve_init(c, {{"a", -1.0}, {"b", 2.0}});
        CHECK(init.size() == c.ode.size());
        for (double v : init) CHECK(std::isfinite(v));
        // conservation laws hold at t = 0 by construction
        for (const Monitor& m : c.monitors) {
            double a = init[c.ode.index_of(m.a)], b = init[c.ode.index_of(m.b)];
            double q = m.kind == Monitor::Kind::LnAMinusB ? std::log(a) - b
                                                          : a - std::log(b);
            CHECK(std::abs(q) < 1e-15);
        }
    }
    SUBCASE("out-of-range input values are rejected") {
        CircuitInstance c = compile("ln(a)", decls({"a:nonneg(0.5,2)"}));
        CHECK_THROWS_AS(resolve_init(c, {{"a", 3.0}}), Error);
        CHECK_THROWS_AS(resolve_init(c, {}), Error);
    }
    SUBCASE("a derived-log cycle is reported") {
        CircuitInstance c;
        c.ode.add_variable("X");
        c.ode.add_variable("Y");
        c.init.push_back({"X", InitRule::Kind::DerivedLog, 0.0, "Y"});
        c.init.push_back({"Y", InitRule::Kind::DerivedLog, 0.0, "X"});
        try {
            resolve_init(c, {});
            FAIL("expected CyclicInit");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CyclicInit);
        }
    }
}

TEST_CASE("compilation is deterministic") {
    auto d = decls({"a:real(-5,5)", "b:nonneg(0.1,100)"});
    CircuitInstance c1 = compile("exp(a)*ln(b)", d);
    CircuitInstance c2 = compile("exp(a)*ln(b)", d);
    CHECK(c1.ode == c2.ode);
    CHECK(format_metadata(c1) == format_metadata(c2));
}

TEST_CASE("no species is written by two modules") {
    CircuitBuilder builder;
    builder.add_input_species("A");
    Value in = Value::single("A", Interval::nonneg());
    builder.instantiate(mk_identity(), "same", {{"a", in}});
    CHECK_THROWS_AS(builder.instantiate(mk_identity(), "same", {{"a", in}}), Error);
}

TEST_CASE("adding modules never raises the predicted rate") {
    auto d = decls({"a:nonneg(0.04,1)", "b:nonneg(0.1,100)"});
    CircuitInstance small = compile("root(a,2)", d);
    CircuitInstance big = compile("exp(root(a,2))*ln(b)", d);
    double rate_small = small.predicted.evaluate(Interval::kInf, {});
    double rate_big = big.predicted.evaluate(Interval::kInf, {});
    CHECK(rate_small == doctest::Approx(0.08)); // 2 * 0.04
    CHECK(rate_big <= rate_small);
}

namespace {

// name-keyed comparison; reparse may renumber variables by first appearance
bool same_field(const PolynomialODE& a, const PolynomialODE& b) {
    if (std::set<std::string>(a.variables().begin(), a.variables().end()) !=
        std::set<std::string>(b.variables().begin(), b.variables().end()))
        return false;
    auto named_terms = [](const PolynomialODE& ode, const SpeciesId& var) {
        std::multiset<std::pair<double, std::map<SpeciesId, uint32_t>>> terms;
        for (const Monomial& m : ode.rhs_of(ode.index_of(var))) {
            std::map<SpeciesId, uint32_t> powers;
            for (const auto& [v, e] : m.powers) powers[ode.variables()[v]] = e;
            terms.insert({m.coeff, std::move(powers)});
        }
        return terms;
    };
    for (const auto& var : a.variables())
        if (named_terms(a, var) != named_terms(b, var)) return false;
    return true;
}

} // namespace

TEST_CASE("export and reparse reproduces the flattened ODE") {
    auto d = decls({"a:real(-2,2)", "b:nonneg(0.1,100)"});
    CircuitInstance c = compile("exp(a)*ln(b)", d);
    ReactionNetwork net = network_from_ode(c.ode);
    CHECK(derive_ode(net) == c.ode); // reconstruction keeps variable order
    ReactionNetwork reparsed = parse_network(format_network(net));
    CHECK(same_field(derive_ode(reparsed), c.ode));
}

TEST_CASE("compiled circuits simulate to the right values") {
    SUBCASE("negated literal rides the negative rail") {
        CircuitInstance c = compile("a - 1.5", decls({"a:nonneg"}));
        IntegratorConfig cfg;
        cfg.t_end = 20.0;
        Trajectory traj = simulate_circuit(c, {{"a", 4.0}}, cfg);
        CHECK(traj.value(c.output, traj.rows() - 1) == doctest::Approx(2.5).epsilon(1e-9));
    }
    SUBCASE("division") {
        CircuitInstance c = compile("a/b", decls({"a:nonneg", "b:nonneg(0.5,10)"}));
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", 3.0}, {"b", 4.0}}, cfg);
        CHECK(traj.value(c.output, traj.rows() - 1) == doctest::Approx(0.75).epsilon(1e-8));
    }
    SUBCASE("real inputs split onto rails") {
        CircuitInstance c = compile("exp(a)", decls({"a:real(-5,5)"}));
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", -2.0}}, cfg);
        CHECK(traj.value(c.output, traj.rows() - 1) ==
              doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
    }
    SUBCASE("ln(exp(a)) recovers a through two composed stages") {
        CircuitInstance c = compile("ln(exp(a))", decls({"a:real(-2,2)"}));
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", -1.0}}, cfg);
        CHECK(std::abs(traj.value(c.output, traj.rows() - 1) + 1.0) < 1e-6);
    }
    SUBCASE("roots, max, and literals combine") {
        CircuitInstance c =
            compile("root(x, 3) + max(y, 2.5)", decls({"x:nonneg(1,27)", "y:nonneg"}));
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"x", 8.0}, {"y", 1.0}}, cfg);
        CHECK(traj.value(c.output, traj.rows() - 1) == doctest::Approx(4.5).epsilon(1e-7));
    }
}
