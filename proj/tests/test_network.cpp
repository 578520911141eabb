#include "doctest.h"

#include <random>
#include <set>

#include "crncalc/modules.hpp"
#include "crncalc/network.hpp"

using namespace crncalc;

TEST_CASE("complex stoichiometry is capped at 4") {
    Complex c;
    c.add("X", 2);
    c.add("X", 2);
    CHECK(c.count("X") == 4);
    CHECK_THROWS_AS(c.add("X"), Error);
    CHECK_THROWS_AS(Complex({{"Y", 5}}), Error);
    CHECK_THROWS_AS(Complex({{"Y", 0}}), Error);
    CHECK(Complex{}.empty());
}

TEST_CASE("reactions reject identical sides and bad rates") {
    Complex x({{"X", 1}});
    CHECK_THROWS_AS(Reaction(x, x), Error);
    CHECK_THROWS_AS(Reaction(x, Complex{}, 0.0), Error);
    CHECK_THROWS_AS(Reaction(x, Complex{}, -1.0), Error);
}

TEST_CASE("networks require declared, unique species") {
    CHECK_THROWS_AS(ReactionNetwork({"X", "X"}, {}), Error);
    CHECK_THROWS_AS(ReactionNetwork({"X"}, {Reaction(Complex({{"Y", 1}}), Complex{})}),
                    Error);
}

TEST_CASE("mass-action equations of the addition network") {
    Complex x({{"X", 1}}), y({{"Y", 1}}), z({{"Z", 1}});
    ReactionNetwork net({"X", "Y", "Z"},
                        {Reaction(x, Complex({{"X", 1}, {"Z", 1}})),
                         Reaction(y, Complex({{"Y", 1}, {"Z", 1}})),
                         Reaction(z, Complex{})});
    PolynomialODE ode = derive_ode(net);
    CHECK(ode.rhs_of(ode.index_of("X")).empty());
    CHECK(ode.rhs_of(ode.index_of("Y")).empty());
    CHECK(format_ode(ode) == "# species: X Y Z\n"
                             "X' = 0\n"
                             "Y' = 0\n"
                             "Z' = X + Y - Z\n");
}

TEST_CASE("empty network gives the zero field") {
    PolynomialODE ode = derive_ode(ReactionNetwork({"X", "Y"}, {}));
    CHECK(ode.rhs_of(0).empty());
    CHECK(ode.rhs_of(1).empty());
}

TEST_CASE("the four-reaction log network yields its published equations") {
    ReactionNetwork net = parse_network("A + Z + X -> A + 2Z + X\n"
                                        "2Z + X -> Z + X\n"
                                        "A + X -> A + 2X\n"
                                        "Z + X -> Z\n");
    PolynomialODE ode = derive_ode(net);
    CHECK(ode == mk_log_system3().ode);
}

TEST_CASE("realizability verdicts and witnesses") {
    SUBCASE("system 1 fails with the -z term in dX/dt") {
        auto res = is_mass_action_realizable(mk_log_system1().ode);
        REQUIRE_FALSE(res.realizable);
        REQUIRE(res.witness.has_value());
        CHECK(res.witness->first == "X");
        const Monomial& m = res.witness->second;
        CHECK(m.coeff == -1.0);
        CHECK(format_monomial(m, mk_log_system1().ode.variables()) == "-Z");
    }
    SUBCASE("system 3 passes") {
        CHECK(is_mass_action_realizable(mk_log_system3().ode).realizable);
    }
    SUBCASE("the zero field passes") {
        PolynomialODE zero({"X", "Y"});
        CHECK(is_mass_action_realizable(zero).realizable);
    }
}

TEST_CASE("network reconstruction") {
    SUBCASE("system 3 reconstructs its four published reactions") {
        ReactionNetwork net = network_from_ode(mk_log_system3().ode);
        CHECK(format_network(net) == "A + Z + X -> A + 2Z + X ; k=1\n"
                                     "2Z + X -> Z + X ; k=1\n"
                                     "A + X -> A + 2X ; k=1\n"
                                     "Z + X -> Z ; k=1\n");
    }
    SUBCASE("the addition field reconstructs three reactions") {
        PolynomialODE ode({"X", "Y", "Z"});
        ode.add_term("Z", 1.0, {{"X", 1u}});
        ode.add_term("Z", 1.0, {{"Y", 1u}});
        ode.add_term("Z", -1.0, {{"Z", 1u}});
        ode.normalize();
        CHECK(format_network(network_from_ode(ode)) == "X -> X + Z ; k=1\n"
                                                       "Y -> Y + Z ; k=1\n"
                                                       "Z -> 0 ; k=1\n");
    }
    SUBCASE("a negative term without the species factor is rejected") {
        PolynomialODE ode({"X", "Z"});
        ode.add_term("X", 1.0, {});
        ode.add_term("X", -1.0, {{"Z", 1u}});
        CHECK_THROWS_AS(network_from_ode(ode), Error);
        try {
            network_from_ode(ode);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotRealizable);
        }
    }
    SUBCASE("non-unit coefficients are rejected") {
        PolynomialODE ode({"X"});
        ode.add_term("X", 2.0, {});
        try {
            network_from_ode(ode);
            FAIL("expected NonUnitCoefficient");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonUnitCoefficient);
        }
    }
}

TEST_CASE("round trip over every mass-action library module") {
    for (const auto& name : module_catalog()) {
        ModuleSpec spec = make_module(name);
        if (!spec.flags.mass_action) continue;
        CAPTURE(name);
        ReactionNetwork net = network_from_ode(spec.ode);
        CHECK(derive_ode(net) == spec.ode);
        // reparsing keeps the same reactions (species order may shift to
        // first appearance); a second round is byte-stable
        ReactionNetwork back = parse_network(format_network(net));
        CHECK(back.reactions() == net.reactions());
        std::string t2 = format_network(back);
        CHECK(format_network(parse_network(t2)) == t2);
    }
}

TEST_CASE("mass-action dynamics of arbitrary networks pass the checker") {
    // the realizability condition is necessary for mass-action fields, so
    // derive_ode output must always satisfy it
    std::mt19937 rng(20260811);
    for (int trial = 0; trial < 300; ++trial) {
        CAPTURE(trial);
        int n = 2 + static_cast<int>(rng() % 4);
        std::vector<SpeciesId> species;
        for (int i = 0; i < n; ++i) species.push_back("S" + std::to_string(i));
        auto random_complex = [&] {
            Complex c;
            int picks = static_cast<int>(rng() % 3);
            for (int p = 0; p < picks; ++p) {
                const SpeciesId& s = species[rng() % n];
                if (c.count(s) < 2) c.add(s, 1 + static_cast<int>(rng() % 2));
            }
            return c;
        };
        std::vector<Reaction> reactions;
        int m = 1 + static_cast<int>(rng() % 6);
        for (int r = 0; r < m; ++r) {
            Complex lhs = random_complex(), rhs = random_complex();
            if (lhs == rhs) continue;
            reactions.emplace_back(lhs, rhs, (rng() % 4) ? 1.0 : 2.5);
        }
        PolynomialODE ode = derive_ode(ReactionNetwork(species, reactions));
        CHECK(is_mass_action_realizable(ode).realizable);
    }
}

TEST_CASE("random realizable unit fields round-trip through reconstruction") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        CAPTURE(trial);
        int n = 2 + static_cast<int>(rng() % 4);
        std::vector<SpeciesId> species;
        for (int i = 0; i < n; ++i) species.push_back("S" + std::to_string(i));
        PolynomialODE ode(species);
        for (uint32_t var = 0; var < static_cast<uint32_t>(n); ++var) {
            std::set<std::vector<std::pair<uint32_t, uint32_t>>> seen;
            int terms = static_cast<int>(rng() % 4);
            for (int t = 0; t < terms; ++t) {
                bool negative = rng() % 2;
                std::map<uint32_t, uint32_t> powers;
                if (negative) powers[var] = 1 + rng() % 2;
                int extra = static_cast<int>(rng() % 3);
                for (int p = 0; p < extra; ++p) {
                    uint32_t v = rng() % n;
                    powers[v] = std::min<uint32_t>(powers[v] + 1 + rng() % 2, 3);
                }
                std::vector<std::pair<uint32_t, uint32_t>> key(powers.begin(), powers.end());
                if (!seen.insert(key).second) continue; // keep monomials distinct
                ode.add_term(var, negative ? -1.0 : 1.0, key);
            }
        }
        ode.normalize();
        REQUIRE(is_mass_action_realizable(ode).realizable);
        CHECK(derive_ode(network_from_ode(ode)) == ode);
    }
}

TEST_CASE("network text parsing") {
    SUBCASE("comments, blanks and rate constants") {
        ReactionNetwork net = parse_network("# a comment\n"
                                            "\n"
                                            "A + X -> A ; k=1\n"
                                            "0 -> X\n");
        CHECK(net.species() == std::vector<SpeciesId>{"A", "X"});
        CHECK(net.reactions().size() == 2);
        CHECK(net.reactions()[1].reactant.empty());
    }
    SUBCASE("missing arrow is a syntax error") {
        CHECK_THROWS_AS(parse_network("A + X A\n"), Error);
    }
    SUBCASE("trailing junk is a syntax error") {
        CHECK_THROWS_AS(parse_network("A -> X what\n"), Error);
    }
    SUBCASE("namespaced species names survive") {
        ReactionNetwork net = parse_network("log6_0.Z1 -> 0\n");
        CHECK(net.species()[0] == "log6_0.Z1");
    }
}
