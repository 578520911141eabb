#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crncalc/compiler.hpp"
#include "crncalc/modules.hpp"
#include "crncalc/network.hpp"

using namespace crncalc;

namespace {

std::string read_file(const std::string& name) {
    const char* dir = std::getenv("GOLDEN_DIR");
    std::string path = (dir ? std::string(dir) : std::string("tests/golden")) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

TEST_CASE("golden: System 3 reaction listing is bit-exact") {
    ReactionNetwork net = network_from_ode(mk_log_system3().ode);
    CHECK(format_network(net) == read_file("log_system3.crn"));
}

TEST_CASE("golden: exponential module reaction listing") {
    ReactionNetwork net = network_from_ode(mk_exp_nonneg().ode);
    CHECK(format_network(net) == read_file("exp_nonneg.crn"));
}

TEST_CASE("golden: exponential module equations") {
    CHECK(format_ode(mk_exp_nonneg().ode) == read_file("exp_nonneg.ode"));
}

TEST_CASE("golden: module metadata sidecar") {
    CHECK(format_metadata(mk_log_system3()) == read_file("log_system3.meta"));
}

TEST_CASE("monomial formatting") {
    PolynomialODE ode({"A", "X"});
    CHECK(format_monomial(Monomial(1.0, {{0, 1}, {1, 2}}), ode.variables()) == "A*X^2");
    CHECK(format_monomial(Monomial(-1.0, {{1, 1}}), ode.variables()) == "-X");
    CHECK(format_monomial(Monomial(2.5, {{0, 1}}), ode.variables()) == "2.5*A");
    CHECK(format_monomial(Monomial(3.0, {}), ode.variables()) == "3");
}

TEST_CASE("network format accepts what it emits, for every module") {
    for (const auto& name : module_catalog()) {
        ModuleSpec spec = make_module(name);
        if (!spec.flags.mass_action) continue;
        CAPTURE(name);
        ReactionNetwork net = network_from_ode(spec.ode);
        CHECK(parse_network(format_network(net)).reactions() == net.reactions());
    }
}

TEST_CASE("circuit metadata names every roster entry and init rule") {
    std::map<std::string, InputDecl> decls;
    InputDecl a = parse_input_decl("a:nonneg(1,10)");
    decls[a.name] = a;
    CircuitInstance c = compile("ln(a)", decls);
    std::string meta = format_metadata(c);
    CHECK(meta.find("expression = ln(a)") != std::string::npos);
    CHECK(meta.find("module.0.kind = log_system5") != std::string::npos);
    CHECK(meta.find("predicted_rate = ") != std::string::npos);
    CHECK(meta.find("input.a.kind = nonneg") != std::string::npos);
    CHECK(meta.find("init.log_system5_0.Z = fixed 2.71828182845904") !=
          std::string::npos);
    CHECK(meta.find("derived_log log_system5_0.Z") != std::string::npos);
}
