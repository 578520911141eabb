#include "doctest.h"

#include <cmath>

#include "crncalc/analysis.hpp"
#include "crncalc/simulate.hpp"

using namespace crncalc;

namespace {

Trajectory synthetic(double u_star, double c0, double rho, double t_end, int n,
                     double rel_tol = 0.0) {
    Trajectory traj;
    traj.species = {"U"};
    traj.rel_tol = rel_tol;
    for (int i = 0; i <= n; ++i) {
        double t = t_end * i / n;
        traj.times.push_back(t);
        traj.states.push_back(u_star + c0 * std::exp(-rho * t));
        traj.step_error.push_back(0.0);
    }
    return traj;
}

const Port out = Port::output("out", "U");

} // namespace

TEST_CASE("fitter recovers synthetic decay rates to 1e-6") {
    for (double rho : {0.1, 1.0, 2.718281828459045, 10.0}) {
        CAPTURE(rho);
        Trajectory traj = synthetic(0.75, 1.25, rho, 30.0 / rho, 2000);
        RateEstimate est = estimate_rate(traj, out, 0.75);
        CHECK(std::abs(est.fitted_rate - rho) < 1e-6);
        CHECK(est.r_squared > 0.999999);
    }
}

TEST_CASE("fitting is scale equivariant") {
    Trajectory a = synthetic(0.0, 1.0, 2.0, 15.0, 1500);
    Trajectory b = synthetic(0.0, 1e6, 2.0, 15.0, 1500);
    double ra = estimate_rate(a, out, 0.0).fitted_rate;
    double rb = estimate_rate(b, out, 0.0).fitted_rate;
    CHECK(std::abs(ra - rb) < 1e-9);
}

TEST_CASE("samples at the integrator floor are excluded") {
    // decay that bottoms out at a noise floor of 1e-9
    Trajectory traj;
    traj.species = {"U"};
    traj.rel_tol = 1e-8; // floor = 10 * rel_tol * scale = 1e-7 * scale
    for (int i = 0; i <= 2000; ++i) {
        double t = 40.0 * i / 2000;
        traj.times.push_back(t);
        traj.states.push_back(1.0 + std::max(std::exp(-t), 1e-9));
        traj.step_error.push_back(0.0);
    }
    RateEstimate est = estimate_rate(traj, out, 1.0);
    CHECK(est.floor_hit);
    CHECK(est.fitted_rate == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(est.t_hi < 17.0); // ln(1e-7) ~ -16.1: everything past the floor is cut
}

TEST_CASE("failure modes of the fitter") {
    SUBCASE("error that never decays is NotConverged") {
        Trajectory traj = synthetic(0.0, 1.0, 1e-4, 10.0, 500);
        try {
            estimate_rate(traj, out, 0.0);
            FAIL("expected NotConverged");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotConverged);
        }
    }
    SUBCASE("output identically at the limit is degenerate") {
        Trajectory traj = synthetic(1.0, 0.0, 1.0, 10.0, 500);
        try {
            estimate_rate(traj, out, 1.0);
            FAIL("expected DegenerateFit");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateFit);
        }
    }
}

TEST_CASE("fitting real modules against known limits") {
    SUBCASE("exponential at a=5 converges at rate about 1") {
        CircuitInstance c = module_circuit(mk_exp_nonneg(), {{"a", Interval::point(5.0)}});
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", 5.0}}, cfg);
        RateEstimate est = estimate_rate(traj, c.output, std::exp(5.0));
        CHECK(est.fitted_rate == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("full-domain log at a=0.5 settles at -ln 2") {
        CircuitInstance c = module_circuit(mk_log_system6(), {{"a", Interval::point(0.5)}});
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", 0.5}}, cfg);
        CHECK(std::abs(estimate_limit(traj, c.output) + 0.6931471805599453) < 1e-8);
    }
}

TEST_CASE("estimate_limit") {
    SUBCASE("addition settles at 4") {
        CircuitInstance c = module_circuit(
            mk_add(), {{"a", Interval::point(1.5)}, {"b", Interval::point(2.5)}});
        IntegratorConfig cfg;
        Trajectory traj = simulate_circuit(c, {{"a", 1.5}, {"b", 2.5}}, cfg);
        CHECK(std::abs(estimate_limit(traj, c.output) - 4.0) < 1e-8);
    }
    SUBCASE("a constant species reports its value and conserves exactly") {
        PolynomialODE ode({"X", "Z"});
        IntegratorConfig cfg;
        cfg.t_end = 5.0;
        cfg.sample_count = 100;
        Trajectory traj = integrate(ode, std::vector<double>{2.0, 7.0}, cfg);
        CHECK(estimate_limit(traj, Port::output("out", "Z")) == 7.0);
        CHECK(check_conservation(traj, {Monitor::Kind::AMinusLnB, "X", "Z", "X - ln Z"}) ==
              0.0);
    }
    SUBCASE("a still-moving output is NotConverged") {
        Trajectory traj = synthetic(0.0, 1.0, 0.05, 10.0, 500);
        CHECK_THROWS_AS(estimate_limit(traj, out), Error);
    }
}

TEST_CASE("serial and parallel sweeps produce identical reports") {
    std::vector<SweepPoint> grid;
    IntegratorConfig cfg;
    for (double a : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        CircuitInstance c = module_circuit(mk_exp_nonneg(), {{"a", Interval::point(a)}});
        grid.push_back(sweep_point(c, "a", a, std::exp(a), cfg));
    }
    SweepReport serial = sweep_serial(grid, 0.9);
    SweepReport parallel = sweep_parallel(grid, 0.9);
    REQUIRE(serial.points.size() == parallel.points.size());
    for (size_t i = 0; i < serial.points.size(); ++i) {
        REQUIRE(serial.points[i].estimate.has_value());
        REQUIRE(parallel.points[i].estimate.has_value());
        // bitwise identical: each grid point is an independent deterministic run
        CHECK(serial.points[i].estimate->fitted_rate ==
              parallel.points[i].estimate->fitted_rate);
        CHECK(serial.points[i].estimate->r_squared ==
              parallel.points[i].estimate->r_squared);
    }
    CHECK(serial.min_rate == parallel.min_rate);
    CHECK(serial.input_independent == parallel.input_independent);
    CHECK(serial.input_independent); // the exponential really is input-independent
}

TEST_CASE("raising the threshold never turns a verdict true") {
    std::vector<SweepPoint> grid;
    IntegratorConfig cfg;
    cfg.t_end = 80.0;
    for (double a : {0.25, 1.0, 4.0}) {
        CircuitInstance c = module_circuit(mk_log_system1(), {{"a", Interval::point(a)}});
        grid.push_back(sweep_point(c, "a", a, std::log(a), cfg));
    }
    SweepReport report = sweep(grid, 0.9);
    bool prev = true;
    for (double thr : {0.05, 0.2, 0.9, 2.0}) {
        bool now = report.verdict_at(thr);
        CHECK((prev || !now)); // once false, stays false as thr rises
        prev = now;
    }
    CHECK_FALSE(report.input_independent); // System 1 is input-dependent
}

TEST_CASE("failed grid points are reported, not fatal") {
    std::vector<SweepPoint> grid;
    IntegratorConfig cfg;
    cfg.t_end = 4.0; // far too short for a = 0.1
    CircuitInstance c = module_circuit(mk_counterexample(), {{"a", Interval::point(0.1)}});
    grid.push_back(sweep_point(c, "a", 0.1, 10.0, cfg));
    SweepReport report = sweep(grid, 0.5);
    REQUIRE(report.points.size() == 1);
    CHECK_FALSE(report.points[0].estimate.has_value());
    CHECK(report.points[0].error.find("NotConverged") != std::string::npos);
    CHECK_FALSE(report.input_independent);
}

TEST_CASE("report and plot-data exports") {
    Trajectory traj = synthetic(1.0, 1.0, 1.0, 20.0, 200);
    std::string data = error_decay_data(traj, out, 1.0);
    CHECK(data.find("# t log10_abs_error") == 0);
    CHECK(data.find("\n0 0\n") != std::string::npos); // err(0)=1 -> log10 = 0

    std::vector<SweepPoint> grid;
    IntegratorConfig cfg;
    CircuitInstance c = module_circuit(mk_exp_nonneg(), {{"a", Interval::point(1.0)}});
    grid.push_back(sweep_point(c, "a", 1.0, std::exp(1.0), cfg));
    SweepReport report = sweep(grid, 0.9);
    std::string csv = sweep_csv(report);
    CHECK(csv.find("point,fitted_rate,r_squared,status") == 0);
    CHECK(csv.find("a=1,") != std::string::npos);
    CHECK(csv.find("verdict=input_independent") != std::string::npos);
}
