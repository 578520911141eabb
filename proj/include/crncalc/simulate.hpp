#ifndef CRNCALC_SIMULATE_HPP
#define CRNCALC_SIMULATE_HPP

#include <span>
#include <string>
#include <vector>

#include "crncalc/circuit.hpp"
#include "crncalc/network.hpp"

namespace crncalc {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_end = 40.0;
    double max_step = 1.0;
    int sample_count = 2000;   // uniform samples after t = 0
    bool enforce_nonneg = false; // reject steps leaving the nonnegative orthant

    void validate() const;
};

// Time-stamped concentration samples.  Row 0 is the initial state exactly;
// step_error[i] is the largest accepted local-error estimate (scaled by the
// tolerances, <= 1) seen while integrating up to times[i].
struct Trajectory {
    std::vector<SpeciesId> species;
    std::vector<double> times;
    std::vector<double> states; // row-major, times.size() x species.size()
    std::vector<double> step_error;
    double rel_tol = 0.0;
    double abs_tol = 0.0;

    size_t cols() const { return species.size(); }
    size_t rows() const { return times.size(); }
    double at(size_t row, size_t col) const { return states[row * cols() + col]; }
    std::span<const double> row(size_t i) const {
        return {states.data() + i * cols(), cols()};
    }
    size_t index_of(const SpeciesId& s) const;

    // value of a port at a sample: pos - neg for dual rails
    double value(const Port& port, size_t row) const;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with per-step error
// control; every requested sample time is hit exactly by clamping the step.
Trajectory integrate(const PolynomialODE& ode, std::span<const double> init,
                     const IntegratorConfig& cfg);

// High-accuracy reference run used to pin down expected values: rel_tol
// 1e-12 integrated twice (the second pass with halved max_step); the runs
// must agree to 1e-10 in relative terms at t_end or OracleDisagreement is
// thrown.
Trajectory oracle(const PolynomialODE& ode, std::span<const double> init, double t_end,
                  int sample_count = 2000);

// Resolves the circuit's initial state and integrates it; nonnegativity is
// enforced exactly when every module is mass-action and no driver was added.
Trajectory simulate_circuit(const CircuitInstance& c,
                            const std::map<std::string, double>& input_values,
                            const IntegratorConfig& cfg,
                            const std::map<SpeciesId, double>& overrides = {},
                            bool allow_init_violation = false);

// CSV with header "t,<species...>", 17 significant digits, round-trippable.
std::string to_csv(const Trajectory& traj);
Trajectory from_csv(const std::string& text);

} // namespace crncalc

#endif
