#ifndef CRNCALC_ANALYSIS_HPP
#define CRNCALC_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crncalc/circuit.hpp"
#include "crncalc/simulate.hpp"

namespace crncalc {

// Exponential decay fitted to |output(t) - limit| on a log scale.
struct RateEstimate {
    double fitted_rate = 0.0;
    double t_lo = 0.0, t_hi = 0.0; // fit window
    double r_squared = 0.0;
    double limit_used = 0.0;
    bool floor_hit = false; // window was cut at the numerical error floor
};

// Mean of the last decile of the (rail-resolved) output.  NotConverged if
// the tail still varies by more than 1e-8 relative to max(1, |mean|).
double estimate_limit(const Trajectory& traj, const Port& output);

// Least-squares slope of log|error| over the window where the error lies in
// [floor, 1e-2 * scale]; floor is max(1e-12, 10 * rel_tol) * scale, with
// scale = max(|limit|, peak error).  Samples below the floor are integrator
// noise and are excluded.
RateEstimate estimate_rate(const Trajectory& traj, const Port& output, double true_limit);

// Max over samples of |law(t) - law(0)|.
double check_conservation(const Trajectory& traj, const Monitor& law);

// One grid point of an input-independence sweep.
struct SweepPoint {
    std::string label;
    PolynomialODE ode;
    std::vector<double> init;
    Port output;
    double true_limit = 0.0;
    IntegratorConfig cfg;
};

struct SweepResult {
    std::string label;
    std::optional<RateEstimate> estimate;
    std::string error; // NotConverged etc., reported but not fatal
};

struct SweepReport {
    std::vector<SweepResult> points;
    double min_rate = 0.0;     // over successful fits
    double min_r_squared = 0.0;
    double threshold = 0.0;
    bool input_independent = false; // min_rate >= threshold and all r^2 >= 0.99

    bool verdict_at(double thr) const;
};

SweepPoint sweep_point(const CircuitInstance& c, const std::string& input_name,
                       double value, double true_limit, const IntegratorConfig& cfg);

// Serial reference implementation; one integration + fit per grid point.
SweepReport sweep_serial(const std::vector<SweepPoint>& grid, double threshold);
// Same result computed with the grid points distributed across OpenMP
// threads; falls back to the serial loop when built without OpenMP.
SweepReport sweep_parallel(const std::vector<SweepPoint>& grid, double threshold);
SweepReport sweep(const std::vector<SweepPoint>& grid, double threshold,
                  bool parallel = true);

// "label,fitted_rate,r_squared,verdict" lines for the report file.
std::string sweep_csv(const SweepReport& report);
// gnuplot-ready "t  log10|error|" pairs for one run.
std::string error_decay_data(const Trajectory& traj, const Port& output, double true_limit);

} // namespace crncalc

#endif
