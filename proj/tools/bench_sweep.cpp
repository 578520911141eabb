// Times the input-independence sweep with the grid points run serially
// versus distributed across OpenMP threads.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crncalc/analysis.hpp"

using namespace crncalc;

namespace {

std::vector<SweepPoint> make_grid(int n) {
    std::vector<SweepPoint> points;
    IntegratorConfig cfg;
    cfg.t_end = 40.0;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    for (int i = 0; i < n; ++i) {
        // log-spaced inputs over [1.6, 100], clear of the max-module tie at
        // a = 1 where the seeded construction slows down
        double lo = std::log10(1.6);
        double a = std::pow(10.0, lo + (2.0 - lo) * i / (n - 1));
        CircuitInstance c = module_circuit(mk_log_system6(), {{"a", Interval::point(a)}});
        points.push_back(sweep_point(c, "a", a, std::log(a), cfg));
    }
    return points;
}

template <typename F>
double best_of(int reps, F&& run) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        run();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 24;
    int reps = argc > 2 ? std::atoi(argv[2]) : 3;
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; parallel path falls back to serial\n");
#endif
    std::printf("sweeping the full-domain log over %d grid points, best of %d\n\n", n,
                reps);

    std::vector<SweepPoint> grid = make_grid(n);
    SweepReport serial_report, parallel_report;

    double t_serial = best_of(reps, [&] { serial_report = sweep_serial(grid, 0.9); });
    double t_parallel = best_of(reps, [&] { parallel_report = sweep_parallel(grid, 0.9); });

    std::printf("%-10s %10s %14s %10s\n", "variant", "time [s]", "min rate", "verdict");
    std::printf("%-10s %10.3f %14.6f %10s\n", "serial", t_serial, serial_report.min_rate,
                serial_report.input_independent ? "indep" : "dep");
    std::printf("%-10s %10.3f %14.6f %10s\n", "parallel", t_parallel,
                parallel_report.min_rate,
                parallel_report.input_independent ? "indep" : "dep");
    std::printf("\nspeedup: %.2fx\n", t_serial / t_parallel);

    bool same = serial_report.min_rate == parallel_report.min_rate &&
                serial_report.input_independent == parallel_report.input_independent;
    std::printf("reports identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
