#include "crncalc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace crncalc {

double estimate_limit(const Trajectory& traj, const Port& output) {
    const size_t n = traj.rows();
    if (n < 10) throw Error(ErrorKind::NotConverged, "trajectory too short");
    size_t start = n - n / 10;
    double sum = 0.0, lo = Interval::kInf, hi = -Interval::kInf;
    for (size_t i = start; i < n; ++i) {
        double v = traj.value(output, i);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double mean = sum / (n - start);
    if (hi - lo > 1e-8 * std::max(1.0, std::abs(mean)))
        throw Error(ErrorKind::NotConverged,
                    "output still varies by " + std::to_string(hi - lo) +
                        " over the last decile");
    return mean;
}

RateEstimate estimate_rate(const Trajectory& traj, const Port& output,
                           double true_limit) {
    const size_t n = traj.rows();
    std::vector<double> err(n);
    double peak = 0.0;
    for (size_t i = 0; i < n; ++i) {
        err[i] = std::abs(traj.value(output, i) - true_limit);
        peak = std::max(peak, err[i]);
    }
    double scale = std::max(std::abs(true_limit), peak);
    if (scale == 0.0)
        throw Error(ErrorKind::DegenerateFit, "output identically at the limit");
    if (*std::min_element(err.begin(), err.end()) > 1e-3 * scale)
        throw Error(ErrorKind::NotConverged,
                    "error never decayed below 1e-3 of scale; extend t_end");

    double floor = std::max(1e-12, 10.0 * traj.rel_tol) * scale;
    double ceiling = 1e-2 * scale;

    // entry into the window after the error peak (transients may first move
    // away from the limit), then cut at the first floored sample
    size_t peak_idx = 0;
    for (size_t i = 1; i < n; ++i)
        if (err[i] > err[peak_idx]) peak_idx = i;
    size_t begin = n;
    for (size_t i = peak_idx; i < n; ++i)
        if (err[i] <= ceiling) { begin = i; break; }
    bool floor_hit = false;
    size_t end = n;
    for (size_t i = begin; i < n; ++i)
        if (err[i] < floor) { end = i; floor_hit = true; break; }

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    size_t count = 0;
    for (size_t i = begin; i < end; ++i) {
        if (err[i] <= 0.0 || err[i] > ceiling) continue;
        double x = traj.times[i], y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        ++count;
    }
    if (count < 10)
        throw Error(ErrorKind::DegenerateFit,
                    "only " + std::to_string(count) + " samples in the fit window");

    double det = count * sxx - sx * sx;
    if (det == 0.0) throw Error(ErrorKind::DegenerateFit, "degenerate time axis");
    double slope = (count * sxy - sx * sy) / det;
    double ss_tot = syy - sy * sy / count;
    double ss_res = 0.0;
    {
        double intercept = (sy - slope * sx) / count;
        for (size_t i = begin; i < end; ++i) {
            if (err[i] <= 0.0 || err[i] > ceiling) continue;
            double r = std::log(err[i]) - (intercept + slope * traj.times[i]);
            ss_res += r * r;
        }
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    if (r2 < 0.9)
        throw Error(ErrorKind::DegenerateFit,
                    "log-error fit r^2 = " + std::to_string(r2) + " < 0.9");

    RateEstimate est;
    est.fitted_rate = -slope;
    est.t_lo = traj.times[begin];
    est.t_hi = traj.times[end - 1];
    est.r_squared = r2;
    est.limit_used = true_limit;
    est.floor_hit = floor_hit;
    return est;
}

double check_conservation(const Trajectory& traj, const Monitor& law) {
    size_t ia = traj.index_of(law.a), ib = traj.index_of(law.b);
    auto value = [&](size_t row) {
        double a = traj.at(row, ia), b = traj.at(row, ib);
        switch (law.kind) {
            case Monitor::Kind::LnAMinusB: return std::log(a) - b;
            case Monitor::Kind::AMinusLnB: return a - std::log(b);
        }
        return 0.0;
    };
    double q0 = value(0), drift = 0.0;
    for (size_t i = 1; i < traj.rows(); ++i)
        drift = std::max(drift, std::abs(value(i) - q0));
    return drift;
}

SweepPoint sweep_point(const CircuitInstance& c, const std::string& input_name,
                       double value, double true_limit, const IntegratorConfig& cfg) {
    SweepPoint p;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.6g", input_name.c_str(), value);
    p.label = buf;
    p.ode = c.ode;
    p.init = resolve_init(c, {{input_name, value}});
    p.output = c.output;
    p.true_limit = true_limit;
    p.cfg = cfg;
    p.cfg.enforce_nonneg = c.mass_action && c.driver_init.empty();
    return p;
}

namespace {

SweepResult run_point(const SweepPoint& p) {
    SweepResult r;
    r.label = p.label;
    try {
        Trajectory traj = integrate(p.ode, p.init, p.cfg);
        r.estimate = estimate_rate(traj, p.output, p.true_limit);
    } catch (const Error& e) {
        r.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return r;
}

SweepReport assemble(std::vector<SweepResult> results, double threshold) {
    SweepReport report;
    report.points = std::move(results);
    report.threshold = threshold;
    report.min_rate = Interval::kInf;
    report.min_r_squared = 1.0;
    bool any = false, all_ok = true;
    for (const auto& r : report.points) {
        if (!r.estimate) { all_ok = false; continue; }
        any = true;
        report.min_rate = std::min(report.min_rate, r.estimate->fitted_rate);
        report.min_r_squared = std::min(report.min_r_squared, r.estimate->r_squared);
    }
    if (!any) { report.min_rate = 0.0; report.min_r_squared = 0.0; }
    report.input_independent = all_ok && report.verdict_at(threshold);
    return report;
}

} // namespace

bool SweepReport::verdict_at(double thr) const {
    for (const auto& r : points)
        if (!r.estimate) return false;
    return min_rate >= thr && min_r_squared >= 0.99;
}

SweepReport sweep_serial(const std::vector<SweepPoint>& grid, double threshold) {
    std::vector<SweepResult> results(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) results[i] = run_point(grid[i]);
    return assemble(std::move(results), threshold);
}

SweepReport sweep_parallel(const std::vector<SweepPoint>& grid, double threshold) {
    std::vector<SweepResult> results(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(grid.size()); ++i)
        results[i] = run_point(grid[i]);
    return assemble(std::move(results), threshold);
}

SweepReport sweep(const std::vector<SweepPoint>& grid, double threshold, bool parallel) {
    return parallel ? sweep_parallel(grid, threshold) : sweep_serial(grid, threshold);
}

std::string sweep_csv(const SweepReport& report) {
    std::string out = "point,fitted_rate,r_squared,status\n";
    char buf[128];
    for (const auto& r : report.points) {
        if (r.estimate) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,ok\n", r.label.c_str(),
                          r.estimate->fitted_rate, r.estimate->r_squared);
            out += buf;
        } else {
            std::string note = r.error;
            for (char& c : note)
                if (c == ',' || c == '\n') c = ';';
            out += r.label + ",,," + note + "\n";
        }
    }
    std::snprintf(buf, sizeof buf, "min_rate,%.17g,,verdict=%s\n", report.min_rate,
                  report.input_independent ? "input_independent" : "input_dependent");
    out += buf;
    return out;
}

std::string error_decay_data(const Trajectory& traj, const Port& output,
                             double true_limit) {
    std::string out = "# t log10_abs_error\n";
    char buf[80];
    for (size_t i = 0; i < traj.rows(); ++i) {
        double err = std::abs(traj.value(output, i) - true_limit);
        if (err <= 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", traj.times[i], std::log10(err));
        out += buf;
    }
    return out;
}

} // namespace crncalc
