#include "crncalc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace crncalc {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw Error(ErrorKind::Invalid, "tolerances must be positive");
    if (!(t_end > 0.0)) throw Error(ErrorKind::Invalid, "t_end must be positive");
    if (!(max_step > 0.0)) throw Error(ErrorKind::Invalid, "max_step must be positive");
    if (sample_count < 1) throw Error(ErrorKind::Invalid, "need at least one sample");
}

size_t Trajectory::index_of(const SpeciesId& s) const {
    for (size_t i = 0; i < species.size(); ++i)
        if (species[i] == s) return i;
    throw Error(ErrorKind::Invalid, "trajectory has no species " + s);
}

double Trajectory::value(const Port& port, size_t row) const {
    double v = at(row, index_of(port.pos));
    if (port.dual) v -= at(row, index_of(port.neg));
    return v;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b^ (5th order minus embedded 4th order)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
  public:
    Stepper(const PolynomialODE& ode, std::span<const double> init,
            const IntegratorConfig& cfg)
        : ode_(ode), cfg_(cfg), n_(ode.size()), y_(init.begin(), init.end()) {
        if (init.size() != n_)
            throw Error(ErrorKind::Invalid, "initial state has wrong dimension");
        k1_.resize(n_); k2_.resize(n_); k3_.resize(n_); k4_.resize(n_);
        k5_.resize(n_); k6_.resize(n_); k7_.resize(n_); ytmp_.resize(n_);
        ode_.eval(y_.data(), k1_.data()); // FSAL seed
        check_finite(y_);
        check_finite(k1_);
        h_ = initial_step();
    }

    const std::vector<double>& state() const { return y_; }
    double worst_error() const { return worst_err_; }
    void reset_worst_error() { worst_err_ = 0.0; }

    // Advances exactly to t_target (several adaptive steps).
    void advance_to(double t_target) {
        while (t_ < t_target) {
            double h = std::min(h_, cfg_.max_step);
            bool time_clamped = h >= t_target - t_;
            if (time_clamped) h = t_target - t_;
            if (!attempt(h, time_clamped)) continue;
            t_ = time_clamped ? t_target : t_ + h;
        }
    }

  private:
    void check_finite(const std::vector<double>& v) const {
        for (double x : v)
            if (!std::isfinite(x))
                throw Error(ErrorKind::NonFinite,
                            "state left the representable range near t = " +
                                std::to_string(t_) +
                                " (reduce the input magnitude or t_end)");
    }

    double initial_step() const {
        double ynorm = 0.0, fnorm = 0.0;
        for (size_t i = 0; i < n_; ++i) {
            ynorm = std::max(ynorm, std::abs(y_[i]));
            fnorm = std::max(fnorm, std::abs(k1_[i]));
        }
        double h = (fnorm > 0.0) ? 0.01 * std::max(ynorm, 1.0) / fnorm : cfg_.max_step;
        return std::min(h, cfg_.max_step);
    }

    // One trial step of size h; on acceptance updates y and the FSAL
    // derivative and returns true, otherwise shrinks h_ and returns false.
    // A step cut short to land on a sample time must not lower the next
    // proposal, so time-clamped steps may only grow h_.
    bool attempt(double h, bool time_clamped) {
        const auto& y = y_;
        auto stage = [&](const std::vector<double>& yin, std::vector<double>& kout) {
            ode_.eval(yin.data(), kout.data());
        };

        for (size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * a21 * k1_[i];
        stage(ytmp_, k2_);
        for (size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        stage(ytmp_, k3_);
        for (size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        stage(ytmp_, k4_);
        for (size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        stage(ytmp_, k5_);
        for (size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] +
                                   a64 * k4_[i] + a65 * k5_[i]);
        stage(ytmp_, k6_);
        for (size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] +
                                   b6 * k6_[i]);
        stage(ytmp_, k7_); // also f at the new point (FSAL)

        double err = 0.0;
        for (size_t i = 0; i < n_; ++i) {
            double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                             e6 * k6_[i] + e7 * k7_[i]);
            double scale =
                cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(ytmp_[i]));
            err = std::max(err, std::abs(ei) / scale);
        }

        bool reject = !(err <= 1.0) || !std::isfinite(err);
        if (!reject && cfg_.enforce_nonneg) {
            for (size_t i = 0; i < n_; ++i)
                if (ytmp_[i] < -cfg_.abs_tol) { reject = true; break; }
        }
        if (reject) {
            shrink(err);
            return false;
        }

        check_finite(ytmp_);
        y_.swap(ytmp_);
        k1_.swap(k7_);
        worst_err_ = std::max(worst_err_, err);
        double factor = std::isfinite(err) && err > 0.0
                            ? 0.9 * std::pow(err, -0.2)
                            : 5.0;
        double proposal = h * std::clamp(factor, 0.2, 5.0);
        h_ = time_clamped ? std::max(h_, proposal) : proposal;
        return true;
    }

    void shrink(double err) {
        double factor =
            std::isfinite(err) && err > 0.0 ? std::max(0.9 * std::pow(err, -0.2), 0.1) : 0.5;
        h_ *= std::min(factor, 0.5);
        if (h_ < 1e-14 * std::max(1.0, std::abs(t_))) {
            // a diverging solution exhausts the step size before the state
            // itself turns inf; report it as the overflow it is
            for (double v : y_)
                if (std::abs(v) > 1e250)
                    throw Error(ErrorKind::NonFinite,
                                "state magnitude exceeds 1e250 near t = " +
                                    std::to_string(t_) +
                                    " (reduce the input magnitude or t_end)");
            throw Error(ErrorKind::StepFailure,
                        "step size underflow at t = " + std::to_string(t_));
        }
    }

    const PolynomialODE& ode_;
    const IntegratorConfig& cfg_;
    size_t n_;
    double t_ = 0.0;
    double h_ = 0.0;
    double worst_err_ = 0.0;
    std::vector<double> y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
};

} // namespace

Trajectory integrate(const PolynomialODE& ode, std::span<const double> init,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    Trajectory traj;
    traj.species = ode.variables();
    traj.rel_tol = cfg.rel_tol;
    traj.abs_tol = cfg.abs_tol;
    traj.times.reserve(cfg.sample_count + 1);
    traj.states.reserve((cfg.sample_count + 1) * ode.size());
    traj.step_error.reserve(cfg.sample_count + 1);

    traj.times.push_back(0.0);
    traj.states.insert(traj.states.end(), init.begin(), init.end());
    traj.step_error.push_back(0.0);

    Stepper stepper(ode, init, cfg);
    for (int s = 1; s <= cfg.sample_count; ++s) {
        double t = cfg.t_end * s / cfg.sample_count;
        stepper.reset_worst_error();
        stepper.advance_to(t);
        traj.times.push_back(t);
        const auto& y = stepper.state();
        traj.states.insert(traj.states.end(), y.begin(), y.end());
        traj.step_error.push_back(stepper.worst_error());
    }
    return traj;
}

Trajectory oracle(const PolynomialODE& ode, std::span<const double> init, double t_end,
                  int sample_count) {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.t_end = t_end;
    cfg.sample_count = sample_count;
    cfg.max_step = 0.5;

    Trajectory first = integrate(ode, init, cfg);
    cfg.max_step *= 0.5;
    Trajectory second = integrate(ode, init, cfg);

    size_t last = first.rows() - 1;
    for (size_t j = 0; j < first.cols(); ++j) {
        double a = first.at(last, j), b = second.at(last, j);
        double diff = std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
        if (!(diff < 1e-10))
            throw Error(ErrorKind::OracleDisagreement,
                        "oracle runs differ by " + std::to_string(diff) + " in " +
                            first.species[j]);
    }
    return second;
}

Trajectory simulate_circuit(const CircuitInstance& c,
                            const std::map<std::string, double>& input_values,
                            const IntegratorConfig& cfg,
                            const std::map<SpeciesId, double>& overrides,
                            bool allow_init_violation) {
    std::vector<double> init = resolve_init(c, input_values, overrides, allow_init_violation);
    IntegratorConfig run = cfg;
    run.enforce_nonneg = c.mass_action && c.driver_init.empty();
    return integrate(c.ode, init, run);
}

std::string to_csv(const Trajectory& traj) {
    std::string out = "t";
    for (const auto& s : traj.species) out += "," + s;
    out += "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    for (size_t i = 0; i < traj.rows(); ++i) {
        put(traj.times[i]);
        for (size_t j = 0; j < traj.cols(); ++j) {
            out += ",";
            put(traj.at(i, j));
        }
        out += "\n";
    }
    return out;
}

Trajectory from_csv(const std::string& text) {
    Trajectory traj;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::Syntax, "empty trajectory file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream header(line);
    std::string field;
    bool first = true;
    while (std::getline(header, field, ',')) {
        if (first) {
            if (field != "t") throw Error(ErrorKind::Syntax, "first column must be t");
            first = false;
        } else {
            traj.species.push_back(field);
        }
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> values;
        while (std::getline(row, field, ',')) {
            try {
                values.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw Error(ErrorKind::Syntax,
                            "line " + std::to_string(lineno) + ": bad number '" + field + "'");
            }
        }
        if (values.size() != traj.species.size() + 1)
            throw Error(ErrorKind::Syntax,
                        "line " + std::to_string(lineno) + ": wrong column count");
        traj.times.push_back(values[0]);
        traj.states.insert(traj.states.end(), values.begin() + 1, values.end());
    }
    traj.step_error.assign(traj.times.size(), 0.0);
    return traj;
}

} // namespace crncalc
