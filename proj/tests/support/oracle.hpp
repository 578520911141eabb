#ifndef CRNCALC_TESTS_ORACLE_HPP
#define CRNCALC_TESTS_ORACLE_HPP

// Test-only reference integrator.  Classic fixed-step RK4 with its own
// monomial evaluation, so expected values never flow through the adaptive
// production path they are checking.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "crncalc/network.hpp"

namespace testsupport {

inline void eval_rhs(const crncalc::PolynomialODE& ode, const std::vector<double>& y,
                     std::vector<double>& dy) {
    const auto& rhs = ode.rhs();
    for (size_t i = 0; i < rhs.size(); ++i) {
        double acc = 0.0;
        for (const auto& mono : rhs[i]) {
            double term = mono.coeff;
            for (const auto& [var, exp] : mono.powers)
                term *= std::pow(y[var], static_cast<double>(exp));
            acc += term;
        }
        dy[i] = acc;
    }
}

inline std::vector<double> rk4(const crncalc::PolynomialODE& ode, std::vector<double> y,
                               double t_end, double h) {
    const size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    long steps = static_cast<long>(std::ceil(t_end / h));
    h = t_end / steps;
    for (long s = 0; s < steps; ++s) {
        eval_rhs(ode, y, k1);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        eval_rhs(ode, tmp, k2);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        eval_rhs(ode, tmp, k3);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        eval_rhs(ode, tmp, k4);
        for (size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

// Richardson-style confidence: full and half step must agree.
inline std::vector<double> rk4_checked(const crncalc::PolynomialODE& ode,
                                       const std::vector<double>& y0, double t_end,
                                       double h = 1e-3, double tol = 1e-8) {
    std::vector<double> a = rk4(ode, y0, t_end, h);
    std::vector<double> b = rk4(ode, y0, t_end, h / 2.0);
    for (size_t i = 0; i < a.size(); ++i) {
        double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
        if (std::abs(a[i] - b[i]) / scale > tol)
            throw std::runtime_error("test oracle failed to converge in " +
                                     ode.variables()[i]);
    }
    return b;
}

} // namespace testsupport

#endif
