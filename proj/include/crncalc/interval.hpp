#ifndef CRNCALC_INTERVAL_HPP
#define CRNCALC_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>

namespace crncalc {

// Closed interval with infinite endpoints allowed; used to propagate
// declared input ranges through expressions for domain checking and
// worst-case rate bounds.
struct Interval {
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    double lo = -kInf;
    double hi = kInf;

    static Interval point(double v) { return {v, v}; }
    static Interval nonneg() { return {0.0, kInf}; }
    static Interval real() { return {-kInf, kInf}; }

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool positive() const { return lo > 0.0; }
    bool nonnegative() const { return lo >= 0.0; }
};

namespace interval {

// 0 * inf treated as 0; adequate for the boxes produced here.
inline double safe_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

inline Interval add(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval sub(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval neg(Interval a) { return {-a.hi, -a.lo}; }

inline Interval mul(Interval a, Interval b) {
    double c[4] = {safe_mul(a.lo, b.lo), safe_mul(a.lo, b.hi), safe_mul(a.hi, b.lo),
                   safe_mul(a.hi, b.hi)};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

// denominator must be strictly positive (checked by callers)
inline Interval div(Interval a, Interval b) {
    return mul(a, Interval{b.hi == Interval::kInf ? 0.0 : 1.0 / b.hi, 1.0 / b.lo});
}

inline Interval exp(Interval a) { return {std::exp(a.lo), std::exp(a.hi)}; }
inline Interval ln(Interval a) { return {std::log(a.lo), std::log(a.hi)}; }
inline Interval root(Interval a, int m) {
    return {std::pow(a.lo, 1.0 / m), std::pow(a.hi, 1.0 / m)};
}
inline Interval max(Interval a, Interval b) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline Interval abs_diff(Interval a, Interval b) {
    double lo = 0.0;
    if (a.lo > b.hi) lo = a.lo - b.hi;
    else if (b.lo > a.hi) lo = b.lo - a.hi;
    double hi = std::max(a.hi - b.lo, b.hi - a.lo);
    return {lo, hi};
}

} // namespace interval
} // namespace crncalc

#endif
