#pragma once

// Small shared numerics. Distribution CDFs/quantiles are thin wrappers over
// Boost.Math; everything estimator-like lives with its module.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tbeval/errors.hpp"

namespace tbeval {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error("mean: empty input");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance (divisor n-1).
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("sample_variance: need >= 2 values");
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

/// Quantile by linear interpolation at position p*(n-1) on the sorted data.
inline double quantile_linear(std::vector<double> xs, double p) {
    if (xs.empty()) throw Error("quantile_linear: empty input");
    if (p < 0.0 || p > 1.0) throw Error("quantile_linear: p outside [0,1]");
    std::sort(xs.begin(), xs.end());
    double pos = p * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488);
}

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<>(), p);
}

/// Upper-tail probability P(T > t) for Student's t with real df > 0.
inline double student_t_tail(double t, double df) {
    if (!(df > 0.0)) throw Error("student_t_tail: df must be > 0");
    boost::math::students_t_distribution<> dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

inline double student_t_quantile(double p, double df) {
    boost::math::students_t_distribution<> dist(df);
    return boost::math::quantile(dist, p);
}

/// P(X <= k) for X ~ Binomial(m, 1/2).
inline double binomial_half_cdf(unsigned m, unsigned k) {
    if (k >= m) return 1.0;
    boost::math::binomial_distribution<> dist(m, 0.5);
    return boost::math::cdf(dist, k);
}

/// Kolmogorov asymptotic tail Q(lambda) = 2 * sum_{i>=1} (-1)^{i-1} exp(-2 i^2 lambda^2),
/// truncated when a term's magnitude drops below 1e-12. Q(0) = 1 by convention.
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    double l2 = lambda * lambda;
    for (std::size_t i = 1; i <= 100000; ++i) {
        double term = std::exp(-2.0 * static_cast<double>(i) * static_cast<double>(i) * l2);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    double q = 2.0 * sum;
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace tbeval
