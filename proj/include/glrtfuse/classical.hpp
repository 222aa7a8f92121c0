// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Classical distribution functions used as independent ground truth for
// the Meijer-G based laws: regularized incomplete beta via Lentz's
// continued fraction, the noncentral F CDF as a Poisson mixture of
// incomplete betas, and the noncentral beta density.

#include <cmath>
#include <limits>

#include "glrtfuse/errors.hpp"
#include "glrtfuse/gamma.hpp"

namespace glrtfuse {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Lentz continued fraction for the incomplete beta; converges fast for
// x < (a+1)/(a+b+2).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr double tiny = 1e-30;
    constexpr int max_iter = 500;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) {
            return h;
        }
    }
    throw convergence_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw error("reg_inc_beta: shape parameters must be positive");
    }
    if (x < 0.0 || x > 1.0) {
        throw error("reg_inc_beta: x outside [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_pre = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_pre) * detail::beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - std::exp(log_pre) * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

inline double beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                    log_beta(a, b));
}

// CDF of the noncentral F distribution with d1, d2 degrees of freedom and
// noncentrality lambda: a Poisson(lambda/2) mixture of central incomplete
// betas, truncated when the remaining Poisson tail mass drops below 1e-14.
inline double noncentral_f_cdf(double d1, double d2, double lambda, double x) {
    if (!(d1 > 0.0) || !(d2 > 0.0) || lambda < 0.0) {
        throw error("noncentral_f_cdf: invalid parameters");
    }
    if (x <= 0.0) return 0.0;
    const double w = d1 * x / (d1 * x + d2);
    if (lambda == 0.0) return reg_inc_beta(0.5 * d1, 0.5 * d2, w);
    const double half = 0.5 * lambda;
    double cdf = 0.0;
    double mass = 0.0;
    for (int j = 0; j < 100000; ++j) {
        const double log_w = -half + j * std::log(half) - std::lgamma(j + 1.0);
        const double pj = std::exp(log_w);
        cdf += pj * reg_inc_beta(0.5 * d1 + j, 0.5 * d2, w);
        mass += pj;
        if (1.0 - mass < 1e-14 && j > half) return cdf;
    }
    throw convergence_error("noncentral_f_cdf: Poisson mixture did not truncate");
}

// Density at x of the noncentral beta law X/(X+Y) with X ~ chi2_{2a}(lambda)
// and Y ~ chi2_{2b}, as the Poisson mixture of Beta(a + j, b) densities.
inline double noncentral_beta_pdf(double x, double a, double b, double lambda) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    if (lambda == 0.0) return beta_pdf(x, a, b);
    const double half = 0.5 * lambda;
    double pdf = 0.0;
    double mass = 0.0;
    for (int j = 0; j < 100000; ++j) {
        const double log_w = -half + j * std::log(half) - std::lgamma(j + 1.0);
        const double pj = std::exp(log_w);
        pdf += pj * beta_pdf(x, a + j, b);
        mass += pj;
        if (1.0 - mass < 1e-14 && j > half) return pdf;
    }
    throw convergence_error("noncentral_beta_pdf: Poisson mixture did not truncate");
}

}  // namespace glrtfuse
