// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Log-gamma machinery used throughout the Mellin-Barnes kernels:
// a signed real log-gamma (value and sign of Gamma(x) for any non-pole
// real x) and a principal-branch complex log-gamma via the Lanczos
// approximation (g = 607/128, 15 coefficients) with reflection for
// Re(z) < 1/2.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "glrtfuse/errors.hpp"

namespace glrtfuse {

inline constexpr double kPoleTol = 1e-9;

// True when x is within tol of a nonpositive integer (a Gamma pole).
inline bool is_gamma_pole(double x, double tol = kPoleTol) {
    if (x > 0.5) return false;
    return std::abs(x - std::round(x)) < tol;
}

// Nearest integer, for pole bookkeeping.
inline long long nearest_int(double x) { return std::llround(x); }

struct SignedLog {
    double log_abs;
    double sign;  // +1 or -1
};

// log|Gamma(x)| and sign(Gamma(x)) for real non-pole x.
inline SignedLog slgamma(double x) {
    if (is_gamma_pole(x)) {
        throw pole_error("slgamma: argument " + std::to_string(x) +
                         " is at a gamma pole");
    }
    if (x > 0.0) {
        return {std::lgamma(x), 1.0};
    }
    // Gamma alternates sign between consecutive negative integers.
    double fl = std::floor(x);
    double sign = (static_cast<long long>(fl) % 2 == 0) ? 1.0 : -1.0;
    return {std::lgamma(x), sign};
}

struct SignedLogL {
    long double log_abs;
    double sign;  // +1 or -1
};

// Extended-precision variant used inside residue series, where sums of
// large log-gammas meet heavy cancellation.
inline SignedLogL slgamma_l(long double x) {
    if (is_gamma_pole(static_cast<double>(x))) {
        throw pole_error("slgamma_l: argument at a gamma pole");
    }
    if (x > 0.0L) {
        return {std::lgamma(x), 1.0};
    }
    const long double fl = std::floor(x);
    const double sign = (static_cast<long long>(fl) % 2 == 0) ? 1.0 : -1.0;
    return {std::lgamma(x), sign};
}

namespace detail {

inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr double kLanczosCoeff[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

// log Gamma(z) for Re(z) >= 1/2 (no reflection needed).
inline std::complex<double> lanczos_lgamma_half_plane(std::complex<double> z) {
    std::complex<double> zm1 = z - 1.0;
    std::complex<double> s = kLanczosCoeff[0];
    for (int k = 1; k < 15; ++k) s += kLanczosCoeff[k] / (zm1 + double(k));
    std::complex<double> t = zm1 + kLanczosG + 0.5;
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(s);
}

// log(sin(pi z)), stable against cosh/sinh overflow in the imaginary
// direction: for |Im z| beyond a few units the sine is dominated by a
// single exponential.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    const double pi = std::numbers::pi;
    double x = z.real();
    double y = z.imag();
    // Reduce the real part mod 2 to keep sin(pi x) accurate for large x.
    double xr = x - 2.0 * std::floor(x / 2.0);
    if (std::abs(y) < 8.0) {
        std::complex<double> s(std::sin(pi * xr) * std::cosh(pi * y),
                               std::cos(pi * xr) * std::sinh(pi * y));
        return std::log(s);
    }
    // sin(pi z) = -exp(-i pi z) / (2i) * (1 - exp(2 i pi z)), valid sign
    // conventions for y > 0; conjugate for y < 0.
    std::complex<double> zr(xr, std::abs(y));
    std::complex<double> i_pi_z = std::complex<double>(0.0, pi) * zr;
    std::complex<double> val = -i_pi_z - std::log(std::complex<double>(0.0, 2.0)) +
                               std::log(1.0 - std::exp(2.0 * i_pi_z));
    if (y < 0.0) val = std::conj(val);
    return val;
}

}  // namespace detail

// log Gamma(z) for complex z away from the nonpositive integers; the
// principal (continuous) branch for Re(z) >= 1/2, and exp-equivalent
// (imaginary part modulo 2 pi) deep in the reflected half plane, which is
// all the Mellin-Barnes kernel consumes. Accuracy ~1e-14 for |z| <= 170.
inline std::complex<double> log_gamma_complex(std::complex<double> z) {
    if (z.imag() == 0.0 && is_gamma_pole(z.real())) {
        throw pole_error("log_gamma_complex: argument at a gamma pole");
    }
    if (z.real() >= 0.5) {
        return detail::lanczos_lgamma_half_plane(z);
    }
    if (z.real() >= -64.0) {
        // Argument recurrence into the Lanczos half plane keeps full
        // precision; the reflection route loses a few digits.
        std::complex<double> shift = 0.0;
        int steps = static_cast<int>(std::ceil(0.5 - z.real()));
        for (int i = 0; i < steps; ++i) {
            shift += std::log(z);
            z += 1.0;
        }
        return detail::lanczos_lgamma_half_plane(z) - shift;
    }
    // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z).
    const double log_pi = 1.1447298858494001741;
    return log_pi - detail::log_sin_pi(z) -
           detail::lanczos_lgamma_half_plane(1.0 - z);
}

}  // namespace glrtfuse
