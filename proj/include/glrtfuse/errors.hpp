// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace glrtfuse {

// Base class for all toolkit errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma function evaluated at (or too close to) a nonpositive integer.
struct pole_error : error {
    using error::error;
};

// A log-magnitude left the representable double range.
struct overflow_error : error {
    using error::error;
};

// Requested G-function evaluation lies outside the supported
// convergence classes; the message names the violated condition.
struct unsupported_class_error : error {
    using error::error;
};

// A series or quadrature failed to reach the requested tolerance.
struct convergence_error : error {
    using error::error;
};

// G-function parameter rows violate pole separability.
struct separability_error : error {
    using error::error;
};

// The integral behind a parameter transform diverges at the origin.
struct divergent_integral_error : error {
    using error::error;
};

// A matrix factorization required positive definiteness / full rank.
struct singular_matrix_error : error {
    using error::error;
};

// H1 fused-distribution parameters hit the Diophantine resonance
// M(2k + c_x) = N(2m + c_y); the analytic series is singular there.
struct resonance_error : error {
    using error::error;
};

// A test statistic was requested on a measure-zero degenerate sample.
struct degenerate_sample_error : error {
    using error::error;
};

// Root bracketing failed inside a safe numeric range.
struct bracket_error : error {
    using error::error;
};

// Malformed configuration input.
struct config_error : error {
    using error::error;
};

}  // namespace glrtfuse
