// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Adaptive Gauss-Kronrod (G7,K15) integration on a finite interval.
// Bisects the interval whose embedded error estimate is worst until the
// global estimate meets tolerance.

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "glrtfuse/errors.hpp"

namespace glrtfuse {

namespace detail {

// Kronrod-15 nodes on [0,1] side (symmetric) and weights; Gauss-7 weights
// sit on the odd Kronrod nodes.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 7; ++i) kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kron += kKronrodWeights[7] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gauss += kGaussWeights[3] * fv[7];
    kron *= h;
    gauss *= h;
    double err = std::abs(kron - gauss);
    // Standard sharpening of the raw difference.
    err = std::min(err, 200.0 * err * std::sqrt(std::max(err, 1e-300)));
    return {a, b, kron, err};
}

}  // namespace detail

struct QuadResult {
    double value;
    double abs_err;
    int panels;
};

inline QuadResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol = 1e-12,
                                     double rel_tol = 1e-10,
                                     int max_panels = 4000) {
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<detail::Panel> queue;
    queue.push(detail::gk15(f, a, b));
    double total = queue.top().value;
    double err = queue.top().err;
    int panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
           panels < max_panels) {
        detail::Panel worst = queue.top();
        queue.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            // Interval exhausted at double resolution; keep its estimate.
            queue.push({worst.a, worst.b, worst.value, 0.0});
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        queue.push(left);
        queue.push(right);
        ++panels;
    }
    if (err > std::max(abs_tol, rel_tol * std::abs(total)) * 100.0) {
        throw convergence_error("integrate_adaptive: tolerance not reached");
    }
    return {total, err, panels};
}

}  // namespace glrtfuse
