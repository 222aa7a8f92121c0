// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// GLRT fusion rule. Each sensor contributes
//
//   Z = (S + R) / S,   S = obs' W' P_perp W obs,   R = obs' W' P W obs,
//
// and the fused statistic is Z_x^{N/2} Z_y^{M/2}, formed in log space.
// Both quadratic forms are computed from the whitened least-squares fit:
// R is the energy of the fitted signal component, S the residual energy.
// The same weighted-geometric-mean architecture extends to more than two
// sensors; this toolkit implements the two-sensor case only.

#include <cmath>
#include <limits>
#include <span>

#include "glrtfuse/errors.hpp"
#include "glrtfuse/model.hpp"

namespace glrtfuse {

struct SrDecomposition {
    double s;  // noise-subspace energy
    double r;  // signal-subspace energy
};

inline SrDecomposition sr_decomposition(std::span<const double> obs,
                                        const SensorModel& model) {
    const auto u = model.whiten(obs);
    const auto theta_hat = model.fit(u);
    const auto pu = mat_vec(model.whitened_h(), theta_hat);
    double s = 0.0, r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double res = u[i] - pu[i];
        s += res * res;
        r += pu[i] * pu[i];
    }
    return {s, r};
}

// Fused or single-sensor GLRT statistic. value >= 1 always; a degenerate
// sample (S = 0 exactly, probability zero) carries +infinity semantics so
// batch simulation never divides by zero.
struct TestStatistic {
    double value = 1.0;
    double log_value = 0.0;
    int samples_x = 0;
    int samples_y = 0;  // zero for a single-sensor statistic
    bool degenerate = false;
};

inline TestStatistic statistic_single(std::span<const double> obs,
                                      const SensorModel& model) {
    const auto sr = sr_decomposition(obs, model);
    TestStatistic t;
    t.samples_x = model.samples();
    if (sr.s <= 0.0) {
        t.value = std::numeric_limits<double>::infinity();
        t.log_value = std::numeric_limits<double>::infinity();
        t.degenerate = true;
        return t;
    }
    t.value = (sr.s + sr.r) / sr.s;
    t.log_value = std::log(t.value);
    return t;
}

inline TestStatistic statistic_fused(std::span<const double> obs_x,
                                     std::span<const double> obs_y,
                                     const FusedModel& fused) {
    const auto zx = statistic_single(obs_x, fused.sensor_x);
    const auto zy = statistic_single(obs_y, fused.sensor_y);
    TestStatistic t;
    t.samples_x = fused.sensor_x.samples();
    t.samples_y = fused.sensor_y.samples();
    if (zx.degenerate || zy.degenerate) {
        t.value = std::numeric_limits<double>::infinity();
        t.log_value = std::numeric_limits<double>::infinity();
        t.degenerate = true;
        return t;
    }
    t.log_value = 0.5 * (t.samples_x * zx.log_value + t.samples_y * zy.log_value);
    t.value = std::exp(t.log_value);
    return t;
}

// Threshold comparison; ties resolve to H0.
inline Hypothesis decide(const TestStatistic& stat, double gamma) {
    if (!(gamma >= 1.0)) throw error("decide: threshold must be >= 1");
    return stat.value > gamma ? Hypothesis::H1 : Hypothesis::H0;
}

}  // namespace glrtfuse
