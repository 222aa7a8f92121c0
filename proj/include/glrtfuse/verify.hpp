// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Independent ground truth for the analytic laws: reproducible Monte
// Carlo of the fused detector, empirical-CDF comparison via the KS
// statistic, and a quadrature oracle for the fused CDFs built from the
// classical Beta / noncentral-Beta representation.
//
// Monte Carlo trials are partitioned into chunks, each driven by its own
// counter-based stream derived from (seed, hypothesis, chunk index), so
// the sample vector is a pure function of (trials, seed, chunk) no matter
// how many threads are used.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "glrtfuse/classical.hpp"
#include "glrtfuse/detector.hpp"
#include "glrtfuse/dist.hpp"
#include "glrtfuse/model.hpp"
#include "glrtfuse/quadrature.hpp"
#include "glrtfuse/rng.hpp"

namespace glrtfuse {

struct McConfig {
    long long trials = 100000;
    std::uint64_t seed = 1;
    long long chunk = 8192;
    int max_threads = 0;  // 0 = hardware concurrency; never changes results
};

namespace detail {

inline std::uint32_t stream_purpose(Hypothesis hyp) {
    return hyp == Hypothesis::H0 ? 0u : 1u;
}

}  // namespace detail

// cfg.trials fused-statistic values under the given hypothesis, sorted
// ascending. Degenerate samples (probability zero) surface as +inf.
inline std::vector<double> mc_statistic_samples(const FusedModel& model,
                                                Hypothesis hyp,
                                                const McConfig& cfg) {
    if (cfg.trials < 1 || cfg.chunk < 1) {
        throw config_error("McConfig: trials and chunk must be >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(cfg.trials));
    const long long chunks = (cfg.trials + cfg.chunk - 1) / cfg.chunk;
    const std::uint32_t purpose = detail::stream_purpose(hyp);

    auto run_chunks = [&](long long c0, long long c1) {
        for (long long c = c0; c < c1; ++c) {
            CounterStream stream(cfg.seed, purpose,
                                 static_cast<std::uint32_t>(c));
            const long long begin = c * cfg.chunk;
            const long long end = std::min(begin + cfg.chunk, cfg.trials);
            for (long long t = begin; t < end; ++t) {
                const auto obs_x = model.sensor_x.draw(hyp, stream);
                const auto obs_y = model.sensor_y.draw(hyp, stream);
                out[static_cast<std::size_t>(t)] =
                    statistic_fused(obs_x, obs_y, model).value;
            }
        }
    };

    long long threads =
        cfg.max_threads > 0
            ? cfg.max_threads
            : static_cast<long long>(std::thread::hardware_concurrency());
    threads = std::max<long long>(1, std::min<long long>(threads, chunks));
    if (threads == 1) {
        run_chunks(0, chunks);
    } else {
        std::vector<std::thread> pool;
        const long long per = (chunks + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            const long long c0 = i * per;
            const long long c1 = std::min<long long>(c0 + per, chunks);
            if (c0 >= c1) break;
            pool.emplace_back(run_chunks, c0, c1);
        }
        for (auto& th : pool) th.join();
    }
    std::sort(out.begin(), out.end());
    return out;
}

// One-sample Kolmogorov-Smirnov statistic against a reference CDF;
// samples must be sorted ascending.
inline double ks_statistic(const std::vector<double>& sorted_samples,
                           const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted_samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = cdf(sorted_samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

// Asymptotic 1% critical value.
inline double ks_critical_1pct(long long n) {
    return 1.63 / std::sqrt(static_cast<double>(n));
}

// Quadrature oracle for P(Z <= z): conditioning on V = 1/Z_y,
//   P(Z <= z) = Int_0^1 F_{Zx}((z v^{M/2})^{2/N}) f_V(v) dv,
// with the central or noncentral classical laws of both factors.
inline double oracle_cdf_fused(double z, const FusedDistParams& p,
                               Hypothesis hyp) {
    if (!(z > 1.0)) return 0.0;
    const bool h1 = hyp == Hypothesis::H1;
    if (h1 && (!(p.lambda_x > 0.0) || !(p.lambda_y > 0.0))) {
        throw error("oracle_cdf_fused: H1 oracle requires positive lambdas");
    }
    const double v0 = std::pow(z, -2.0 / p.M);
    auto f = [&](double v) {
        const double w = std::pow(z * std::pow(v, 0.5 * p.M), 2.0 / p.N);
        if (w <= 1.0) return 0.0;
        double fx;
        if (h1) {
            fx = noncentral_f_cdf(p.d_x, p.c_x, p.lambda_x,
                                  (static_cast<double>(p.c_x) / p.d_x) *
                                      (w - 1.0));
        } else {
            fx = 1.0 - reg_inc_beta(0.5 * p.c_x, 0.5 * p.d_x, 1.0 / w);
        }
        const double fv =
            h1 ? noncentral_beta_pdf(1.0 - v, 0.5 * p.d_y, 0.5 * p.c_y,
                                     p.lambda_y)
               : beta_pdf(v, 0.5 * p.c_y, 0.5 * p.d_y);
        return fx * fv;
    };
    return std::clamp(integrate_adaptive(f, v0, 1.0, 1e-13, 1e-10).value, 0.0,
                      1.0);
}

struct McRates {
    double pfa_hat;
    double pd_hat;
    double pfa_se;
    double pd_se;
};

// Empirical exceedance rates under both hypotheses at threshold gamma,
// with binomial standard errors.
inline McRates mc_rates(const FusedModel& model, double gamma,
                        const McConfig& cfg) {
    if (!(gamma >= 1.0)) throw error("mc_rates: gamma must be >= 1");
    auto exceed = [&](Hypothesis hyp) {
        const auto samples = mc_statistic_samples(model, hyp, cfg);
        const auto it =
            std::upper_bound(samples.begin(), samples.end(), gamma);
        return static_cast<double>(samples.end() - it) /
               static_cast<double>(samples.size());
    };
    McRates r{};
    r.pfa_hat = exceed(Hypothesis::H0);
    r.pd_hat = exceed(Hypothesis::H1);
    const double n = static_cast<double>(cfg.trials);
    r.pfa_se = std::sqrt(r.pfa_hat * (1.0 - r.pfa_hat) / n);
    r.pd_se = std::sqrt(r.pd_hat * (1.0 - r.pd_hat) / n);
    return r;
}

}  // namespace glrtfuse
