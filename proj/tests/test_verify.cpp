// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "glrtfuse/config.hpp"
#include "glrtfuse/verify.hpp"
#include "oracles.hpp"

using namespace glrtfuse;

TEST_CASE("mc_statistic_samples determinism") {
    const auto model = reference_model(false, 5.0, 5.0);
    McConfig cfg;
    cfg.trials = 4000;
    cfg.seed = 101;
    cfg.chunk = 512;
    const auto a = mc_statistic_samples(model, Hypothesis::H0, cfg);
    const auto b = mc_statistic_samples(model, Hypothesis::H0, cfg);
    CHECK(a == b);
    // Thread count never changes the result.
    McConfig serial = cfg;
    serial.max_threads = 1;
    McConfig wide = cfg;
    wide.max_threads = 8;
    CHECK(mc_statistic_samples(model, Hypothesis::H0, serial) ==
          mc_statistic_samples(model, Hypothesis::H0, wide));
    // Single-trial reproducibility.
    McConfig one = cfg;
    one.trials = 1;
    CHECK(mc_statistic_samples(model, Hypothesis::H0, one) ==
          mc_statistic_samples(model, Hypothesis::H0, one));
    // No degenerate draws expected.
    CHECK(std::isfinite(a.back()));
}

TEST_CASE("scale invariance of the empirical law") {
    // Same seeds, different noise scales: identical statistics except for
    // floating-point roundoff, so compare distributions via two-sample KS.
    McConfig cfg;
    cfg.trials = 20000;
    cfg.seed = 7;
    std::vector<std::vector<double>> runs;
    for (double s2 : {0.1, 1.0, 10.0}) {
        FusedModel m{make_canonical_sensor(6, 2, 5.0, s2),
                     make_canonical_sensor(16, 3, 5.0, s2)};
        runs.push_back(mc_statistic_samples(m, Hypothesis::H0, cfg));
    }
    const double bound = 2.0 * 1.63 / std::sqrt(double(cfg.trials));
    CHECK(oracles::two_sample_ks(runs[0], runs[1]) <= bound);
    CHECK(oracles::two_sample_ks(runs[1], runs[2]) <= bound);
}

TEST_CASE("separation sanity under strong signal") {
    McConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 3;
    const auto model = reference_model(false, 200.0, 200.0);
    const auto h0 = mc_statistic_samples(model, Hypothesis::H0, cfg);
    const auto h1 = mc_statistic_samples(model, Hypothesis::H1, cfg);
    CHECK(h1.front() > h0[h0.size() / 2]);
}

TEST_CASE("ks_statistic elementary cases") {
    // Inverse-transform grid drawn exactly from F: distance <= 1/n.
    std::vector<double> grid(1000);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = (i + 0.5) / grid.size();
    }
    CHECK(ks_statistic(grid, [](double x) { return x; }) <= 1.0 / grid.size());
    // F identically zero: distance 1.
    CHECK(ks_statistic(grid, [](double) { return 0.0; }) ==
          doctest::Approx(1.0));
}

TEST_CASE("ks_statistic uniform calibration over seeds") {
    // At the 1% critical value, at most one failure in twenty runs is the
    // expected operating point.
    int failures = 0;
    for (int seed = 1; seed <= 20; ++seed) {
        CounterStream stream(seed, 9, 0);
        std::vector<double> u(100000);
        for (auto& v : u) v = stream.next_unit();
        std::sort(u.begin(), u.end());
        const double ks = ks_statistic(u, [](double x) { return x; });
        if (ks >= ks_critical_1pct(u.size())) ++failures;
    }
    CHECK(failures <= 1);
}

TEST_CASE("oracle_cdf_fused support and closed form") {
    FusedDistParams sym(4, 4, 2, 2, 2, 2);
    CHECK(oracle_cdf_fused(1.0, sym, Hypothesis::H0) == 0.0);
    for (double z : {2.0, 4.0, 25.0}) {
        const double t = 1.0 / std::sqrt(z);
        CHECK(oracle_cdf_fused(z, sym, Hypothesis::H0) ==
              doctest::Approx(1.0 - oracles::product_of_uniforms_cdf(t))
                  .epsilon(1e-9));
    }
}

TEST_CASE("oracle agrees with a large Monte Carlo run") {
    const auto model = reference_model(false, 5.0, 5.0);
    const auto params = fused_dist_params(model, Hypothesis::H0);
    McConfig cfg;
    cfg.trials = 1000000;
    cfg.seed = 2;
    const auto samples = mc_statistic_samples(model, Hypothesis::H0, cfg);
    // Interpolated oracle grid keeps this test quick.
    const int n = 1200;
    std::vector<double> zs(n), fs(n);
    const double lo = std::log(samples.front() * 0.999);
    const double hi = std::log(samples.back() * 1.001);
    for (int i = 0; i < n; ++i) {
        zs[i] = std::exp(lo + (hi - lo) * i / (n - 1));
        fs[i] = oracle_cdf_fused(zs[i], params, Hypothesis::H0);
        if (i > 0) fs[i] = std::max(fs[i], fs[i - 1]);
    }
    auto interp = [&](double z) {
        if (z <= zs.front()) return fs.front();
        if (z >= zs.back()) return fs.back();
        const auto it = std::lower_bound(zs.begin(), zs.end(), z);
        const std::size_t i = it - zs.begin();
        const double t = (std::log(z) - std::log(zs[i - 1])) /
                         (std::log(zs[i]) - std::log(zs[i - 1]));
        return fs[i - 1] + t * (fs[i] - fs[i - 1]);
    };
    CHECK(ks_statistic(samples, interp) < ks_critical_1pct(cfg.trials));
}

TEST_CASE("mc_rates endpoints and headline check") {
    const auto model = reference_model(false, 15.0, 15.0);
    McConfig cfg;
    cfg.trials = 20000;
    cfg.seed = 5;
    const auto at_one = mc_rates(model, 1.0, cfg);
    CHECK(at_one.pfa_hat == doctest::Approx(1.0));
    CHECK(at_one.pd_hat == doctest::Approx(1.0));
    const auto huge = mc_rates(model, 1e280, cfg);
    CHECK(huge.pfa_hat == 0.0);
    CHECK(huge.pd_hat == 0.0);
    const auto params = fused_dist_params(model, Hypothesis::H0);
    const double gamma = threshold_for_pfa(0.01, params, DetectorMode::Fused);
    const auto r = mc_rates(model, gamma, cfg);
    CHECK(std::abs(r.pfa_hat - 0.01) <
          3.0 * std::sqrt(0.01 * 0.99 / double(cfg.trials)));
}

TEST_CASE("negative control: corrupted degrees of freedom fail KS") {
    const auto model = reference_model(false, 5.0, 5.0);
    McConfig cfg;
    cfg.trials = 50000;
    cfg.seed = 11;
    const auto samples = mc_statistic_samples(model, Hypothesis::H0, cfg);
    // Off-by-one noise dof on sensor x.
    FusedDistParams wrong(6, 16, 3, 3, 13, 3);
    FusedH0Dist bad(wrong);
    const double ks = ks_statistic(samples, [&](double z) { return bad.cdf(z); });
    CHECK(ks > ks_critical_1pct(cfg.trials));
}
