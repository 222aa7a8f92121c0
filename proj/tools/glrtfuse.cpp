// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

// Batch front door: G-function evaluation, Neyman-Pearson thresholds,
// detection-probability sweeps, ROC curves and Monte Carlo verification,
// emitting CSV or JSON for downstream plotting.
//
// Exit codes: 0 success, 1 usage/config error, 2 unsupported evaluation
// class or resonant parameters, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glrtfuse/config.hpp"
#include "glrtfuse/dist.hpp"
#include "glrtfuse/meijer.hpp"
#include "glrtfuse/verify.hpp"

namespace {

using namespace glrtfuse;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file " + path);
    out << text;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 1;
    long long trials = 100000;
    double lambda_x = 15.0;
    double lambda_y = 15.0;
    double alpha = 0.01;
    bool dof_literal = false;
    CLI::Option* alpha_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mc) {
    cmd->add_option("--config", o.config_path, "JSON model/run configuration");
    cmd->add_option("--out", o.out_path, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--lambda-x", o.lambda_x, "noncentrality of sensor x");
    cmd->add_option("--lambda-y", o.lambda_y, "noncentrality of sensor y");
    o.alpha_opt = cmd->add_option("--alpha", o.alpha, "false-alarm level");
    cmd->add_flag("--dof-literal", o.dof_literal,
                  "read the reference per-sensor parameter counts as the "
                  "complementary degrees of freedom (c_x=2, c_y=3)");
    if (with_mc) {
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    }
}

// Model resolution: config file if given, else the reference geometry.
struct Resolved {
    FusedModel model;
    double alpha;
    std::vector<double> lambda_grid;
};

Resolved resolve(const CommonOpts& o) {
    std::optional<RunConfig> file_cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw config_error("cannot open config " + o.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw config_error(std::string("config parse error: ") + e.what());
        }
        file_cfg = run_config_from_json(j);
    }
    const bool literal =
        o.dof_literal || (file_cfg && file_cfg->dof_literal.value_or(false));
    FusedModel model =
        (file_cfg && file_cfg->model)
            ? *file_cfg->model
            : reference_model(literal, o.lambda_x, o.lambda_y);
    // A flag given on the command line wins over the file value.
    double alpha = o.alpha;
    const bool alpha_from_flag = o.alpha_opt && o.alpha_opt->count() > 0;
    if (file_cfg && file_cfg->alpha && !alpha_from_flag) {
        alpha = *file_cfg->alpha;
    }
    std::vector<double> grid;
    if (file_cfg) grid = file_cfg->lambda_grid;
    return {std::move(model), alpha, std::move(grid)};
}

int cmd_eval_g(int m, int n, int p, int q, std::vector<double> a,
               std::vector<double> b, double x, double rel_tol, int max_terms,
               const std::string& strategy) {
    if (static_cast<int>(a.size()) != p || static_cast<int>(b.size()) != q) {
        std::cerr << "eval-g: expected " << p << " a-values and " << q
                  << " b-values\n";
        return 1;
    }
    EvalPolicy policy;
    policy.rel_tol = rel_tol;
    policy.max_terms = max_terms;
    if (strategy == "series") policy.strategy = GStrategy::ResidueSeries;
    else if (strategy == "contour") policy.strategy = GStrategy::ContourQuadrature;
    GParams params(m, n, std::move(a), std::move(b));
    const GEval g = eval_g_detailed(params, x, policy);
    std::printf("%s %s\n", fmt(g.value).c_str(), fmt(g.rel_err).c_str());
    return 0;
}

int cmd_threshold(const CommonOpts& o, const std::string& mode_name) {
    const Resolved r = resolve(o);
    const auto params = fused_dist_params(r.model, Hypothesis::H1);
    DetectorMode mode = DetectorMode::Fused;
    if (mode_name == "single-x") mode = DetectorMode::SingleX;
    else if (mode_name == "single-y") mode = DetectorMode::SingleY;
    std::printf("%s\n", fmt(threshold_for_pfa(r.alpha, params, mode)).c_str());
    return 0;
}

int cmd_pd_curve(const CommonOpts& o, std::vector<double> grid) {
    const Resolved r = resolve(o);
    if (grid.empty()) grid = r.lambda_grid;
    if (grid.empty()) {
        for (int i = 1; i <= 30; ++i) grid.push_back(i);
    }
    // Thresholds do not depend on the noncentralities.
    const auto h0_params = fused_dist_params(r.model, Hypothesis::H0);
    const double g_fused =
        threshold_for_pfa(r.alpha, h0_params, DetectorMode::Fused);
    const double g_x = threshold_for_pfa(r.alpha, h0_params, DetectorMode::SingleX);
    const double g_y = threshold_for_pfa(r.alpha, h0_params, DetectorMode::SingleY);

    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();
    csv << "lambda_x,lambda_y,pd_fused,pd_single_x,pd_single_y,error\n";
    for (const double lam : grid) {
        FusedModel m{with_lambda(r.model.sensor_x, lam),
                     with_lambda(r.model.sensor_y, lam)};
        const auto p = fused_dist_params(m, Hypothesis::H1);
        std::string err;
        double pd_f = 0.0, pd_x = 0.0, pd_y = 0.0;
        try {
            const FusedH1Dist dist(p);
            pd_f = 1.0 - dist.cdf(g_fused);
            pd_x = 1.0 - cdf_h1_single(g_x, p.c_x, p.d_x, p.lambda_x);
            pd_y = 1.0 - cdf_h1_single(g_y, p.c_y, p.d_y, p.lambda_y);
        } catch (const resonance_error& e) {
            err = e.what();
        }
        csv << fmt(p.lambda_x) << ',' << fmt(p.lambda_y) << ',' << fmt(pd_f)
            << ',' << fmt(pd_x) << ',' << fmt(pd_y) << ',' << err << '\n';
        rows.push_back({{"lambda_x", p.lambda_x},
                        {"lambda_y", p.lambda_y},
                        {"pd_fused", pd_f},
                        {"pd_single_x", pd_x},
                        {"pd_single_y", pd_y},
                        {"error", err}});
    }
    write_output(o.out_path,
                 o.format == "json" ? rows.dump(2) + "\n" : csv.str());
    return 0;
}

int cmd_roc(const CommonOpts& o, std::vector<double> gamma_grid,
            std::vector<double> alpha_grid) {
    const Resolved r = resolve(o);
    const auto h0 = fused_dist_params(r.model, Hypothesis::H0);
    const auto h1 = fused_dist_params(r.model, Hypothesis::H1);
    const FusedH0Dist d0(h0);
    const FusedH1Dist d1(h1);
    if (gamma_grid.empty() && alpha_grid.empty()) {
        alpha_grid = {0.5,  0.2,   0.1,   0.05,  0.02,
                      0.01, 0.005, 0.002, 0.001, 0.0005};
    }
    for (const double a : alpha_grid) {
        gamma_grid.push_back(threshold_for_pfa(a, h0, DetectorMode::Fused));
    }
    std::sort(gamma_grid.begin(), gamma_grid.end());
    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();
    csv << "gamma,pfa,pd\n";
    for (const double g : gamma_grid) {
        const double pfa = 1.0 - d0.cdf(g);
        const double pd = 1.0 - d1.cdf(g);
        csv << fmt(g) << ',' << fmt(pfa) << ',' << fmt(pd) << '\n';
        rows.push_back({{"gamma", g}, {"pfa", pfa}, {"pd", pd}});
    }
    write_output(o.out_path,
                 o.format == "json" ? rows.dump(2) + "\n" : csv.str());
    return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& hyp_name,
               long long chunk, double gamma) {
    const Resolved r = resolve(o);
    const Hypothesis hyp =
        (hyp_name == "h1") ? Hypothesis::H1 : Hypothesis::H0;
    const auto params = fused_dist_params(r.model, hyp);
    McConfig cfg;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.chunk = chunk;

    const auto samples = mc_statistic_samples(r.model, hyp, cfg);

    // Dense log-spaced CDF grid, then interpolation: the KS scan touches
    // every sample and the analytic laws are expensive pointwise.
    const double lo = std::max(1.0 + 1e-12, samples.front() * 0.999);
    const double hi = samples.back() * 1.001;
    const int grid_n = 4000;
    std::vector<double> zs(grid_n), fs(grid_n);
    std::function<double(double)> cdf;
    std::optional<FusedH0Dist> d0;
    std::optional<FusedH1Dist> d1;
    if (hyp == Hypothesis::H0) {
        d0.emplace(params);
        cdf = [&](double z) { return d0->cdf(z); };
    } else {
        d1.emplace(params);
        cdf = [&](double z) { return d1->cdf(z); };
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < grid_n; ++i) {
        zs[i] = std::exp(llo + (lhi - llo) * i / (grid_n - 1));
        fs[i] = cdf(zs[i]);
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

    const double ks = ks_statistic(samples, interp);
    const double critical = ks_critical_1pct(cfg.trials);
    const bool pass = ks < critical;

    nlohmann::json report{{"hypothesis", hyp_name},
                          {"trials", cfg.trials},
                          {"seed", cfg.seed},
                          {"chunk", cfg.chunk},
                          {"ks", ks},
                          {"critical", critical},
                          {"pass", pass}};
    if (gamma >= 1.0) {
        const auto rates = mc_rates(r.model, gamma, cfg);
        report["gamma"] = gamma;
        report["pfa_hat"] = rates.pfa_hat;
        report["pd_hat"] = rates.pd_hat;
        report["pfa_se"] = rates.pfa_se;
        report["pd_se"] = rates.pd_se;
        const FusedH0Dist dh0(fused_dist_params(r.model, Hypothesis::H0));
        report["pfa_analytic"] = 1.0 - dh0.cdf(gamma);
        try {
            const FusedH1Dist dh1(fused_dist_params(r.model, Hypothesis::H1));
            report["pd_analytic"] = 1.0 - dh1.cdf(gamma);
        } catch (const resonance_error&) {
            report["pd_analytic"] = nullptr;
        }
    }
    write_output(o.out_path, report.dump(2) + "\n");
    return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bimodal GLRT fusion toolkit"};
    app.require_subcommand(1);

    // eval-g
    int m = 0, n = 0, p = 0, q = 0, max_terms = 10000;
    double x = 1.0, rel_tol = 1e-12;
    std::vector<double> a_row, b_row;
    std::string strategy = "auto";
    auto* eval = app.add_subcommand("eval-g", "evaluate a Meijer G-function");
    eval->add_option("--m", m)->required();
    eval->add_option("--n", n)->required();
    eval->add_option("--p", p)->required();
    eval->add_option("--q", q)->required();
    eval->add_option("--a", a_row, "upper parameters (p values)");
    eval->add_option("--b", b_row, "lower parameters (q values)");
    eval->add_option("--x", x, "argument (> 0)")->required();
    eval->add_option("--rel-tol", rel_tol);
    eval->add_option("--max-terms", max_terms);
    eval->add_option("--strategy", strategy)
        ->check(CLI::IsMember({"auto", "series", "contour"}));

    CommonOpts to;
    std::string mode_name = "fused";
    auto* thr = app.add_subcommand("threshold", "Neyman-Pearson threshold");
    add_common(thr, to, false);
    thr->add_option("--mode", mode_name)
        ->check(CLI::IsMember({"fused", "single-x", "single-y"}));

    CommonOpts po;
    std::vector<double> lambda_grid;
    auto* pdc = app.add_subcommand(
        "pd-curve", "detection probability over a noncentrality sweep");
    add_common(pdc, po, false);
    pdc->add_option("--lambda-grid", lambda_grid, "explicit lambda values");

    CommonOpts ro;
    std::vector<double> gamma_grid, alpha_grid;
    auto* roc = app.add_subcommand("roc", "threshold/false-alarm/detection table");
    add_common(roc, ro, false);
    roc->add_option("--gamma-grid", gamma_grid);
    roc->add_option("--alpha-grid", alpha_grid);

    CommonOpts vo;
    std::string hyp_name = "h0";
    long long chunk = 8192;
    double gamma = 0.0;
    auto* ver = app.add_subcommand(
        "verify", "Monte Carlo KS verification of the analytic laws");
    add_common(ver, vo, true);
    ver->add_option("--hypothesis", hyp_name)->check(CLI::IsMember({"h0", "h1"}));
    ver->add_option("--chunk", chunk);
    ver->add_option("--gamma", gamma, "also report exceedance rates at gamma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (eval->parsed()) {
            return cmd_eval_g(m, n, p, q, a_row, b_row, x, rel_tol, max_terms,
                              strategy);
        }
        if (thr->parsed()) return cmd_threshold(to, mode_name);
        if (pdc->parsed()) return cmd_pd_curve(po, lambda_grid);
        if (roc->parsed()) return cmd_roc(ro, gamma_grid, alpha_grid);
        if (ver->parsed()) return cmd_verify(vo, hyp_name, chunk, gamma);
    } catch (const unsupported_class_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const resonance_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
