// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "glrtfuse/config.hpp"

using namespace glrtfuse;

namespace {

#ifndef GLRTFUSE_CLI_PATH
#define GLRTFUSE_CLI_PATH "./glrtfuse"
#endif

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_path = "cli_test_output.tmp";
    const std::string cmd = std::string(GLRTFUSE_CLI_PATH) + " " + args +
                            " > " + out_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(out_path.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
    nlohmann::json j = {
        {"sensor_x",
         {{"H", {{1.0}, {0.0}, {0.0}}}, {"R", "identity"}, {"theta", {2.0}},
          {"sigma2", 1.0}}},
        {"sensor_y",
         {{"H", {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}}},
          {"theta", {1.0, 1.0}},
          {"sigma2", 0.5}}},
        {"alpha", 0.05},
        {"lambda_grid", {1.0, 2.0}},
        {"dof_literal", false}};
    const auto cfg = run_config_from_json(j);
    REQUIRE(cfg.model.has_value());
    CHECK(cfg.model->sensor_x.samples() == 3);
    CHECK(cfg.model->sensor_y.param_count() == 2);
    CHECK(cfg.alpha == doctest::Approx(0.05));
    CHECK(cfg.lambda_grid.size() == 2);
    CHECK(cfg.model->sensor_x.lambda() == doctest::Approx(4.0));
}

TEST_CASE("config rejects unknown keys and malformed input") {
    nlohmann::json j = {{"alpha", 0.05}, {"mystery", 1}};
    CHECK_THROWS_AS(run_config_from_json(j), config_error);
    nlohmann::json ragged = {
        {"sensor_x", {{"H", {{1.0, 2.0}, {3.0}}}, {"theta", {1.0, 1.0}}}},
        {"sensor_y", {{"H", {{1.0}, {0.0}}}, {"theta", {1.0}}}}};
    CHECK_THROWS_AS(run_config_from_json(ragged), config_error);
    nlohmann::json half = {{"sensor_x", {{"H", {{1.0}, {0.0}}}, {"theta", {1.0}}}}};
    CHECK_THROWS_AS(run_config_from_json(half), config_error);
    nlohmann::json badkey = {
        {"sensor_x",
         {{"H", {{1.0}, {0.0}}}, {"theta", {1.0}}, {"colour", 3}}},
        {"sensor_y", {{"H", {{1.0}, {0.0}}}, {"theta", {1.0}}}}};
    CHECK_THROWS_AS(run_config_from_json(badkey), config_error);
}

TEST_CASE("reference_model degrees of freedom under both readings") {
    const auto def = reference_model(false, 15.0, 15.0);
    CHECK(def.sensor_x.samples() == 6);
    CHECK(def.sensor_x.param_count() == 2);
    CHECK(def.sensor_y.samples() == 16);
    CHECK(def.sensor_y.param_count() == 3);
    const auto lit = reference_model(true, 15.0, 15.0);
    CHECK(lit.sensor_x.param_count() == 4);
    CHECK(lit.sensor_y.param_count() == 13);
}

TEST_CASE("cli eval-g success and error paths") {
    auto r = run_cli("eval-g --m 1 --n 0 --p 0 --q 1 --b 0 --x 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.substr(0, 11) == "0.367879441");
    // Beta kernel point.
    r = run_cli("eval-g --m 1 --n 0 --p 1 --q 1 --a 3 --b 1 --x 0.5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.substr(0, 4) == "0.25");
    // Unsupported class: p = q with both pole families at x = 1 under the
    // series-only strategy.
    r = run_cli(
        "eval-g --m 1 --n 1 --p 1 --q 1 --a 0.4 --b 0 --x 1 --strategy series");
    CHECK(r.exit_code == 2);
    // Usage error.
    r = run_cli("eval-g --m 1");
    CHECK(r.exit_code == 1);
}

TEST_CASE("cli threshold closed form") {
    // Single-sensor threshold with c = d = 2 at alpha = 0.01 is exactly 100
    // on a 4-sample, 2-parameter model.
    std::ofstream cfg("cli_test_cfg.tmp.json");
    cfg << R"({"sensor_x": {"H": [[1,0],[0,1],[0,0],[0,0]], "theta": [1.0, 1.0]},
               "sensor_y": {"H": [[1,0],[0,1],[0,0],[0,0]], "theta": [1.0, 1.0]},
               "alpha": 0.01})";
    cfg.close();
    auto r = run_cli("threshold --config cli_test_cfg.tmp.json --mode single-x");
    std::remove("cli_test_cfg.tmp.json");
    CHECK(r.exit_code == 0);
    CHECK(std::stod(r.out) == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("cli pd-curve emits the documented columns") {
    auto r = run_cli("pd-curve --lambda-grid 5 15 --alpha 0.01");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "lambda_x,lambda_y,pd_fused,pd_single_x,pd_single_y,error");
    std::string row5, row15;
    std::getline(lines, row5);
    std::getline(lines, row15);
    auto field = [](const std::string& row, int idx) {
        std::istringstream ss(row);
        std::string f;
        for (int i = 0; i <= idx; ++i) std::getline(ss, f, ',');
        return std::stod(f);
    };
    // Monotone in lambda, and fusion beats both singles at lambda = 15.
    CHECK(field(row15, 2) > field(row5, 2));
    CHECK(field(row15, 2) > field(row15, 3));
    CHECK(field(row15, 2) > field(row15, 4));
}

TEST_CASE("cli roc table is monotone") {
    auto r = run_cli("roc --alpha-grid 0.2 0.05 0.01 --lambda-x 15 --lambda-y 15");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "gamma,pfa,pd");
    double prev_gamma = 0.0, prev_pfa = 2.0;
    std::string row;
    int rows = 0;
    while (std::getline(lines, row)) {
        std::istringstream ss(row);
        std::string g, pfa, pd;
        std::getline(ss, g, ',');
        std::getline(ss, pfa, ',');
        std::getline(ss, pd, ',');
        CHECK(std::stod(g) > prev_gamma);
        CHECK(std::stod(pfa) < prev_pfa);
        prev_gamma = std::stod(g);
        prev_pfa = std::stod(pfa);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("cli json output parses and carries 12 significant digits") {
    auto r = run_cli("pd-curve --lambda-grid 15 --format json");
    CHECK(r.exit_code == 0);
    const auto rows = nlohmann::json::parse(r.out);
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["pd_fused"].get<double>() > rows[0]["pd_single_y"].get<double>());
    // CSV numbers are emitted with 12 significant digits.
    auto c = run_cli("pd-curve --lambda-grid 15");
    std::istringstream lines(c.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::istringstream ss(row);
    std::string field;
    std::getline(ss, field, ',');
    std::getline(ss, field, ',');
    std::getline(ss, field, ',');  // pd_fused
    CHECK(field.size() >= 12);
}

TEST_CASE("cli verify reports a passing KS on the H0 law") {
    auto r = run_cli("verify --hypothesis h0 --trials 20000 --seed 12");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"].get<bool>());
    CHECK(j["ks"].get<double>() < j["critical"].get<double>());
}
