// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file config.test.cpp
//---------------------------------------------------------------------------//
#include <sstream>

#include <doctest.h>

#include "shapley/config.hpp"
#include "shapley/errors.hpp"
#include "shapley/report.hpp"

using namespace shapley;
using nlohmann::json;

TEST_SUITE("config")
{
TEST_CASE("defaults follow the model")
{
    auto cfg = AnalysisConfig::from_json(
        json::parse(R"({"model": {"name": "ishigami"}, "n": 64, "seed": 3})"));
    CHECK(cfg.model.dimension() == 3);
    CHECK(cfg.distributions.size() == 3);
    CHECK(cfg.default_distributions());
    CHECK_NOTHROW(cfg.validate());
    REQUIRE(exact_indices(cfg));

    auto sg = AnalysisConfig::from_json(
        json::parse(R"({"model": {"name": "sobol-g"}})"));
    CHECK(sg.model.dimension() == 10);
    CHECK(sg.model.sobol_g.a[9] == 9);

    auto pb = AnalysisConfig::from_json(
        json::parse(R"({"model": {"name": "plate-buckling"}})"));
    CHECK(pb.distributions.size() == 6);
    CHECK_FALSE(exact_indices(pb));
    CHECK(build_space(pb)[4].mean() == doctest::Approx(0.35));
}

TEST_CASE("unknown keys are rejected")
{
    CHECK_THROWS_AS(AnalysisConfig::from_json(json::parse(
                        R"({"model": {"name": "ishigami"}, "sede": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_json(json::parse(
                        R"({"model": {"name": "ishigami", "c": 1}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_marginal(json::parse(
                        R"({"kind": "uniform", "lo": 0, "hi": 1, "h": 2})")),
                    ConfigError);
}

TEST_CASE("distribution specs")
{
    auto n = parse_marginal(
        json::parse(R"({"kind": "normal", "mean": 10, "cv": 0.1})"));
    CHECK(std::sqrt(n.variance()) == doctest::Approx(1));
    auto s = parse_marginal(
        json::parse(R"({"kind": "normal", "mean": 10, "sd": 2})"));
    CHECK(std::sqrt(s.variance()) == doctest::Approx(2));
    CHECK_THROWS_AS(parse_marginal(json::parse(
                        R"({"kind": "normal", "mean": 1, "sd": 1, "cv": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_marginal(json::parse(R"({"kind": "uniform", "lo": 1, "hi": 0})")),
        ConfigError);
    CHECK_THROWS_AS(parse_marginal(json::parse(R"({"kind": "beta"})")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_marginal(json::parse(R"({"kind": "uniform", "lo": "0", "hi": 1})")),
        ConfigError);
}

TEST_CASE("validation")
{
    auto base = json::parse(R"({"model": {"name": "ishigami"}})");

    auto j = base;
    j["distributions"] = json::array({{{"kind", "uniform"}, {"lo", 0}, {"hi", 1}}});
    CHECK_THROWS_AS(AnalysisConfig::from_json(j).validate(), ConfigError);

    j = base;
    j["n"] = 1;
    CHECK_THROWS_AS(AnalysisConfig::from_json(j).validate(), ConfigError);

    j = base;
    j["estimator"] = "sobol";
    CHECK_THROWS_AS(AnalysisConfig::from_json(j), ConfigError);

    j = base;
    j["seed"] = -4;
    CHECK_THROWS_AS(AnalysisConfig::from_json(j), ConfigError);

    CHECK_THROWS_AS(AnalysisConfig{}.validate(), ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_file("/nonexistent/config.json"),
                    ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_json(json::parse(
                        R"({"model": {"name": "sobol-g", "a": [0], "d": 1}})")),
                    ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_json(json::parse(
                        R"({"model": {"name": "external", "dim": 2}})")),
                    ConfigError);
}

TEST_CASE("non-default inputs disable exact indices")
{
    auto cfg = AnalysisConfig::from_json(json::parse(R"({
        "model": {"name": "sobol-g", "a": [0, 1]},
        "distributions": [{"kind": "uniform", "lo": 0, "hi": 1},
                          {"kind": "uniform", "lo": 0, "hi": 2}]})"));
    CHECK_NOTHROW(cfg.validate());
    CHECK_FALSE(exact_indices(cfg));
}

TEST_CASE("json round trip")
{
    auto cfg = AnalysisConfig::from_json(json::parse(R"({
        "model": {"name": "ishigami", "a": 5, "b": 0.2},
        "estimator": "shapley-winding", "cyclic": true, "n": 300,
        "seed": 18446744073709551615, "trials": 4, "ns": [8, 16],
        "ci_z": 2.5, "workers": 3, "format": "csv"})"));
    CHECK(cfg.seed == 18446744073709551615ull);
    auto again = AnalysisConfig::from_json(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());
    CHECK(again.model.ishigami.a == 5);
    CHECK(again.estimator == EstimatorKind::shapley_winding);
    CHECK(again.format == OutputFormat::csv);
}

TEST_CASE("analysis report")
{
    auto cfg = AnalysisConfig::from_json(
        json::parse(R"({"model": {"name": "ishigami"}, "n": 128, "seed": 9})"));
    auto f = build_model(cfg.model);
    EstimatorConfig ec{cfg.n, cfg.seed, 1, cfg.ci_z};
    auto r = estimate_shapley_all(f, build_space(cfg), ec);
    auto j = analysis_report_json(cfg, r, 0.5);
    CHECK(j["eval_count"] == 512);
    CHECK(j["seed"] == 9);
    REQUIRE(j["results"].size() == 3);
    CHECK(j["results"][0]["variable"] == 1);
    CHECK(j["results"][2]["estimate"].get<double>() == r.estimates[2]);
    CHECK(j["config"] == cfg.to_json());
    CHECK(j["version"] == std::string(library_version()));

    std::ostringstream csv;
    write_analysis_csv(csv, j);
    CHECK(csv.str().rfind("variable,estimate,variance,ci_low,ci_high\n1,", 0)
          == 0);

    auto w = estimate_shapley_winding(f, build_space(cfg), ec);
    auto jw = analysis_report_json(cfg, w, 0.1);
    CHECK(jw["results"][0]["variance"].is_null());
    CHECK(jw["results"][0]["ci_low"].is_null());
}
}
