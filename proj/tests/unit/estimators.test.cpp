// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file estimators.test.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "shapley/analysis.hpp"
#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/reference.hpp"

using namespace shapley;
using shapley_test::rel_err;

namespace
{
struct MeanSe
{
    double mean = 0;
    double se = 0;
};

MeanSe mean_se(std::vector<double> const& v)
{
    double const n = static_cast<double>(v.size());
    double m = 0;
    for (double x : v)
        m += x;
    m /= n;
    double ss = 0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1) / n)};
}

double sample_variance(std::vector<double> const& v)
{
    auto ms = mean_se(v);
    return ms.se * ms.se * static_cast<double>(v.size());
}

ModelFunction coordinate(std::size_t d, std::size_t j)
{
    return ModelFunction(d, [j](auto x) { return x[j]; });
}

EstimatorConfig config(std::size_t n, std::uint64_t seed,
                       std::size_t workers = 1)
{
    EstimatorConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    cfg.workers = workers;
    return cfg;
}
}  // namespace

TEST_SUITE("estimators")
{
TEST_CASE("increment algebra")
{
    CHECK(pickfreeze_increment(3.5, 3.5, 3.5) == 0);
    CHECK(pickfreeze_increment(1, 1, 0) == 0.5);
    CHECK(pickfreeze_increment(0.2, 0.2, 0.6) == doctest::Approx(0.08));

    RngStream rng(8, 0);
    for (int i = 0; i < 1000; ++i)
    {
        double const f = 10 * rng.uniform_open() - 5;
        double const fm = 10 * rng.uniform_open() - 5;
        double const fp = 10 * rng.uniform_open() - 5;
        double const alt = (f - fp) * (f - fp) / 2 - (f - fm) * (f - fm) / 2;
        REQUIRE(pickfreeze_increment(f, fm, fp)
                == doctest::Approx(alt).epsilon(1e-12).scale(25));
    }
    double const nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pickfreeze_increment(nan, 0, 0), EvaluationError);
    CHECK_THROWS_AS(pickfreeze_increment(0, INFINITY, 0), EvaluationError);
}

TEST_CASE("constant model gives exact zeros")
{
    auto f = make_constant(3, 2.0);
    auto space = InputSpace::uniform_cube(3, 0, 1);
    auto cfg = config(1000, 5);

    auto r = estimate_shapley_all(f, space, cfg);
    for (std::size_t j = 0; j < 3; ++j)
    {
        CHECK(r.estimates[j] == 0);
        CHECK(r.variance_of_estimator[j] == 0);
        CHECK(r.ci_low[j] == 0);
        CHECK(r.ci_high[j] == 0);
    }
    CHECK(r.sigma2_estimate == 0);
    CHECK(r.half_square_mean == 0);

    f.reset_count();
    auto w = estimate_shapley_winding(f, space, cfg);
    CHECK(w.estimates == std::vector<double>(3, 0.0));
    CHECK(w.eval_count == 3 * 1000 + 1);
    CHECK_FALSE(w.variance_available());

    auto m = estimate_main_effects(f, space, cfg);
    auto t = estimate_total_effects(f, space, cfg);
    CHECK(m.values == std::vector<double>(3, 0.0));
    CHECK(t.values == std::vector<double>(3, 0.0));
    CHECK(t.variance_of_estimator == std::vector<double>(3, 0.0));
}

TEST_CASE("absent coordinates receive exact zeros")
{
    auto f = coordinate(3, 1);
    auto space = InputSpace::uniform_cube(3, 0, 1);
    auto r = estimate_shapley_all(f, space, config(4096, 11));
    CHECK(r.estimates[0] == 0);
    CHECK(r.estimates[2] == 0);
    CHECK(r.variance_of_estimator[0] == 0);
    CHECK(r.variance_of_estimator[2] == 0);
    CHECK(r.estimates[1] == doctest::Approx(1.0 / 12).epsilon(0.05));

    auto w = estimate_shapley_winding(f, space, config(4096, 11));
    CHECK(w.estimates[0] == 0);
    CHECK(w.estimates[2] == 0);
}

TEST_CASE("additive function")
{
    auto f = ModelFunction(2, [](auto x) { return x[0] + x[1]; });
    auto space = InputSpace::uniform_cube(2, 0, 1);
    auto r = estimate_shapley_all(f, space, config(1 << 16, 1));
    for (std::size_t j = 0; j < 2; ++j)
    {
        CHECK(r.estimates[j] == doctest::Approx(1.0 / 12).epsilon(0.02));
        CHECK(r.ci_low[j] <= 1.0 / 12);
        CHECK(1.0 / 12 <= r.ci_high[j]);
    }

    int covered = 0, runs = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        auto s = estimate_shapley_all(f, space, config(1024, 1000 + seed));
        for (std::size_t j = 0; j < 2; ++j, ++runs)
            covered += s.ci_low[j] <= 1.0 / 12 && 1.0 / 12 <= s.ci_high[j];
    }
    CHECK(std::abs(covered / double(runs) - 0.95) <= 0.04);
}

TEST_CASE("ishigami run covers the exact values")
{
    auto f = make_ishigami();
    auto exact = ishigami_exact({});
    auto r = estimate_shapley_all(f, ishigami_space(), config(1 << 14, 1));
    CHECK(r.eval_count == 4 * (1 << 14));
    for (std::size_t j = 0; j < 3; ++j)
    {
        CAPTURE(j);
        CHECK(r.ci_low[j] <= exact.shapley[j]);
        CHECK(exact.shapley[j] <= r.ci_high[j]);
        CHECK(r.ci_low[j] <= r.estimates[j]);
        CHECK(r.estimates[j] <= r.ci_high[j]);
        CHECK(r.credits[j] == 1 << 14);
    }
}

TEST_CASE("report bookkeeping")
{
    auto f = make_sobol_g(SobolGParams::ascending(6));
    auto r = estimate_shapley_all(f, sobol_g_space(6), config(1000, 3));
    double sum = 0;
    for (double e : r.estimates)
        sum += e;
    CHECK(r.sigma2_estimate == sum);
    CHECK(rel_err(r.sigma2_estimate, r.half_square_mean) <= 1e-10);
    CHECK(r.credits == std::vector<std::uint64_t>(6, 1000));
    CHECK(r.seed == 3);
    CHECK(r.n == 1000);
    CHECK(r.d == 6);

    auto cfg = config(1000, 3);
    cfg.ci_z = 3;
    auto wide = estimate_shapley_all(f, sobol_g_space(6), cfg);
    CHECK(wide.estimates == r.estimates);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(wide.ci_high[j] - wide.estimates[j]
              == doctest::Approx(3 * std::sqrt(r.variance_of_estimator[j])));
}

TEST_CASE("telescoping on every builtin")
{
    std::vector<std::pair<ModelFunction, InputSpace>> cases;
    cases.emplace_back(make_ishigami(), ishigami_space());
    cases.emplace_back(make_sobol_g(SobolGParams::ascending(10)),
                       sobol_g_space(10));
    cases.emplace_back(make_plate_buckling(), plate_buckling_space());
    for (auto& [f, space] : cases)
    {
        auto r = estimate_shapley_all(f, space, config(1024, 77));
        CHECK(rel_err(r.sigma2_estimate, r.half_square_mean) <= 1e-10);
    }
}

TEST_CASE("evaluation costs")
{
    for (std::size_t d : {1u, 3u, 10u})
    {
        for (std::size_t n : {2u, 100u})
        {
            CAPTURE(d);
            CAPTURE(n);
            auto f = make_sobol_g(SobolGParams::ascending(d));
            auto space = sobol_g_space(d);
            CHECK(estimate_shapley_all(f, space, config(n, 1)).eval_count
                  == (d + 1) * n);
            CHECK(estimate_shapley_winding(f, space, config(n, 1))
                      .eval_count
                  == d * n + 1);
            CHECK(estimate_shapley_winding(f, space, config(n, 1), true)
                      .eval_count
                  == d * n);
            CHECK(estimate_main_effects(f, space, config(n, 1)).eval_count
                  == (d + 2) * n);
            CHECK(estimate_total_effects(f, space, config(n, 1)).eval_count
                  == (d + 1) * n);
            CHECK(f.eval_count()
                  == (d + 1) * n + (d * n + 1) + d * n + (d + 2) * n
                         + (d + 1) * n);
        }
    }
}

TEST_CASE("results do not depend on the worker count")
{
    auto f = make_ishigami();
    auto space = ishigami_space();
    std::size_t const n = 5000;  // spans a partial final chunk
    auto a = estimate_shapley_all(f, space, config(n, 9, 1));
    auto b = estimate_shapley_all(f, space, config(n, 9, 4));
    CHECK(a.estimates == b.estimates);
    CHECK(a.variance_of_estimator == b.variance_of_estimator);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    CHECK(a.sigma2_estimate == b.sigma2_estimate);
    CHECK(a.half_square_mean == b.half_square_mean);

    for (bool cyclic : {false, true})
    {
        auto wa = estimate_shapley_winding(f, space, config(n, 9, 1), cyclic);
        auto wb = estimate_shapley_winding(f, space, config(n, 9, 3), cyclic);
        CHECK(wa.estimates == wb.estimates);
    }
    auto ma = estimate_main_effects(f, space, config(n, 9, 1));
    auto mb = estimate_main_effects(f, space, config(n, 9, 4));
    CHECK(ma.values == mb.values);
    CHECK(ma.variance_of_estimator == mb.variance_of_estimator);
    auto ta = estimate_total_effects(f, space, config(n, 9, 1));
    auto tb = estimate_total_effects(f, space, config(n, 9, 2));
    CHECK(ta.values == tb.values);

    auto c = estimate_shapley_all(f, space, config(n, 10, 1));
    CHECK(c.estimates != a.estimates);
}

TEST_CASE("unbiased over many seeds")
{
    auto f = make_ishigami();
    auto exact = ishigami_exact({});
    std::vector<std::vector<double>> per_var(3);
    std::vector<double> totals;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        auto r = estimate_shapley_all(f, ishigami_space(),
                                      config(1024, 0x5eed0000 + seed));
        for (std::size_t j = 0; j < 3; ++j)
            per_var[j].push_back(r.estimates[j]);
        totals.push_back(r.sigma2_estimate);
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
        auto ms = mean_se(per_var[j]);
        CAPTURE(j);
        CHECK(std::abs(ms.mean - exact.shapley[j]) <= 4 * ms.se);
    }
    auto ms = mean_se(totals);
    CHECK(std::abs(ms.mean - exact.sigma2) <= 4 * ms.se);
}

TEST_CASE("estimator variance decays as 1/N")
{
    auto f = make_ishigami();
    std::vector<double> ns, var;
    for (std::size_t k = 8; k <= 14; ++k)
    {
        std::size_t const n = std::size_t{1} << k;
        std::vector<double> est;
        for (std::uint64_t r = 0; r < 40; ++r)
            est.push_back(
                estimate_shapley_all(f, ishigami_space(),
                                     config(n, trial_seed(17, n, r)))
                    .estimates[0]);
        ns.push_back(double(n));
        var.push_back(sample_variance(est));
    }
    auto slope = fit_loglog_slope(ns, var);
    REQUIRE(slope);
    CHECK(std::abs(*slope + 1) <= 0.2);
}

TEST_CASE("variance estimate matches the spread across seeds")
{
    auto f = make_ishigami();
    std::size_t const n = 1 << 12;
    std::vector<std::vector<double>> est(3);
    std::vector<double> mean_var(3, 0.0);
    std::size_t const runs = 400;
    for (std::uint64_t r = 0; r < runs; ++r)
    {
        auto rep = estimate_shapley_all(f, ishigami_space(),
                                        config(n, trial_seed(23, n, r)));
        for (std::size_t j = 0; j < 3; ++j)
        {
            est[j].push_back(rep.estimates[j]);
            mean_var[j] += rep.variance_of_estimator[j] / runs;
        }
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
        CAPTURE(j);
        CHECK(rel_err(mean_var[j], sample_variance(est[j])) <= 0.2);
    }
}

TEST_CASE("winding stairs on a single coordinate")
{
    auto f = coordinate(1, 0);
    auto space = InputSpace::uniform_cube(1, 0, 1);
    std::vector<double> est;
    for (std::uint64_t s = 0; s < 30; ++s)
        est.push_back(
            estimate_shapley_winding(f, space, config(1 << 16, 100 + s))
                .estimates[0]);
    auto ms = mean_se(est);
    CHECK(std::abs(ms.mean - 1.0 / 12) <= 3 * ms.se);
}

TEST_CASE("winding stairs on ishigami")
{
    auto f = make_ishigami();
    std::vector<double> totals;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        auto r = estimate_shapley_winding(f, ishigami_space(),
                                          config(1 << 14, 200 + s));
        CHECK(rel_err(r.sigma2_estimate, r.half_square_mean) <= 1e-10);
        totals.push_back(r.sigma2_estimate);
    }
    auto ms = mean_se(totals);
    CHECK(std::abs(ms.mean - ishigami_exact({}).sigma2) <= 3 * ms.se);
}

TEST_CASE("winding stairs agrees with independent pairs")
{
    auto p = SobolGParams::ascending(5);
    auto f = make_sobol_g(p);
    std::vector<std::vector<double>> wind(5), indep(5);
    for (std::uint64_t s = 0; s < 30; ++s)
    {
        auto w = estimate_shapley_winding(f, sobol_g_space(5),
                                          config(4096, 300 + s), s % 2);
        auto a = estimate_shapley_all(f, sobol_g_space(5),
                                      config(4096, 300 + s));
        for (std::size_t j = 0; j < 5; ++j)
        {
            wind[j].push_back(w.estimates[j]);
            indep[j].push_back(a.estimates[j]);
        }
    }
    for (std::size_t j = 0; j < 5; ++j)
    {
        auto mw = mean_se(wind[j]);
        auto ma = mean_se(indep[j]);
        CAPTURE(j);
        CHECK(std::abs(mw.mean - ma.mean)
              <= 3 * std::hypot(mw.se, ma.se));
    }
}

TEST_CASE("main effects")
{
    auto f = coordinate(2, 0);
    auto r = estimate_main_effects(f, InputSpace::uniform_cube(2, 0, 1),
                                   config(1 << 16, 4));
    CHECK(r.kind == EffectKind::main);
    CHECK(r.values[0] == doctest::Approx(1.0 / 12).epsilon(0.03));
    CHECK(r.values[1] == 0);
    REQUIRE(r.sigma2_estimate);

    auto g = make_ishigami();
    auto exact = ishigami_exact({});
    std::vector<std::vector<double>> est(3);
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        auto m = estimate_main_effects(g, ishigami_space(),
                                       config(1 << 16, 400 + s));
        for (std::size_t j = 0; j < 3; ++j)
            est[j].push_back(m.values[j]);
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
        auto ms = mean_se(est[j]);
        CAPTURE(j);
        CHECK(std::abs(ms.mean - exact.main[j]) <= 3 * ms.se);
    }
}

TEST_CASE("total effects")
{
    auto f = coordinate(2, 1);
    auto r = estimate_total_effects(f, InputSpace::uniform_cube(2, 0, 1),
                                    config(1 << 16, 4));
    CHECK(r.kind == EffectKind::total);
    CHECK(r.values[0] == 0);
    CHECK(r.variance_of_estimator[0] == 0);
    CHECK(r.values[1] == doctest::Approx(1.0 / 12).epsilon(0.03));
    CHECK_FALSE(r.sigma2_estimate);

    auto g = make_ishigami();
    auto exact = ishigami_exact({});
    std::vector<std::vector<double>> est(3);
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        auto t = estimate_total_effects(g, ishigami_space(),
                                        config(1 << 16, 500 + s));
        for (std::size_t j = 0; j < 3; ++j)
        {
            CHECK(t.values[j] >= 0);
            est[j].push_back(t.values[j]);
        }
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
        auto ms = mean_se(est[j]);
        CAPTURE(j);
        CHECK(std::abs(ms.mean - exact.total[j]) <= 3 * ms.se);
    }
}

TEST_CASE("estimates are not clamped")
{
    // Tiny weights on the trailing variables make negative estimates likely
    auto f = make_sobol_g(SobolGParams::ascending(10));
    bool negative = false;
    for (std::uint64_t s = 0; s < 20 && !negative; ++s)
    {
        auto r = estimate_shapley_all(f, sobol_g_space(10), config(64, s));
        for (double e : r.estimates)
            negative = negative || e < 0;
    }
    CHECK(negative);
}

TEST_CASE("non-finite outputs abort with the sample index")
{
    std::size_t calls = 0;
    auto f = ModelFunction(
        2,
        [&calls](auto x) {
            return ++calls == 700 ? std::nan("") : x[0];
        },
        false);
    try
    {
        estimate_shapley_all(f, InputSpace::uniform_cube(2, 0, 1),
                             config(1000, 1));
        FAIL("expected an evaluation error");
    }
    catch (EvaluationError const& e)
    {
        REQUIRE(e.sample());
        CHECK(*e.sample() == 699 / 3);
        CHECK(std::string(e.what()).find("x = (") != std::string::npos);
    }
}

TEST_CASE("model exceptions become evaluation errors")
{
    auto f = make_plate_buckling();
    InputSpace space({MarginalDistribution::uniform(-1, 1),
                      MarginalDistribution::uniform(0.5, 1),
                      MarginalDistribution::uniform(1, 2),
                      MarginalDistribution::uniform(1, 2),
                      MarginalDistribution::uniform(0, 1),
                      MarginalDistribution::uniform(0, 1)});
    CHECK_THROWS_AS(estimate_shapley_all(f, space, config(100, 1, 2)),
                    EvaluationError);
    CHECK_THROWS_AS(estimate_total_effects(f, space, config(100, 1)),
                    EvaluationError);
}

TEST_CASE("argument validation")
{
    auto f = make_ishigami();
    auto space = ishigami_space();
    CHECK_THROWS_AS(estimate_shapley_all(f, space, config(1, 1)),
                    ParameterError);
    CHECK_THROWS_AS(estimate_shapley_all(f, space, config(10, 1, 0)),
                    ParameterError);
    CHECK_THROWS_AS(
        estimate_shapley_all(f, InputSpace::uniform_cube(2, 0, 1),
                             config(10, 1)),
        ParameterError);
    auto cfg = config(10, 1);
    cfg.ci_z = 0;
    CHECK_THROWS_AS(estimate_shapley_all(f, space, cfg), ParameterError);
    CHECK_THROWS_AS(estimate_shapley_winding(f, space, config(1, 1)),
                    ParameterError);
    CHECK_THROWS_AS(estimate_main_effects(f, space, config(0, 1)),
                    ParameterError);
}
}
