// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file external_model.test.cpp
//---------------------------------------------------------------------------//
#include <array>
#include <numbers>
#include <string>

#include <doctest.h>

#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/models.hpp"

using namespace shapley;

namespace
{
std::string toy(std::string const& args)
{
    return std::string("'") + TOY_MODEL_PATH + "' " + args;
}

std::optional<std::size_t> failing_line(ModelFunction const& f,
                                        std::span<double const> x)
{
    try
    {
        f(x);
    }
    catch (EvaluationError const& e)
    {
        return e.line();
    }
    return std::nullopt;
}
}  // namespace

TEST_SUITE("external_model")
{
TEST_CASE("echo first coordinate")
{
    auto f = make_external_model(toy("echo"), 2);
    CHECK_FALSE(f.concurrent());
    CHECK(f(std::array{0.3, 0.9}) == 0.3);
    CHECK(f(std::array{-1e-300, 5.0}) == -1e-300);
    CHECK(f(std::array{0.1 + 0.2, 0.0}) == 0.1 + 0.2);
    CHECK(f.eval_count() == 3);
}

TEST_CASE("constant process")
{
    auto f = make_external_model(toy("const 2.5"), 3);
    for (int i = 0; i < 5; ++i)
        CHECK(f(std::array{i * 1.0, 0.0, 1.0}) == 2.5);
}

TEST_CASE("ishigami process matches the builtin")
{
    auto f = make_external_model(toy("ishigami"), 3);
    auto g = make_ishigami();
    using std::numbers::pi;
    CHECK(f(std::array{pi / 2, pi / 2, 1.0}) == doctest::Approx(8.1));
    std::array x{0.3, -2.1, 1.7};
    CHECK(f(x) == doctest::Approx(g(x)).epsilon(1e-14));
}

TEST_CASE("malformed reply reports its line")
{
    auto f = make_external_model(toy("bad 2"), 1);
    CHECK(f(std::array{0.5}) == 0.5);
    CHECK(failing_line(f, std::array{0.5}) == std::size_t{2});
}

TEST_CASE("trailing garbage is malformed")
{
    auto f = make_external_model(toy("garbage"), 1);
    CHECK(failing_line(f, std::array{0.5}) == std::size_t{1});
}

TEST_CASE("early exit")
{
    auto f = make_external_model(toy("exit 2"), 1);
    CHECK(f(std::array{0.5}) == 0.5);
    auto line = failing_line(f, std::array{0.5});
    CHECK(line == std::size_t{2});
}

TEST_CASE("estimators drive external models on one worker")
{
    auto f = make_external_model(toy("echo"), 2);
    EstimatorConfig cfg;
    cfg.n = 600;
    cfg.seed = 12;
    cfg.workers = 4;
    auto r = estimate_shapley_all(f, InputSpace::uniform_cube(2, 0, 1), cfg);
    CHECK(r.eval_count == 3 * 600);
    CHECK(r.estimates[1] == 0);
    CHECK(r.estimates[0] == doctest::Approx(1.0 / 12).epsilon(0.25));

    auto builtin = estimate_shapley_all(
        ModelFunction(2, [](auto x) { return x[0]; }),
        InputSpace::uniform_cube(2, 0, 1), cfg);
    CHECK(builtin.estimates == r.estimates);
}

TEST_CASE("dimension mismatch")
{
    auto f = make_external_model("cat", 2);
    CHECK_THROWS_AS(f(std::array{1.0}), ParameterError);
    CHECK_THROWS_AS(make_external_model("", 2), ParameterError);
    CHECK_THROWS_AS(make_external_model("cat", 0), ParameterError);
}
}
