// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file models.test.cpp
//---------------------------------------------------------------------------//
#include <array>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <doctest.h>

#include "shapley/errors.hpp"
#include "shapley/models.hpp"

using namespace shapley;
using std::numbers::pi;

TEST_SUITE("models")
{
TEST_CASE("ishigami values")
{
    IshigamiParams p;
    CHECK(ishigami(p, std::array{pi / 2, 0.0, 0.0}) == doctest::Approx(1));
    CHECK(ishigami(p, std::array{0.0, pi / 2, 5.0}) == doctest::Approx(7));
    CHECK(ishigami(p, std::array{pi / 2, pi / 2, 1.0})
          == doctest::Approx(8.1));
}

TEST_CASE("sobol g values")
{
    CHECK(sobol_g(SobolGParams{{0}}, std::array{0.0}) == 2);
    for (std::size_t d : {1u, 4u, 10u})
    {
        auto p = SobolGParams::ascending(d);
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = j % 2 ? 0.25 : 0.75;
        CHECK(sobol_g(p, x) == doctest::Approx(1).epsilon(1e-15));
    }
    std::vector<double> half(10, 0.5);
    CHECK(sobol_g(SobolGParams::ascending(10), half) == 0);
}

TEST_CASE("sobol g is non-negative")
{
    auto p = SobolGParams::ascending(6);
    RngStream rng(3, 0);
    auto m = sample_matrix(sobol_g_space(6), 1000, rng);
    for (std::size_t i = 0; i < m.rows(); ++i)
        REQUIRE(sobol_g(p, m.row(i)) >= 0);
}

TEST_CASE("plate buckling at the input means")
{
    std::array<double, 6> x{23.808, 0.525, 44.2, 28623, 0.35, 5.25};
    // mpmath at 30 digits
    CHECK(plate_slenderness(x) == doctest::Approx(1.78203885840279448));
    CHECK(plate_buckling(x) == doctest::Approx(0.586474014306218388));

    auto scaled = x;
    scaled[4] = plate_slenderness(x) / 0.75;
    CHECK(std::abs(plate_buckling(scaled)) < 1e-15);

    auto doubled = x;
    doubled[2] *= 2;
    doubled[3] *= 2;
    CHECK(plate_buckling(doubled) == plate_buckling(x));
}

TEST_CASE("plate buckling rejects non-positive geometry and material")
{
    std::array<double, 6> x{23.808, 0.525, 44.2, 28623, 0.35, 5.25};
    for (std::size_t j = 0; j < 4; ++j)
    {
        auto bad = x;
        bad[j] = 0;
        CHECK_THROWS_AS(plate_buckling(bad), DomainError);
        bad[j] = -1;
        CHECK_THROWS_AS(plate_buckling(bad), DomainError);
    }
    // Deflection and residual stress may be zero
    auto ok = x;
    ok[4] = 0;
    ok[5] = 0;
    CHECK(std::isfinite(plate_buckling(ok)));
}

TEST_CASE("plate buckling input space")
{
    auto space = plate_buckling_space();
    REQUIRE(space.dim() == 6);
    double const means[] = {23.808, 0.525, 44.2, 28623, 0.35, 5.25};
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(space[j].mean() == doctest::Approx(means[j]));
}

TEST_CASE("evaluation counting")
{
    auto f = make_ishigami();
    CHECK(f.dim() == 3);
    CHECK(f.eval_count() == 0);
    std::array<double, 3> x{0.1, 0.2, 0.3};
    double const first = f(x);
    CHECK(f(x) == first);
    CHECK(f.eval_count() == 2);
    f.reset_count();
    CHECK(f.eval_count() == 0);

    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&f, &x] {
            for (int i = 0; i < 1000; ++i)
                f(x);
        });
    for (auto& t : threads)
        t.join();
    CHECK(f.eval_count() == 4000);

    auto moved = std::move(f);
    CHECK(moved.eval_count() == 4000);
}

TEST_CASE("model argument errors")
{
    auto f = make_ishigami();
    CHECK_THROWS_AS(f(std::array{1.0, 2.0}), ParameterError);
    CHECK_THROWS_AS(make_sobol_g(SobolGParams{}), ParameterError);
    CHECK_THROWS_AS(make_sobol_g(SobolGParams{{0, -1}}), ParameterError);
    CHECK_THROWS_AS(make_constant(0, 1), ParameterError);
    auto c = make_constant(2, 3.5);
    CHECK(c(std::array{0.1, 0.9}) == 3.5);
}
}
