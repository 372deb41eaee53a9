// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file models.cpp
//---------------------------------------------------------------------------//
#include "shapley/models.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "shapley/errors.hpp"

namespace shapley
{
//---------------------------------------------------------------------------//
ModelFunction::ModelFunction(std::size_t dim, Eval eval, bool concurrent)
    : dim_(dim), eval_(std::move(eval)), concurrent_(concurrent)
{
    if (dim_ == 0)
    {
        throw ParameterError("model dimension must be at least 1");
    }
}

ModelFunction::ModelFunction(ModelFunction&& other) noexcept
    : dim_(other.dim_)
    , eval_(std::move(other.eval_))
    , concurrent_(other.concurrent_)
    , count_(other.count_.load())
{
}

double ModelFunction::operator()(std::span<double const> x) const
{
    if (x.size() != dim_)
    {
        throw ParameterError("model expects " + std::to_string(dim_)
                             + " inputs, got " + std::to_string(x.size()));
    }
    count_.fetch_add(1, std::memory_order_relaxed);
    return eval_(x);
}

//---------------------------------------------------------------------------//
SobolGParams SobolGParams::ascending(std::size_t d)
{
    SobolGParams p;
    p.a.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        p.a[j] = static_cast<double>(j);
    return p;
}

double ishigami(IshigamiParams const& p, std::span<double const> x)
{
    double const x3sq = x[2] * x[2];
    double const s2 = std::sin(x[1]);
    return (1 + p.b * x3sq * x3sq) * std::sin(x[0]) + p.a * s2 * s2;
}

double sobol_g(SobolGParams const& p, std::span<double const> x)
{
    double result = 1;
    for (std::size_t j = 0; j < x.size(); ++j)
    {
        result *= (std::abs(4 * x[j] - 2) + p.a[j]) / (1 + p.a[j]);
    }
    return result;
}

double plate_slenderness(std::span<double const> x)
{
    for (std::size_t j = 0; j < 4; ++j)
    {
        if (!(x[j] > 0))
        {
            throw DomainError("plate buckling requires positive x"
                              + std::to_string(j + 1) + ", got "
                              + std::to_string(x[j]));
        }
    }
    return x[0] / x[1] * std::sqrt(x[2] / x[3]);
}

double plate_buckling(std::span<double const> x)
{
    double const lambda = plate_slenderness(x);
    return (2.1 / lambda - 0.9 / (lambda * lambda))
           * (1 - 0.75 * x[4] / lambda) * (1 - 2 * x[1] * x[5] / x[0]);
}

//---------------------------------------------------------------------------//
ModelFunction make_ishigami(IshigamiParams p)
{
    if (!(p.a > 0) || !(p.b > 0))
    {
        throw ParameterError("ishigami requires a > 0 and b > 0");
    }
    return ModelFunction(
        3, [p](std::span<double const> x) { return ishigami(p, x); });
}

ModelFunction make_sobol_g(SobolGParams p)
{
    if (p.a.empty())
    {
        throw ParameterError("sobol-g requires at least one weight");
    }
    for (double a : p.a)
    {
        if (!(a >= 0) || !std::isfinite(a))
        {
            throw ParameterError("sobol-g weights must be finite and >= 0");
        }
    }
    auto const d = p.a.size();
    return ModelFunction(d, [p = std::move(p)](std::span<double const> x) {
        return sobol_g(p, x);
    });
}

ModelFunction make_plate_buckling()
{
    return ModelFunction(6, [](std::span<double const> x) {
        return plate_buckling(x);
    });
}

ModelFunction make_constant(std::size_t dim, double value)
{
    return ModelFunction(dim, [value](std::span<double const>) {
        return value;
    });
}

//---------------------------------------------------------------------------//
InputSpace ishigami_space()
{
    return InputSpace::uniform_cube(3, -std::numbers::pi, std::numbers::pi);
}

InputSpace sobol_g_space(std::size_t d)
{
    return InputSpace::uniform_cube(d, 0, 1);
}

InputSpace plate_buckling_space()
{
    using M = MarginalDistribution;
    return InputSpace({
        M::normal(23.808, 0.028),  // width
        M::lognormal(0.525, 0.044),  // thickness
        M::lognormal(44.2, 0.1235),  // yield stress
        M::normal(28623, 0.076),  // elastic modulus
        M::normal(0.35, 0.05),  // initial deflection
        M::normal(5.25, 0.07),  // residual stress
    });
}

}  // namespace shapley
