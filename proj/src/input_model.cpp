// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file input_model.cpp
//---------------------------------------------------------------------------//
#include "shapley/input_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_randist.h>

#include "shapley/errors.hpp"

namespace shapley
{
namespace
{
template<class... Ts>
struct Overload : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overload(Ts...) -> Overload<Ts...>;

void require_finite(double v, char const* what)
{
    if (!std::isfinite(v))
    {
        throw ParameterError(std::string(what) + " must be finite");
    }
}
}  // namespace

//---------------------------------------------------------------------------//
MarginalDistribution MarginalDistribution::uniform(double lo, double hi)
{
    require_finite(lo, "uniform lower bound");
    require_finite(hi, "uniform upper bound");
    if (!(lo < hi))
    {
        throw ParameterError("uniform distribution requires lo < hi");
    }
    return MarginalDistribution{Uniform{lo, hi}};
}

MarginalDistribution MarginalDistribution::normal(double mean, double cv)
{
    require_finite(mean, "normal mean");
    require_finite(cv, "normal cv");
    if (cv < 0)
    {
        throw ParameterError("normal distribution requires cv >= 0");
    }
    return MarginalDistribution{Normal{mean, std::abs(mean) * cv}};
}

MarginalDistribution MarginalDistribution::normal_sd(double mean, double sd)
{
    require_finite(mean, "normal mean");
    require_finite(sd, "normal standard deviation");
    if (sd < 0)
    {
        throw ParameterError("normal distribution requires sd >= 0");
    }
    return MarginalDistribution{Normal{mean, sd}};
}

MarginalDistribution MarginalDistribution::lognormal(double mean, double cv)
{
    require_finite(mean, "lognormal mean");
    require_finite(cv, "lognormal cv");
    if (!(mean > 0) || !(cv > 0))
    {
        throw ParameterError("lognormal distribution requires mean > 0 and "
                             "cv > 0");
    }
    double const var_ln = std::log1p(cv * cv);
    return MarginalDistribution{
        LogNormal{mean, cv, std::log(mean) - var_ln / 2, std::sqrt(var_ln)}};
}

double MarginalDistribution::inverse_cdf(double u) const
{
    if (!(u > 0 && u < 1))
    {
        throw DomainError("inverse_cdf requires u in (0, 1), got "
                          + std::to_string(u));
    }
    return std::visit(
        Overload{
            [u](Uniform const& d) {
                double const x = d.lo + (d.hi - d.lo) * u;
                // Rounding may land on hi; the support is half-open
                return x < d.hi ? x : std::nextafter(d.hi, d.lo);
            },
            [u](Normal const& d) {
                if (d.sd == 0)
                    return d.mean;
                return d.mean + gsl_cdf_gaussian_Pinv(u, d.sd);
            },
            [u](LogNormal const& d) {
                return gsl_cdf_lognormal_Pinv(u, d.mu_ln, d.sigma_ln);
            },
        },
        kind_);
}

double MarginalDistribution::pdf(double x) const
{
    return std::visit(
        Overload{
            [x](Uniform const& d) {
                return (x >= d.lo && x <= d.hi) ? 1 / (d.hi - d.lo) : 0.0;
            },
            [x](Normal const& d) {
                if (d.sd == 0)
                    throw DomainError("degenerate normal has no density");
                return gsl_ran_gaussian_pdf(x - d.mean, d.sd);
            },
            [x](LogNormal const& d) {
                return x > 0 ? gsl_ran_lognormal_pdf(x, d.mu_ln, d.sigma_ln)
                             : 0.0;
            },
        },
        kind_);
}

double MarginalDistribution::mean() const
{
    return std::visit(
        Overload{
            [](Uniform const& d) { return (d.lo + d.hi) / 2; },
            [](Normal const& d) { return d.mean; },
            [](LogNormal const& d) { return d.mean; },
        },
        kind_);
}

double MarginalDistribution::variance() const
{
    return std::visit(
        Overload{
            [](Uniform const& d) {
                return (d.hi - d.lo) * (d.hi - d.lo) / 12;
            },
            [](Normal const& d) { return d.sd * d.sd; },
            [](LogNormal const& d) {
                return d.mean * d.cv * d.mean * d.cv;
            },
        },
        kind_);
}

//---------------------------------------------------------------------------//
InputSpace::InputSpace(std::vector<MarginalDistribution> marginals)
    : marginals_(std::move(marginals))
{
    if (marginals_.empty())
    {
        throw ParameterError("input space needs at least one variable");
    }
}

InputSpace InputSpace::uniform_cube(std::size_t d, double lo, double hi)
{
    return InputSpace(std::vector<MarginalDistribution>(
        d, MarginalDistribution::uniform(lo, hi)));
}

//---------------------------------------------------------------------------//
Permutation::Permutation(std::size_t d) : order_(d)
{
    for (std::size_t i = 0; i < d; ++i)
        order_[i] = i;
}

Permutation::Permutation(std::vector<std::size_t> order)
    : order_(std::move(order))
{
    std::vector<bool> seen(order_.size(), false);
    for (auto v : order_)
    {
        if (v >= order_.size() || seen[v])
        {
            throw ParameterError("permutation is not a bijection");
        }
        seen[v] = true;
    }
}

//---------------------------------------------------------------------------//
namespace
{
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    return std::mt19937_64(seq);
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id))
{
}

double RngStream::uniform_open()
{
    // Midpoints of 2^52 equal cells; k + 0.5 is exact, so never 0 or 1
    auto const k = engine_() >> 12;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-52;
}

std::size_t RngStream::below(std::size_t bound)
{
    std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
    return dist(engine_);
}

//---------------------------------------------------------------------------//
SampleMatrix sample_matrix(InputSpace const& space, std::size_t n,
                           RngStream& rng)
{
    if (n == 0)
    {
        throw ParameterError("sample_matrix requires n >= 1");
    }
    std::size_t const d = space.dim();
    SampleMatrix result(n, d);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < d; ++j)
        {
            result(i, j) = space[j].inverse_cdf(rng.uniform_open());
        }
    }
    return result;
}

Permutation random_permutation(std::size_t d, RngStream& rng)
{
    if (d == 0)
    {
        throw ParameterError("random_permutation requires d >= 1");
    }
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i)
        order[i] = i;
    for (std::size_t i = d - 1; i > 0; --i)
    {
        std::swap(order[i], order[rng.below(i + 1)]);
    }
    return Permutation(std::move(order));
}

double inverse_cdf(MarginalDistribution const& dist, double u)
{
    return dist.inverse_cdf(u);
}

}  // namespace shapley
