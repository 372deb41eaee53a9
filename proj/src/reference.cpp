// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file reference.cpp
//---------------------------------------------------------------------------//
#include "shapley/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>

#include "shapley/errors.hpp"

namespace shapley
{
namespace
{
std::size_t popcount(SubsetMask u)
{
    return static_cast<std::size_t>(std::popcount(u));
}

bool contains(SubsetMask u, std::size_t j)
{
    return (u >> j) & 1u;
}

std::vector<double> sobol_weights(SobolGParams const& p)
{
    std::vector<double> w(p.a.size());
    for (std::size_t j = 0; j < w.size(); ++j)
    {
        if (!(p.a[j] >= 0))
        {
            throw ParameterError("sobol-g weights must be >= 0");
        }
        w[j] = 1 / (3 * (1 + p.a[j]) * (1 + p.a[j]));
    }
    return w;
}

// Sum over subsets v of `others` of prod(v) / (|v| + 1). The binary recursion
// adds the two halves at every level, which is a pairwise summation tree.
double coalition_sum(std::span<double const> others, std::size_t idx,
                     double prod, std::size_t count)
{
    if (idx == others.size())
        return prod / static_cast<double>(count + 1);
    return coalition_sum(others, idx + 1, prod, count)
           + coalition_sum(others, idx + 1, prod * others[idx], count + 1);
}
}  // namespace

//---------------------------------------------------------------------------//
double pairwise_sum(std::span<double const> values)
{
    if (values.size() <= 8)
    {
        double s = 0;
        for (double v : values)
            s += v;
        return s;
    }
    auto const half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double AnovaDecomposition::total_variance() const
{
    return pairwise_sum(std::span(subset_variances).subspan(1));
}

//---------------------------------------------------------------------------//
SensitivityIndices ishigami_exact(IshigamiParams const& p)
{
    if (!(p.a > 0) || !(p.b > 0))
    {
        throw ParameterError("ishigami requires a > 0 and b > 0");
    }
    constexpr double pi = std::numbers::pi;
    double const pi4 = pi * pi * pi * pi;
    double const lead = 1 + pi4 * p.b / 5;
    double const main1 = lead * lead / 2;
    double const main2 = p.a * p.a / 8;
    // sigma^2_{13}: the only interaction
    double const inter = 8 * pi4 * pi4 * p.b * p.b / 225;

    SensitivityIndices r;
    r.d = 3;
    r.main = {main1, main2, 0};
    r.total = {main1 + inter, main2, inter};
    r.shapley = {main1 + inter / 2, main2, inter / 2};
    r.sigma2 = main1 + main2 + inter;
    r.mu = p.a / 2;
    return r;
}

SensitivityIndices sobol_g_exact(SobolGParams const& p)
{
    std::size_t const d = p.a.size();
    if (d == 0)
    {
        throw ParameterError("sobol-g requires at least one weight");
    }
    if (d > max_enumeration_dim)
    {
        throw CapacityError("sobol_g_exact enumerates 2^d subsets; d = "
                            + std::to_string(d) + " exceeds the limit of "
                            + std::to_string(max_enumeration_dim));
    }
    auto const w = sobol_weights(p);

    SensitivityIndices r;
    r.d = d;
    r.main = w;
    r.total.resize(d);
    r.shapley.resize(d);
    r.mu = 1;

    double log_prod = 0;
    for (double wj : w)
        log_prod += std::log1p(wj);
    r.sigma2 = std::expm1(log_prod);

    std::vector<double> others;
    others.reserve(d - 1);
    for (std::size_t j = 0; j < d; ++j)
    {
        others.clear();
        double rest = 0;
        for (std::size_t l = 0; l < d; ++l)
        {
            if (l == j)
                continue;
            others.push_back(w[l]);
            rest += std::log1p(w[l]);
        }
        r.total[j] = w[j] * std::exp(rest);
        r.shapley[j] = w[j] * coalition_sum(others, 0, 1.0, 0);
    }
    return r;
}

AnovaDecomposition sobol_g_anova(SobolGParams const& p)
{
    std::size_t const d = p.a.size();
    if (d == 0 || d > max_enumeration_dim)
    {
        throw CapacityError("sobol_g_anova supports 1 <= d <= "
                            + std::to_string(max_enumeration_dim));
    }
    auto const w = sobol_weights(p);

    AnovaDecomposition anova;
    anova.d = d;
    anova.mu = 1;
    anova.subset_variances.assign(std::size_t{1} << d, 0.0);
    auto& v = anova.subset_variances;
    v[0] = 1;
    for (SubsetMask u = 1; u < v.size(); ++u)
    {
        auto const low = static_cast<std::size_t>(std::countr_zero(u));
        v[u] = v[u & (u - 1)] * w[low];
    }
    v[0] = 0;
    return anova;
}

std::vector<double> shapley_from_anova(AnovaDecomposition const& anova)
{
    std::size_t const d = anova.d;
    std::size_t const count = std::size_t{1} << d;
    if (anova.subset_variances.size() != count)
    {
        throw ParameterError("subset variance table must have 2^d entries");
    }
    std::vector<double> phi(d);
    std::vector<double> terms;
    terms.reserve(count / 2);
    for (std::size_t j = 0; j < d; ++j)
    {
        terms.clear();
        for (SubsetMask u = 1; u < count; ++u)
        {
            if (contains(u, j))
            {
                terms.push_back(anova.subset_variances[u]
                                / static_cast<double>(popcount(u)));
            }
        }
        phi[j] = pairwise_sum(terms);
    }
    return phi;
}

SensitivityIndices indices_from_anova(AnovaDecomposition const& anova)
{
    std::size_t const d = anova.d;
    std::size_t const count = std::size_t{1} << d;
    SensitivityIndices r;
    r.d = d;
    r.mu = anova.mu;
    r.shapley = shapley_from_anova(anova);
    r.main.resize(d);
    r.total.resize(d);
    std::vector<double> terms;
    for (std::size_t j = 0; j < d; ++j)
    {
        r.main[j] = anova.subset_variances[SubsetMask{1} << j];
        terms.clear();
        for (SubsetMask u = 1; u < count; ++u)
        {
            if (contains(u, j))
                terms.push_back(anova.subset_variances[u]);
        }
        r.total[j] = pairwise_sum(terms);
    }
    r.sigma2 = anova.total_variance();
    return r;
}

//---------------------------------------------------------------------------//
// QUADRATURE ORACLE
//---------------------------------------------------------------------------//
QuadratureAxis quadrature_axis(MarginalDistribution const& dist,
                               std::size_t nodes, std::size_t panels,
                               std::optional<std::pair<double, double>> trunc)
{
    if (nodes == 0 || panels == 0 || nodes % panels != 0)
    {
        throw ParameterError("node count must be a positive multiple of the "
                             "panel count");
    }
    double lo = 0;
    double hi = 0;
    if (auto const* u = std::get_if<Uniform>(&dist.kind()))
    {
        lo = u->lo;
        hi = u->hi;
    }
    else if (trunc)
    {
        std::tie(lo, hi) = *trunc;
        if (!(lo < hi))
            throw ParameterError("truncation interval requires lo < hi");
    }
    else
    {
        throw CapabilityError("quadrature over an unbounded marginal needs "
                              "explicit truncation bounds");
    }

    auto const per_panel = nodes / panels;
    std::unique_ptr<gsl_integration_glfixed_table,
                    decltype(&gsl_integration_glfixed_table_free)>
        table(gsl_integration_glfixed_table_alloc(per_panel),
              &gsl_integration_glfixed_table_free);

    QuadratureAxis axis;
    axis.nodes.reserve(nodes);
    axis.weights.reserve(nodes);
    double const width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p)
    {
        double const a = lo + width * static_cast<double>(p);
        double const b = (p + 1 == panels) ? hi : a + width;
        for (std::size_t i = 0; i < per_panel; ++i)
        {
            double x = 0;
            double w = 0;
            gsl_integration_glfixed_point(a, b, i, &x, &w, table.get());
            axis.nodes.push_back(x);
            axis.weights.push_back(w * dist.pdf(x));
        }
    }
    double const norm = pairwise_sum(axis.weights);
    for (auto& w : axis.weights)
        w /= norm;
    return axis;
}

namespace
{
struct GridIndex
{
    std::vector<std::size_t> axes;  // ascending
    std::size_t n;

    std::size_t size() const
    {
        std::size_t s = 1;
        for (std::size_t k = 0; k < axes.size(); ++k)
            s *= n;
        return s;
    }

    //! Strides of subset v's layout, per position of this grid (0 if absent)
    std::vector<std::size_t> strides_of(SubsetMask v) const
    {
        std::vector<std::size_t> strides(axes.size(), 0);
        std::size_t stride = 1;
        for (std::size_t k = 0; k < axes.size(); ++k)
        {
            if (contains(v, axes[k]))
            {
                strides[k] = stride;
                stride *= n;
            }
        }
        return strides;
    }
};

GridIndex grid_of(SubsetMask u, std::size_t d, std::size_t n)
{
    GridIndex g{{}, n};
    for (std::size_t j = 0; j < d; ++j)
    {
        if (contains(u, j))
            g.axes.push_back(j);
    }
    return g;
}

// Visit every grid point with its digit vector
template<class F>
void for_each_point(GridIndex const& g, F&& visit)
{
    std::vector<std::size_t> digits(g.axes.size(), 0);
    std::size_t const total = g.size();
    for (std::size_t t = 0; t < total; ++t)
    {
        visit(t, std::span<std::size_t const>(digits));
        for (std::size_t k = 0; k < digits.size(); ++k)
        {
            if (++digits[k] < g.n)
                break;
            digits[k] = 0;
        }
    }
}

std::size_t dot(std::span<std::size_t const> digits,
                std::span<std::size_t const> strides)
{
    std::size_t idx = 0;
    for (std::size_t k = 0; k < digits.size(); ++k)
        idx += digits[k] * strides[k];
    return idx;
}

// Integrate a tensor (all extents n) over the axis at position `pos`
std::vector<double> integrate_position(std::vector<double> const& tensor,
                                       std::size_t rank, std::size_t pos,
                                       std::size_t n,
                                       std::vector<double> const& weights)
{
    std::size_t inner = 1;
    for (std::size_t k = 0; k < pos; ++k)
        inner *= n;
    std::size_t outer = 1;
    for (std::size_t k = pos + 1; k < rank; ++k)
        outer *= n;

    std::vector<double> out(inner * outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            double const w = weights[i];
            double const* src = tensor.data() + (o * n + i) * inner;
            double* dst = out.data() + o * inner;
            for (std::size_t in = 0; in < inner; ++in)
                dst[in] += w * src[in];
        }
    }
    return out;
}

std::size_t position_in(SubsetMask u, std::size_t j)
{
    return popcount(u & ((SubsetMask{1} << j) - 1));
}
}  // namespace

AnovaComponents::AnovaComponents(ModelFunction const& f,
                                 InputSpace const& space,
                                 QuadratureSpec const& spec)
    : nodes_(spec.nodes_per_axis)
{
    std::size_t const d = space.dim();
    if (f.dim() != d)
    {
        throw ParameterError("model and input space dimensions differ");
    }
    if (d > max_oracle_dim)
    {
        throw CapacityError("ANOVA oracle supports d <= "
                            + std::to_string(max_oracle_dim));
    }
    if (!spec.truncation.empty() && spec.truncation.size() != d)
    {
        throw ParameterError("truncation list must be empty or have d "
                             "entries");
    }
    double const points = std::pow(static_cast<double>(nodes_),
                                   static_cast<double>(d));
    if (points > static_cast<double>(std::size_t{1} << 26))
    {
        throw CapacityError("quadrature grid exceeds 2^26 points");
    }

    axes_.reserve(d);
    for (std::size_t j = 0; j < d; ++j)
    {
        std::optional<std::pair<double, double>> trunc;
        if (!spec.truncation.empty())
            trunc = spec.truncation[j];
        axes_.push_back(quadrature_axis(space[j], nodes_, spec.panels, trunc));
    }

    SubsetMask const full = static_cast<SubsetMask>((1u << d) - 1);
    std::size_t const count = std::size_t{1} << d;

    // Projections P_u(x_u) = integral of f over x_{-u}
    std::vector<std::vector<double>> proj(count);
    {
        auto const grid = grid_of(full, d, nodes_);
        proj[full].resize(grid.size());
        std::vector<double> x(d);
        for_each_point(grid, [&](std::size_t t, auto digits) {
            for (std::size_t j = 0; j < d; ++j)
                x[j] = axes_[j].nodes[digits[j]];
            proj[full][t] = f(x);
        });
    }
    for (SubsetMask u = full; u-- > 0;)
    {
        std::size_t k = 0;
        while (contains(u, k))
            ++k;
        SubsetMask const parent = u | (SubsetMask{1} << k);
        proj[u] = integrate_position(proj[parent], popcount(parent),
                                     position_in(parent, k), nodes_,
                                     axes_[k].weights);
    }

    // f_u = P_u - sum over proper subsets v of f_v; subsets have smaller masks
    components_.resize(count);
    components_[0] = proj[0];
    for (SubsetMask u = 1; u < count; ++u)
    {
        auto const grid = grid_of(u, d, nodes_);
        auto fu = std::move(proj[u]);
        for (SubsetMask v = 0; v < u; ++v)
        {
            if ((v & u) != v)
                continue;
            auto const strides = grid.strides_of(v);
            auto const& fv = components_[v];
            for_each_point(grid, [&](std::size_t t, auto digits) {
                fu[t] -= fv[dot(digits, strides)];
            });
        }
        components_[u] = std::move(fu);
    }
}

double AnovaComponents::variance(SubsetMask u) const
{
    return inner_product(u, u);
}

double AnovaComponents::max_axis_integral(SubsetMask u, std::size_t j) const
{
    if (!contains(u, j))
    {
        throw ParameterError("coordinate is not in the subset");
    }
    auto const reduced = integrate_position(components_[u], popcount(u),
                                            position_in(u, j), nodes_,
                                            axes_[j].weights);
    double worst = 0;
    for (double v : reduced)
        worst = std::max(worst, std::abs(v));
    return worst;
}

double AnovaComponents::inner_product(SubsetMask u, SubsetMask v) const
{
    auto const grid = grid_of(u | v, dim(), nodes_);
    auto const su = grid.strides_of(u);
    auto const sv = grid.strides_of(v);
    auto const& fu = components_[u];
    auto const& fv = components_[v];
    double sum = 0;
    for_each_point(grid, [&](std::size_t, auto digits) {
        double w = 1;
        for (std::size_t k = 0; k < digits.size(); ++k)
            w *= axes_[grid.axes[k]].weights[digits[k]];
        sum += w * fu[dot(digits, su)] * fv[dot(digits, sv)];
    });
    return sum;
}

AnovaDecomposition AnovaComponents::decomposition() const
{
    AnovaDecomposition anova;
    anova.d = dim();
    anova.mu = mu();
    anova.subset_variances.assign(components_.size(), 0.0);
    for (SubsetMask u = 1; u < components_.size(); ++u)
        anova.subset_variances[u] = variance(u);
    return anova;
}

AnovaDecomposition anova_oracle(ModelFunction const& f,
                                InputSpace const& space,
                                QuadratureSpec const& spec)
{
    return AnovaComponents(f, space, spec).decomposition();
}

OrthogonalityReport orthogonality_check(AnovaComponents const& components,
                                        double tolerance)
{
    OrthogonalityReport report;
    report.tolerance = tolerance;
    auto const count = static_cast<SubsetMask>(1u << components.dim());
    for (SubsetMask u = 1; u < count; ++u)
    {
        for (std::size_t j = 0; j < components.dim(); ++j)
        {
            if (contains(u, j))
            {
                report.max_axis_integral
                    = std::max(report.max_axis_integral,
                               components.max_axis_integral(u, j));
            }
        }
        for (SubsetMask v = u + 1; v < count; ++v)
        {
            double const ip = std::abs(components.inner_product(u, v));
            if (ip > report.max_cross_inner_product)
            {
                report.max_cross_inner_product = ip;
                report.worst_u = u;
                report.worst_v = v;
            }
        }
    }
    return report;
}

OrthogonalityReport orthogonality_check(ModelFunction const& f,
                                        InputSpace const& space,
                                        QuadratureSpec const& spec,
                                        double tolerance)
{
    return orthogonality_check(AnovaComponents(f, space, spec), tolerance);
}

}  // namespace shapley
