// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file analysis.cpp
//---------------------------------------------------------------------------//
#include "shapley/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapley/errors.hpp"

namespace shapley
{
std::string_view to_string(EstimatorKind kind)
{
    switch (kind)
    {
        case EstimatorKind::shapley:
            return "shapley";
        case EstimatorKind::shapley_winding:
            return "shapley-winding";
        case EstimatorKind::main:
            return "main";
        case EstimatorKind::total:
            return "total";
    }
    return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name)
{
    for (auto k : {EstimatorKind::shapley, EstimatorKind::shapley_winding,
                   EstimatorKind::main, EstimatorKind::total})
    {
        if (to_string(k) == name)
            return k;
    }
    return std::nullopt;
}

std::vector<double> run_estimator(EstimatorKind kind, ModelFunction const& f,
                                  InputSpace const& space,
                                  EstimatorConfig const& cfg, bool cyclic)
{
    switch (kind)
    {
        case EstimatorKind::shapley:
            return estimate_shapley_all(f, space, cfg).estimates;
        case EstimatorKind::shapley_winding:
            return estimate_shapley_winding(f, space, cfg, cyclic).estimates;
        case EstimatorKind::main:
            return estimate_main_effects(f, space, cfg).values;
        case EstimatorKind::total:
            return estimate_total_effects(f, space, cfg).values;
    }
    return {};
}

//---------------------------------------------------------------------------//
double sse_exact(std::span<double const> estimates,
                 std::span<double const> exact)
{
    if (estimates.size() != exact.size())
    {
        throw ParameterError("sse_exact: estimate and exact lengths differ");
    }
    double sse = 0;
    for (std::size_t j = 0; j < estimates.size(); ++j)
    {
        double const e = estimates[j] - exact[j];
        sse += e * e;
    }
    return sse;
}

double sse_samplemean(std::vector<std::vector<double>> const& estimates)
{
    std::size_t const r = estimates.size();
    if (r < 2)
    {
        throw ParameterError("sse_samplemean needs at least two trials");
    }
    std::size_t const d = estimates.front().size();
    for (auto const& row : estimates)
    {
        if (row.size() != d)
            throw ParameterError("sse_samplemean: ragged estimate table");
    }
    double sse = 0;
    for (std::size_t j = 0; j < d; ++j)
    {
        double mean = 0;
        for (auto const& row : estimates)
            mean += row[j];
        mean /= static_cast<double>(r);
        for (auto const& row : estimates)
            sse += (row[j] - mean) * (row[j] - mean);
    }
    return sse / static_cast<double>(r - 1);
}

std::optional<double> fit_loglog_slope(std::span<double const> x,
                                       std::span<double const> y)
{
    if (x.size() != y.size())
    {
        throw ParameterError("fit_loglog_slope: length mismatch");
    }
    if (x.size() < 2)
        return std::nullopt;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        if (!(x[i] > 0) || !(y[i] > 0))
            return std::nullopt;
        lx.push_back(std::log2(x[i]));
        ly.push_back(std::log2(y[i]));
    }
    auto const n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0)
        return std::nullopt;
    return sxy / sxx;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n,
                         std::size_t trial)
{
    // splitmix64 finalizer over (N, r)
    std::uint64_t z = (static_cast<std::uint64_t>(n) << 32)
                      ^ static_cast<std::uint64_t>(trial);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return base_seed ^ z;
}

//---------------------------------------------------------------------------//
ConvergenceStudy convergence_study(ModelFunction const& f,
                                   InputSpace const& space,
                                   ConvergenceOptions const& options)
{
    if (options.ns.empty())
    {
        throw ParameterError("convergence study needs at least one N");
    }
    if (!std::is_sorted(options.ns.begin(), options.ns.end())
        || std::adjacent_find(options.ns.begin(), options.ns.end())
               != options.ns.end())
    {
        throw ParameterError("sample sizes must be strictly ascending");
    }
    if (options.trials < 2)
    {
        throw ParameterError("convergence study needs at least two trials");
    }
    if (options.exact && options.exact->size() != space.dim())
    {
        throw ParameterError("exact values must have one entry per input");
    }

    ConvergenceStudy study;
    study.model_id = options.model_id;
    study.kind = options.kind;
    study.uses_exact = options.exact.has_value();
    study.ns = options.ns;
    study.trials = options.trials;

    auto const r_count = static_cast<double>(options.trials);
    for (std::size_t n : options.ns)
    {
        std::vector<std::vector<double>> estimates;
        for (std::size_t r = 0; r < options.trials; ++r)
        {
            EstimatorConfig cfg;
            cfg.n = n;
            cfg.seed = trial_seed(options.base_seed, n, r);
            cfg.workers = options.workers;
            try
            {
                estimates.push_back(
                    run_estimator(options.kind, f, space, cfg, options.cyclic));
            }
            catch (EvaluationError const& e)
            {
                throw EvaluationError(std::string(e.what()) + " [N="
                                          + std::to_string(n) + ", trial="
                                          + std::to_string(r) + "]",
                                      e.sample(), e.line());
            }
        }

        std::vector<double> sse;
        if (options.exact)
        {
            for (auto const& est : estimates)
                sse.push_back(sse_exact(est, *options.exact));
        }
        else
        {
            std::size_t const d = space.dim();
            std::vector<double> mean(d, 0.0);
            for (auto const& est : estimates)
                for (std::size_t j = 0; j < d; ++j)
                    mean[j] += est[j];
            for (auto& m : mean)
                m /= r_count;
            for (auto const& est : estimates)
                sse.push_back(sse_exact(est, mean) * r_count / (r_count - 1));
        }

        double mean_sse = 0;
        for (double s : sse)
            mean_sse += s;
        study.mean_sse.push_back(mean_sse / r_count);
        study.sse.push_back(std::move(sse));
    }

    std::vector<double> xs(options.ns.begin(), options.ns.end());
    study.fitted_slope = fit_loglog_slope(xs, study.mean_sse);
    return study;
}

}  // namespace shapley
