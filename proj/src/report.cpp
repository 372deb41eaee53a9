// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file report.cpp
//---------------------------------------------------------------------------//
#include "shapley/report.hpp"

#include <cstdio>
#include <string>

namespace shapley
{
using nlohmann::json;

namespace
{
std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(json const& v)
{
    if (v.is_null())
        return "na";
    if (v.is_number_float())
        return fmt(v.get<double>());
    return v.dump();
}

json base_report(AnalysisConfig const& cfg, std::size_t n,
                 std::uint64_t eval_count, std::uint64_t seed,
                 double elapsed)
{
    return {{"version", std::string(library_version())},
            {"command", "analyze"},
            {"config", cfg.to_json()},
            {"estimator", std::string(to_string(cfg.estimator))},
            {"n", n},
            {"eval_count", eval_count},
            {"seed", seed},
            {"elapsed_seconds", elapsed}};
}

json result_rows(std::vector<double> const& estimates,
                 std::vector<double> const& variance,
                 std::vector<double> const& lo, std::vector<double> const& hi)
{
    json rows = json::array();
    for (std::size_t j = 0; j < estimates.size(); ++j)
    {
        json row = {{"variable", j + 1}, {"estimate", estimates[j]}};
        if (variance.empty())
        {
            row["variance"] = nullptr;
            row["ci_low"] = nullptr;
            row["ci_high"] = nullptr;
        }
        else
        {
            row["variance"] = variance[j];
            row["ci_low"] = lo[j];
            row["ci_high"] = hi[j];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}
}  // namespace

std::string_view library_version()
{
    return SHAPLEY_VERSION;
}

json analysis_report_json(AnalysisConfig const& cfg,
                          ShapleyReport const& report, double elapsed_seconds)
{
    auto j = base_report(cfg, report.n, report.eval_count, report.seed,
                         elapsed_seconds);
    j["results"] = result_rows(report.estimates, report.variance_of_estimator,
                               report.ci_low, report.ci_high);
    j["sigma2_estimate"] = report.sigma2_estimate;
    return j;
}

json analysis_report_json(AnalysisConfig const& cfg,
                          EffectReport const& report, double elapsed_seconds)
{
    auto j = base_report(cfg, report.n, report.eval_count, report.seed,
                         elapsed_seconds);
    j["results"] = result_rows(report.values, report.variance_of_estimator,
                               report.ci_low, report.ci_high);
    if (report.sigma2_estimate)
        j["sigma2_estimate"] = *report.sigma2_estimate;
    else
        j["sigma2_estimate"] = nullptr;
    return j;
}

void write_analysis_csv(std::ostream& os, json const& report)
{
    os << "variable,estimate,variance,ci_low,ci_high\n";
    for (auto const& row : report["results"])
    {
        os << row["variable"].get<std::size_t>() << ','
           << fmt(row["estimate"]) << ',' << fmt(row["variance"]) << ','
           << fmt(row["ci_low"]) << ',' << fmt(row["ci_high"]) << '\n';
    }
    os << "#estimator," << report["estimator"].get<std::string>() << '\n'
       << "#n," << report["n"].dump() << '\n'
       << "#sigma2_estimate," << fmt(report["sigma2_estimate"]) << '\n'
       << "#eval_count," << report["eval_count"].dump() << '\n'
       << "#seed," << report["seed"].dump() << '\n'
       << "#elapsed_seconds," << fmt(report["elapsed_seconds"]) << '\n';
}

json exact_report_json(AnalysisConfig const& cfg,
                       SensitivityIndices const& indices)
{
    json rows = json::array();
    for (std::size_t j = 0; j < indices.d; ++j)
    {
        rows.push_back({{"variable", j + 1},
                        {"main", indices.main[j]},
                        {"shapley", indices.shapley[j]},
                        {"total", indices.total[j]}});
    }
    json j = {{"version", std::string(library_version())},
              {"command", "exact"},
              {"config", cfg.to_json()},
              {"model", cfg.model.name},
              {"d", indices.d},
              {"results", rows},
              {"sigma2", indices.sigma2}};
    j["mu"] = indices.mu ? json(*indices.mu) : json(nullptr);
    return j;
}

void write_exact_csv(std::ostream& os, SensitivityIndices const& indices)
{
    os << "variable,main,shapley,total\n";
    for (std::size_t j = 0; j < indices.d; ++j)
    {
        os << j + 1 << ',' << fmt(indices.main[j]) << ','
           << fmt(indices.shapley[j]) << ',' << fmt(indices.total[j]) << '\n';
    }
    os << "#sigma2," << fmt(indices.sigma2) << '\n';
    if (indices.mu)
        os << "#mu," << fmt(*indices.mu) << '\n';
}

void write_convergence_csv(std::ostream& os, ConvergenceStudy const& study)
{
    auto const estimator = to_string(study.kind);
    os << "model,estimator,N,trial,sse\n";
    for (std::size_t i = 0; i < study.ns.size(); ++i)
    {
        for (std::size_t r = 0; r < study.sse[i].size(); ++r)
        {
            os << study.model_id << ',' << estimator << ',' << study.ns[i]
               << ',' << r + 1 << ',' << fmt(study.sse[i][r]) << '\n';
        }
    }
    os << "#summary,N,mean_sse\n";
    for (std::size_t i = 0; i < study.ns.size(); ++i)
    {
        os << "#summary," << study.ns[i] << ',' << fmt(study.mean_sse[i])
           << '\n';
    }
    os << "#slope,"
       << (study.fitted_slope ? fmt(*study.fitted_slope) : std::string("na"))
       << '\n';
}

}  // namespace shapley
