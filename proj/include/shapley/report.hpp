// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/report.hpp
//! \brief JSON and CSV report writers
//---------------------------------------------------------------------------//
#pragma once

#include <ostream>
#include <string_view>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "estimators.hpp"
#include "reference.hpp"

namespace shapley
{
//! Library version embedded in every report
std::string_view library_version();

/*!
 * Analysis report:
 * {version, command, config, estimator, n, results: [{variable, estimate,
 * variance, ci_low, ci_high}], sigma2_estimate, eval_count, seed,
 * elapsed_seconds}. Unavailable variances are null.
 */
nlohmann::json analysis_report_json(AnalysisConfig const& cfg,
                                    ShapleyReport const& report,
                                    double elapsed_seconds);
nlohmann::json analysis_report_json(AnalysisConfig const& cfg,
                                    EffectReport const& report,
                                    double elapsed_seconds);

//! Same content as CSV: one row per variable, metadata as '#key,value'
void write_analysis_csv(std::ostream& os, nlohmann::json const& report);

nlohmann::json exact_report_json(AnalysisConfig const& cfg,
                                 SensitivityIndices const& indices);
void write_exact_csv(std::ostream& os, SensitivityIndices const& indices);

/*!
 * Convergence CSV:
 *
 *   model,estimator,N,trial,sse
 *   <one row per (N, trial)>
 *   #summary,N,mean_sse
 *   #summary,<N>,<mean sse>
 *   #slope,<value|na>
 */
void write_convergence_csv(std::ostream& os, ConvergenceStudy const& study);

}  // namespace shapley
