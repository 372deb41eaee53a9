// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/analysis.hpp
//! \brief Error metrics and convergence studies
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "estimators.hpp"
#include "input_model.hpp"
#include "models.hpp"

namespace shapley
{
enum class EstimatorKind
{
    shapley,
    shapley_winding,
    main,
    total
};

std::string_view to_string(EstimatorKind kind);
//! Parse "shapley", "shapley-winding", "main" or "total"
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);

//! Run one estimator and return its per-variable point estimates
std::vector<double> run_estimator(EstimatorKind kind, ModelFunction const& f,
                                  InputSpace const& space,
                                  EstimatorConfig const& cfg,
                                  bool cyclic = false);

// Sum of squared errors against exact values
double sse_exact(std::span<double const> estimates,
                 std::span<double const> exact);

// Expected SSE from R >= 2 trials, measured about the trial mean:
// 1/(R-1) sum_r sum_j (est_rj - mean_j)^2
double sse_samplemean(std::vector<std::vector<double>> const& estimates);

//! Least-squares slope of log2(y) against log2(x); nothing if any y <= 0
std::optional<double> fit_loglog_slope(std::span<double const> x,
                                       std::span<double const> y);

//! Seed of trial r at sample size N
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n,
                         std::size_t trial);

//---------------------------------------------------------------------------//
struct ConvergenceOptions
{
    std::string model_id;
    EstimatorKind kind = EstimatorKind::shapley;
    std::vector<std::size_t> ns;
    std::size_t trials = 10;
    std::uint64_t base_seed = 0;
    std::size_t workers = 1;
    bool cyclic = false;
    //! Exact index values; when absent the sample-mean SSE is used
    std::optional<std::vector<double>> exact;
};

/*!
 * Mean SSE at each sample size over independent seeded trials.
 *
 * With exact values, trial r contributes sum_j (est_rj - exact_j)^2. Without
 * them, trial r contributes R/(R-1) sum_j (est_rj - mean_j)^2, so the mean
 * over trials equals \c sse_samplemean of that sample size.
 */
struct ConvergenceStudy
{
    std::string model_id;
    EstimatorKind kind = EstimatorKind::shapley;
    bool uses_exact = false;
    std::vector<std::size_t> ns;
    std::size_t trials = 0;
    //! sse[i][r] for ns[i] and trial r
    std::vector<std::vector<double>> sse;
    std::vector<double> mean_sse;
    //! Nothing when some mean SSE is zero
    std::optional<double> fitted_slope;
};

ConvergenceStudy convergence_study(ModelFunction const& f,
                                   InputSpace const& space,
                                   ConvergenceOptions const& options);

}  // namespace shapley
