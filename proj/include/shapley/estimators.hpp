// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/estimators.hpp
//! \brief Monte Carlo estimators of Shapley, main and total effects
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "input_model.hpp"
#include "models.hpp"

namespace shapley
{
//! Samples per chunk; each chunk draws from its own RNG stream.
inline constexpr std::size_t samples_per_chunk = 512;

struct EstimatorConfig
{
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double ci_z = 1.96;
};

//---------------------------------------------------------------------------//
/*!
 * Result of a Shapley-effect estimation.
 *
 * The variance and confidence-interval vectors are empty when the sampling
 * scheme does not support unbiased variance estimation (winding stairs).
 * Estimates are never clamped and may be negative.
 */
struct ShapleyReport
{
    std::size_t d = 0;
    std::size_t n = 0;
    std::vector<double> estimates;
    std::vector<double> variance_of_estimator;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    //! Sum of the estimates, accumulated in variable order
    double sigma2_estimate = 0;
    //! Sample mean of (f(x) - f(y))^2 / 2 over the base pairs
    double half_square_mean = 0;
    //! Number of increments credited to each variable
    std::vector<std::uint64_t> credits;
    std::uint64_t eval_count = 0;
    std::uint64_t seed = 0;

    bool variance_available() const { return !variance_of_estimator.empty(); }
};

enum class EffectKind
{
    main,
    total
};

struct EffectReport
{
    std::size_t d = 0;
    std::size_t n = 0;
    EffectKind kind = EffectKind::main;
    std::vector<double> values;
    std::vector<double> variance_of_estimator;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    //! Sample mean of (f(x) - f(y))^2 / 2, when f(y) was evaluated
    std::optional<double> sigma2_estimate;
    std::uint64_t eval_count = 0;
    std::uint64_t seed = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Increment credited to the variable added at one step of a permutation walk.
 *
 * With F = f(x), F- the value before swapping the variable in from y and F+
 * the value after:
 *
 *   (F - (F- + F+)/2) (F- - F+) = (F - F+)^2 / 2 - (F - F-)^2 / 2
 *
 * Throws EvaluationError on non-finite input.
 */
double pickfreeze_increment(double f_x, double f_minus, double f_plus);

/*!
 * Estimate all Shapley effects at once from N random permutation walks.
 *
 * Each sample draws x, y and a permutation, evaluates f at x, then swaps
 * coordinates of x for those of y in permutation order, evaluating f after
 * each swap and crediting the increment to the swapped variable. The walk
 * costs d + 1 evaluations, so the run costs exactly (d + 1) N.
 *
 * The per-variable variance of the estimator is estimated unbiasedly from the
 * sample variance of the increments, and the confidence interval is
 * estimate +/- ci_z * sqrt(variance).
 *
 * Results are bitwise-identical for any worker count.
 */
ShapleyReport estimate_shapley_all(ModelFunction const& f,
                                   InputSpace const& space,
                                   EstimatorConfig const& cfg);

/*!
 * Winding-stairs variant: a single sequence x(1), ..., x(N+1) is drawn and
 * consecutive points are paired. Costs d N + 1 evaluations, or d N when
 * \c cyclic closes the sequence with x(N+1) = x(1). Variance estimates are
 * not available because consecutive pairs are dependent.
 */
ShapleyReport estimate_shapley_winding(ModelFunction const& f,
                                       InputSpace const& space,
                                       EstimatorConfig const& cfg,
                                       bool cyclic = false);

// Pick-freeze main effects: mean of f(x) (f(x_j, y_-j) - f(y)); (d+2) N evals
EffectReport estimate_main_effects(ModelFunction const& f,
                                   InputSpace const& space,
                                   EstimatorConfig const& cfg);

// Pick-freeze total effects: mean of (f(x) - f(y_j, x_-j))^2 / 2; (d+1) N
EffectReport estimate_total_effects(ModelFunction const& f,
                                    InputSpace const& space,
                                    EstimatorConfig const& cfg);

}  // namespace shapley
