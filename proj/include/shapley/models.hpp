// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/models.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "input_model.hpp"

namespace shapley
{
//---------------------------------------------------------------------------//
/*!
 * Scalar function of d inputs with an evaluation counter.
 *
 * Every call through \c operator() counts as one evaluation. The counter is
 * atomic so concurrent evaluation is allowed when \c concurrent() is true;
 * otherwise estimators run it on a single worker.
 */
class ModelFunction
{
  public:
    using Eval = std::function<double(std::span<double const>)>;

    ModelFunction(std::size_t dim, Eval eval, bool concurrent = true);
    ModelFunction(ModelFunction&& other) noexcept;
    ModelFunction& operator=(ModelFunction&&) = delete;
    ModelFunction(ModelFunction const&) = delete;
    ModelFunction& operator=(ModelFunction const&) = delete;

    std::size_t dim() const { return dim_; }
    bool concurrent() const { return concurrent_; }

    double operator()(std::span<double const> x) const;

    std::uint64_t eval_count() const
    {
        return count_.load(std::memory_order_relaxed);
    }
    void reset_count() { count_.store(0, std::memory_order_relaxed); }

  private:
    std::size_t dim_;
    Eval eval_;
    bool concurrent_;
    mutable std::atomic<std::uint64_t> count_{0};
};

//---------------------------------------------------------------------------//
// BUILTIN TEST FUNCTIONS
//---------------------------------------------------------------------------//
struct IshigamiParams
{
    double a = 7;
    double b = 0.1;
};

//! Weights a_j >= 0 of the Sobol' g function; the length sets d.
struct SobolGParams
{
    std::vector<double> a;

    //! a_j = j - 1 for j = 1..d
    static SobolGParams ascending(std::size_t d);
};

// (1 + b x3^4) sin x1 + a sin^2 x2
double ishigami(IshigamiParams const& p, std::span<double const> x);

// prod_j (|4 x_j - 2| + a_j) / (1 + a_j)
double sobol_g(SobolGParams const& p, std::span<double const> x);

/*!
 * Buckling strength of a simply supported plate under uniaxial compression.
 *
 * Inputs are (width, thickness, yield stress, elastic modulus, initial
 * deflection, residual stress). With slenderness
 * lambda = (x1 / x2) sqrt(x3 / x4):
 *
 *   f = (2.1/lambda - 0.9/lambda^2) (1 - 0.75 x5/lambda) (1 - 2 x2 x6 / x1)
 *
 * Throws DomainError when any of x1..x4 is not positive.
 */
double plate_buckling(std::span<double const> x);

//! Slenderness parameter of the plate buckling model
double plate_slenderness(std::span<double const> x);

ModelFunction make_ishigami(IshigamiParams p = {});
ModelFunction make_sobol_g(SobolGParams p);
ModelFunction make_plate_buckling();
ModelFunction make_constant(std::size_t dim, double value);

//! Uniform on [-pi, pi]^3
InputSpace ishigami_space();
//! Uniform on [0, 1]^d
InputSpace sobol_g_space(std::size_t d);
//! Normal and log-normal marginals of the plate buckling inputs
InputSpace plate_buckling_space();

//---------------------------------------------------------------------------//
// EXTERNAL MODELS
//---------------------------------------------------------------------------//
/*!
 * Wrap a subprocess speaking the line protocol as a model.
 *
 * The command is run through /bin/sh. Each evaluation writes one line of d
 * space-separated decimals and reads back one decimal line. Requests are
 * serialized, so the model reports \c concurrent() == false.
 */
ModelFunction make_external_model(std::string const& command, std::size_t dim);

}  // namespace shapley
