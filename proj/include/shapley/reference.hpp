// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/reference.hpp
//! \brief Exact sensitivity indices and a quadrature ANOVA oracle
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "input_model.hpp"
#include "models.hpp"

namespace shapley
{
//! Largest dimension for which subsets are enumerated (2^25 subsets)
inline constexpr std::size_t max_enumeration_dim = 25;
//! Largest dimension supported by the tensor-grid ANOVA oracle
inline constexpr std::size_t max_oracle_dim = 4;

//! Subsets of [0, d) are encoded as bitmasks
using SubsetMask = std::uint32_t;

//---------------------------------------------------------------------------//
/*!
 * Main, total and Shapley effects of each variable plus the overall variance.
 *
 * Effects are unnormalized variances, not ratios to sigma2.
 */
struct SensitivityIndices
{
    std::size_t d = 0;
    std::vector<double> main;
    std::vector<double> total;
    std::vector<double> shapley;
    double sigma2 = 0;
    std::optional<double> mu;
};

//---------------------------------------------------------------------------//
/*!
 * Variances of the ANOVA components, indexed by subset bitmask.
 *
 * Entry 0 (the empty set) is unused and kept at zero.
 */
struct AnovaDecomposition
{
    std::size_t d = 0;
    double mu = 0;
    std::vector<double> subset_variances;

    double variance(SubsetMask u) const { return subset_variances[u]; }
    //! Sum over all nonempty subsets
    double total_variance() const;
};

//---------------------------------------------------------------------------//
// CLOSED FORMS
//---------------------------------------------------------------------------//
SensitivityIndices ishigami_exact(IshigamiParams const& p);

// Shapley effects by exact subset enumeration; throws CapacityError past
// max_enumeration_dim
SensitivityIndices sobol_g_exact(SobolGParams const& p);

// sigma_u^2 = prod_{j in u} 1 / (3 (1 + a_j)^2) for every subset
AnovaDecomposition sobol_g_anova(SobolGParams const& p);

// phi_j = sum over subsets u containing j of sigma_u^2 / |u|
std::vector<double> shapley_from_anova(AnovaDecomposition const& anova);

// All indices implied by the subset variances
SensitivityIndices indices_from_anova(AnovaDecomposition const& anova);

//! Pairwise (tree-order) summation
double pairwise_sum(std::span<double const> values);

//---------------------------------------------------------------------------//
// QUADRATURE ORACLE
//---------------------------------------------------------------------------//
/*!
 * Gauss-Legendre tensor grid settings.
 *
 * Each axis interval is split into \c panels equal pieces carrying
 * nodes_per_axis / panels nodes each. Unbounded marginals need a [lo, hi]
 * truncation for their axis; the density weights on that interval are
 * renormalized to one.
 */
struct QuadratureSpec
{
    std::size_t nodes_per_axis = 32;
    std::size_t panels = 1;
    std::vector<std::optional<std::pair<double, double>>> truncation;
};

//! Nodes and probability weights (summing to one) of one axis
struct QuadratureAxis
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureAxis quadrature_axis(MarginalDistribution const& dist,
                               std::size_t nodes, std::size_t panels,
                               std::optional<std::pair<double, double>> trunc);

/*!
 * ANOVA component functions tabulated on a tensor grid.
 *
 * Component u is stored over the axes in u, in increasing axis order with the
 * lowest axis varying fastest.
 */
class AnovaComponents
{
  public:
    AnovaComponents(ModelFunction const& f, InputSpace const& space,
                    QuadratureSpec const& spec);

    std::size_t dim() const { return axes_.size(); }
    std::size_t nodes() const { return nodes_; }
    double mu() const { return components_[0][0]; }
    std::vector<QuadratureAxis> const& axes() const { return axes_; }
    std::vector<double> const& component(SubsetMask u) const
    {
        return components_[u];
    }

    //! Quadrature of f_u^2
    double variance(SubsetMask u) const;
    //! Max |integral of f_u over x_j| across the remaining grid, j in u
    double max_axis_integral(SubsetMask u, std::size_t j) const;
    //! Quadrature of f_u f_v over the full space
    double inner_product(SubsetMask u, SubsetMask v) const;

    AnovaDecomposition decomposition() const;

  private:
    std::size_t nodes_;
    std::vector<QuadratureAxis> axes_;
    std::vector<std::vector<double>> components_;
};

// Subset variances by tensor-grid quadrature of the recursive definition
AnovaDecomposition anova_oracle(ModelFunction const& f,
                                InputSpace const& space,
                                QuadratureSpec const& spec);

struct OrthogonalityReport
{
    //! Largest |integral of f_u against one of its own coordinates|
    double max_axis_integral = 0;
    //! Largest |<f_u, f_v>| over distinct nonempty u, v
    double max_cross_inner_product = 0;
    SubsetMask worst_u = 0;
    SubsetMask worst_v = 0;
    double tolerance = 0;

    bool passed() const
    {
        return max_axis_integral <= tolerance
               && max_cross_inner_product <= tolerance;
    }
};

OrthogonalityReport orthogonality_check(AnovaComponents const& components,
                                        double tolerance);
OrthogonalityReport orthogonality_check(ModelFunction const& f,
                                        InputSpace const& space,
                                        QuadratureSpec const& spec,
                                        double tolerance);

}  // namespace shapley
