// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/input_model.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace shapley
{
//---------------------------------------------------------------------------//
// MARGINAL DISTRIBUTIONS
//---------------------------------------------------------------------------//
struct Uniform
{
    double lo;
    double hi;
};

//! Normal with standard deviation sd.
struct Normal
{
    double mean;
    double sd;
};

/*!
 * Log-normal parameterized by the mean and CV of the variable itself.
 *
 * The underlying normal parameters are obtained by moment matching:
 * sigma_ln^2 = ln(1 + cv^2), mu_ln = ln(mean) - sigma_ln^2 / 2.
 */
struct LogNormal
{
    double mean;
    double cv;
    double mu_ln;
    double sigma_ln;
};

//---------------------------------------------------------------------------//
/*!
 * One-dimensional marginal distribution of an input variable.
 *
 * Construct through the named factories, which validate parameters and throw
 * \c ParameterError on violation.
 */
class MarginalDistribution
{
  public:
    using Kind = std::variant<Uniform, Normal, LogNormal>;

    static MarginalDistribution uniform(double lo, double hi);
    //! Normal with sd = |mean| * cv
    static MarginalDistribution normal(double mean, double cv);
    static MarginalDistribution normal_sd(double mean, double sd);
    static MarginalDistribution lognormal(double mean, double cv);

    Kind const& kind() const { return kind_; }

    //! u-quantile; u must lie in the open interval (0, 1)
    double inverse_cdf(double u) const;
    double pdf(double x) const;
    double mean() const;
    double variance() const;
    //! Finite support, or nothing for normal/lognormal
    bool bounded() const { return std::holds_alternative<Uniform>(kind_); }

  private:
    explicit MarginalDistribution(Kind k) : kind_(std::move(k)) {}

    Kind kind_;
};

//---------------------------------------------------------------------------//
//! Product of independent marginals.
class InputSpace
{
  public:
    explicit InputSpace(std::vector<MarginalDistribution> marginals);

    static InputSpace uniform_cube(std::size_t d, double lo, double hi);

    std::size_t dim() const { return marginals_.size(); }
    MarginalDistribution const& operator[](std::size_t j) const
    {
        return marginals_[j];
    }
    std::vector<MarginalDistribution> const& marginals() const
    {
        return marginals_;
    }

  private:
    std::vector<MarginalDistribution> marginals_;
};

//---------------------------------------------------------------------------//
//! Row-major n x d sample matrix, one draw per row.
class SampleMatrix
{
  public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols)
    {
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> row(std::size_t i)
    {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double const> row(std::size_t i) const
    {
        return {values_.data() + i * cols_, cols_};
    }
    double operator()(std::size_t i, std::size_t j) const
    {
        return values_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j)
    {
        return values_[i * cols_ + j];
    }

    std::vector<double> const& values() const { return values_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

//---------------------------------------------------------------------------//
/*!
 * Ordering of the variables, stored zero-based.
 *
 * The prefix {order[0], ..., order[l-1]} preceding variable j = order[l] is the
 * coalition j joins in a permutation walk.
 */
class Permutation
{
  public:
    //! Identity permutation of size d
    explicit Permutation(std::size_t d);
    //! Throws ParameterError unless \c order is a bijection on [0, d)
    explicit Permutation(std::vector<std::size_t> order);

    std::size_t size() const { return order_.size(); }
    std::size_t operator[](std::size_t pos) const { return order_[pos]; }
    std::vector<std::size_t> const& order() const { return order_; }

    bool operator==(Permutation const&) const = default;

  private:
    std::vector<std::size_t> order_;
};

//---------------------------------------------------------------------------//
/*!
 * Seeded random stream.
 *
 * The (seed, stream id) pair is expanded through \c std::seed_seq into the
 * state of a 64-bit Mersenne twister, so equal pairs reproduce the same
 * sequence and distinct stream ids give independent sequences. A stream must
 * not be shared across threads.
 */
class RngStream
{
  public:
    using result_type = std::mt19937_64::result_type;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    //! Uniform draw from the open interval (0, 1) with 53-bit resolution
    double uniform_open();
    //! Uniform integer in [0, bound)
    std::size_t below(std::size_t bound);

    // UniformRandomBitGenerator
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

//---------------------------------------------------------------------------//
// OPERATIONS
//---------------------------------------------------------------------------//
// Draw n i.i.d. rows from the product distribution
SampleMatrix sample_matrix(InputSpace const& space, std::size_t n,
                           RngStream& rng);

// Uniform random permutation by Fisher-Yates shuffle
Permutation random_permutation(std::size_t d, RngStream& rng);

// Quantile of a marginal
double inverse_cdf(MarginalDistribution const& dist, double u);

}  // namespace shapley
