// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/errors.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace shapley
{
//! Base class for all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Invalid distribution, sample size, dimension, or other argument.
class ParameterError : public Error
{
  public:
    using Error::Error;
};

//! Argument outside the mathematical domain of an operation.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Subset enumeration or grid size beyond the supported limit.
class CapacityError : public Error
{
  public:
    using Error::Error;
};

//! The requested operation is not supported for the given inputs.
class CapabilityError : public Error
{
  public:
    using Error::Error;
};

//! Malformed or inconsistent analysis configuration.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//---------------------------------------------------------------------------//
/*!
 * Failure while evaluating the model.
 *
 * Carries the Monte Carlo sample index when raised from an estimator and the
 * protocol line number when raised by an external-model adapter.
 */
class EvaluationError : public Error
{
  public:
    explicit EvaluationError(std::string const& what,
                             std::optional<std::size_t> sample = {},
                             std::optional<std::size_t> line = {})
        : Error(what), sample_(sample), line_(line)
    {
    }

    std::optional<std::size_t> sample() const { return sample_; }
    std::optional<std::size_t> line() const { return line_; }

  private:
    std::optional<std::size_t> sample_;
    std::optional<std::size_t> line_;
};

}  // namespace shapley
