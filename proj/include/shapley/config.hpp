// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley/config.hpp
//! \brief Analysis configuration files and model construction
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "input_model.hpp"
#include "models.hpp"
#include "reference.hpp"

namespace shapley
{
enum class OutputFormat
{
    json,
    csv
};

/*!
 * Model selection as written in a config file.
 *
 * Builtins: "ishigami" (a, b), "sobol-g" (a: weights, or d for a_j = j - 1),
 * "plate-buckling", "constant" (dim, value). "external" runs \c command with
 * dimension \c dim over the line protocol.
 */
struct ModelSpec
{
    std::string name;
    IshigamiParams ishigami;
    SobolGParams sobol_g;
    std::size_t dim = 0;
    double value = 0;
    std::string command;

    //! Builtin with default parameters; nothing for unknown names
    static std::optional<ModelSpec> builtin(std::string const& name);

    std::size_t dimension() const;
    bool analytic() const;
};

//---------------------------------------------------------------------------//
/*!
 * Fully resolved analysis configuration.
 *
 * Parsing rejects unknown keys at every level. Distributions default to the
 * builtin model's input space when omitted, and to U(0, 1) inputs for the
 * constant and external models.
 */
struct AnalysisConfig
{
    ModelSpec model;
    //! One marginal spec per input, e.g. {"kind":"uniform","lo":0,"hi":1}
    std::vector<nlohmann::json> distributions;
    EstimatorKind estimator = EstimatorKind::shapley;
    bool cyclic = false;
    std::size_t n = 1024;
    std::uint64_t seed = 0;
    std::optional<std::size_t> trials;
    std::vector<std::size_t> ns;
    double ci_z = 1.96;
    std::size_t workers = 1;
    std::optional<std::string> output;
    std::optional<OutputFormat> format;

    static AnalysisConfig from_json(nlohmann::json const& j);
    static AnalysisConfig from_file(std::string const& path);
    nlohmann::json to_json() const;

    //! Replace the model and reset distributions to its defaults
    void set_model(ModelSpec spec);
    //! Check cross-field invariants; throws ConfigError
    void validate() const;
    //! True when distributions equal the builtin model's defaults
    bool default_distributions() const;
};

MarginalDistribution parse_marginal(nlohmann::json const& j);
std::vector<nlohmann::json> default_distributions(ModelSpec const& spec);

ModelFunction build_model(ModelSpec const& spec);
InputSpace build_space(AnalysisConfig const& cfg);

//! Closed-form indices for analytic builtins on their default inputs
std::optional<SensitivityIndices> exact_indices(AnalysisConfig const& cfg);

}  // namespace shapley
