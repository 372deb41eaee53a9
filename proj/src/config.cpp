// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file config.cpp
//---------------------------------------------------------------------------//
#include "shapley/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <string_view>

#include "shapley/errors.hpp"

namespace shapley
{
using nlohmann::json;

namespace
{
void reject_unknown_keys(json const& obj, std::string_view where,
                         std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object())
    {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (auto const& item : obj.items())
    {
        if (std::find(allowed.begin(), allowed.end(), item.key())
            == allowed.end())
        {
            throw ConfigError("unknown key '" + item.key() + "' in "
                              + std::string(where));
        }
    }
}

double get_number(json const& obj, char const* key, std::string_view where)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
    {
        throw ConfigError(std::string(where) + " requires numeric '" + key
                          + "'");
    }
    return it->get<double>();
}

std::size_t get_count(json const& value, std::string_view what)
{
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
    {
        throw ConfigError(std::string(what)
                          + " must be a non-negative integer");
    }
    return value.get<std::size_t>();
}

std::uint64_t get_seed(json const& value)
{
    if (value.is_number_unsigned())
        return value.get<std::uint64_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    throw ConfigError("seed must be a non-negative integer");
}

json uniform_spec(double lo, double hi)
{
    return {{"kind", "uniform"}, {"lo", lo}, {"hi", hi}};
}

ModelSpec parse_model(json const& j)
{
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    {
        throw ConfigError("model must be an object with a string 'name'");
    }
    ModelSpec spec;
    spec.name = j["name"].get<std::string>();
    if (spec.name == "ishigami")
    {
        reject_unknown_keys(j, "ishigami model", {"name", "a", "b"});
        if (j.contains("a"))
            spec.ishigami.a = get_number(j, "a", "ishigami model");
        if (j.contains("b"))
            spec.ishigami.b = get_number(j, "b", "ishigami model");
    }
    else if (spec.name == "sobol-g")
    {
        reject_unknown_keys(j, "sobol-g model", {"name", "a", "d"});
        if (j.contains("a") && j.contains("d"))
        {
            throw ConfigError("sobol-g model takes either 'a' or 'd'");
        }
        if (j.contains("a"))
        {
            if (!j["a"].is_array())
                throw ConfigError("sobol-g 'a' must be an array");
            for (auto const& v : j["a"])
            {
                if (!v.is_number())
                    throw ConfigError("sobol-g weights must be numbers");
                spec.sobol_g.a.push_back(v.get<double>());
            }
        }
        else
        {
            std::size_t d = j.contains("d") ? get_count(j["d"], "sobol-g d")
                                            : 10;
            spec.sobol_g = SobolGParams::ascending(d);
        }
    }
    else if (spec.name == "plate-buckling")
    {
        reject_unknown_keys(j, "plate-buckling model", {"name"});
    }
    else if (spec.name == "constant")
    {
        reject_unknown_keys(j, "constant model", {"name", "dim", "value"});
        spec.dim = j.contains("dim") ? get_count(j["dim"], "constant dim")
                                     : 1;
        spec.value = j.contains("value")
                         ? get_number(j, "value", "constant model")
                         : 0.0;
    }
    else if (spec.name == "external")
    {
        reject_unknown_keys(j, "external model", {"name", "command", "dim"});
        if (!j.contains("command") || !j["command"].is_string())
            throw ConfigError("external model requires string 'command'");
        if (!j.contains("dim"))
            throw ConfigError("external model requires 'dim'");
        spec.command = j["command"].get<std::string>();
        spec.dim = get_count(j["dim"], "external dim");
    }
    else
    {
        throw ConfigError("unknown model '" + spec.name + "'");
    }
    return spec;
}

json model_to_json(ModelSpec const& spec)
{
    json j = {{"name", spec.name}};
    if (spec.name == "ishigami")
    {
        j["a"] = spec.ishigami.a;
        j["b"] = spec.ishigami.b;
    }
    else if (spec.name == "sobol-g")
    {
        j["a"] = spec.sobol_g.a;
    }
    else if (spec.name == "constant")
    {
        j["dim"] = spec.dim;
        j["value"] = spec.value;
    }
    else if (spec.name == "external")
    {
        j["command"] = spec.command;
        j["dim"] = spec.dim;
    }
    return j;
}

std::string_view format_name(OutputFormat f)
{
    return f == OutputFormat::json ? "json" : "csv";
}
}  // namespace

//---------------------------------------------------------------------------//
std::optional<ModelSpec> ModelSpec::builtin(std::string const& name)
{
    if (name == "ishigami" || name == "sobol-g" || name == "plate-buckling"
        || name == "constant")
    {
        return parse_model(json{{"name", name}});
    }
    return std::nullopt;
}

std::size_t ModelSpec::dimension() const
{
    if (name == "ishigami")
        return 3;
    if (name == "sobol-g")
        return sobol_g.a.size();
    if (name == "plate-buckling")
        return 6;
    return dim;
}

bool ModelSpec::analytic() const
{
    return name == "ishigami" || name == "sobol-g" || name == "constant";
}

//---------------------------------------------------------------------------//
MarginalDistribution parse_marginal(json const& j)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    {
        throw ConfigError("distribution must be an object with string "
                          "'kind'");
    }
    auto const kind = j["kind"].get<std::string>();
    try
    {
        if (kind == "uniform")
        {
            reject_unknown_keys(j, "uniform distribution", {"kind", "lo", "hi"});
            return MarginalDistribution::uniform(
                get_number(j, "lo", "uniform distribution"),
                get_number(j, "hi", "uniform distribution"));
        }
        if (kind == "normal")
        {
            reject_unknown_keys(j, "normal distribution",
                                {"kind", "mean", "cv", "sd"});
            double const mean = get_number(j, "mean", "normal distribution");
            if (j.contains("cv") == j.contains("sd"))
            {
                throw ConfigError("normal distribution takes exactly one of "
                                  "'cv' or 'sd'");
            }
            if (j.contains("sd"))
            {
                return MarginalDistribution::normal_sd(
                    mean, get_number(j, "sd", "normal distribution"));
            }
            return MarginalDistribution::normal(
                mean, get_number(j, "cv", "normal distribution"));
        }
        if (kind == "lognormal")
        {
            reject_unknown_keys(j, "lognormal distribution",
                                {"kind", "mean", "cv"});
            return MarginalDistribution::lognormal(
                get_number(j, "mean", "lognormal distribution"),
                get_number(j, "cv", "lognormal distribution"));
        }
    }
    catch (ParameterError const& e)
    {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
}

std::vector<json> default_distributions(ModelSpec const& spec)
{
    if (spec.name == "ishigami")
    {
        return std::vector<json>(
            3, uniform_spec(-std::numbers::pi, std::numbers::pi));
    }
    if (spec.name == "sobol-g")
    {
        return std::vector<json>(spec.sobol_g.a.size(), uniform_spec(0, 1));
    }
    if (spec.name == "plate-buckling")
    {
        auto normal = [](double m, double cv) {
            return json{{"kind", "normal"}, {"mean", m}, {"cv", cv}};
        };
        auto lognormal = [](double m, double cv) {
            return json{{"kind", "lognormal"}, {"mean", m}, {"cv", cv}};
        };
        return {normal(23.808, 0.028),  lognormal(0.525, 0.044),
                lognormal(44.2, 0.1235), normal(28623, 0.076),
                normal(0.35, 0.05),      normal(5.25, 0.07)};
    }
    if (spec.name == "constant" || spec.name == "external")
    {
        return std::vector<json>(spec.dim, uniform_spec(0, 1));
    }
    return {};
}

//---------------------------------------------------------------------------//
AnalysisConfig AnalysisConfig::from_json(json const& j)
{
    reject_unknown_keys(j, "config",
                        {"model", "distributions", "estimator", "cyclic", "n",
                         "seed", "trials", "ns", "ci_z", "workers", "output",
                         "format"});
    AnalysisConfig cfg;
    if (j.contains("model"))
        cfg.set_model(parse_model(j["model"]));
    if (j.contains("distributions"))
    {
        if (!j["distributions"].is_array())
            throw ConfigError("'distributions' must be an array");
        cfg.distributions.clear();
        for (auto const& d : j["distributions"])
        {
            parse_marginal(d);
            cfg.distributions.push_back(d);
        }
    }
    if (j.contains("estimator"))
    {
        if (!j["estimator"].is_string())
            throw ConfigError("'estimator' must be a string");
        auto kind = parse_estimator_kind(j["estimator"].get<std::string>());
        if (!kind)
        {
            throw ConfigError("unknown estimator '"
                              + j["estimator"].get<std::string>() + "'");
        }
        cfg.estimator = *kind;
    }
    if (j.contains("cyclic"))
    {
        if (!j["cyclic"].is_boolean())
            throw ConfigError("'cyclic' must be a boolean");
        cfg.cyclic = j["cyclic"].get<bool>();
    }
    if (j.contains("n"))
        cfg.n = get_count(j["n"], "n");
    if (j.contains("seed"))
        cfg.seed = get_seed(j["seed"]);
    if (j.contains("trials"))
        cfg.trials = get_count(j["trials"], "trials");
    if (j.contains("ns"))
    {
        if (!j["ns"].is_array())
            throw ConfigError("'ns' must be an array");
        for (auto const& v : j["ns"])
            cfg.ns.push_back(get_count(v, "ns entry"));
    }
    if (j.contains("ci_z"))
    {
        if (!j["ci_z"].is_number())
            throw ConfigError("'ci_z' must be a number");
        cfg.ci_z = j["ci_z"].get<double>();
    }
    if (j.contains("workers"))
        cfg.workers = get_count(j["workers"], "workers");
    if (j.contains("output"))
    {
        if (!j["output"].is_string())
            throw ConfigError("'output' must be a string");
        cfg.output = j["output"].get<std::string>();
    }
    if (j.contains("format"))
    {
        auto const f = j["format"].is_string() ? j["format"].get<std::string>()
                                               : std::string{};
        if (f == "json")
            cfg.format = OutputFormat::json;
        else if (f == "csv")
            cfg.format = OutputFormat::csv;
        else
            throw ConfigError("'format' must be \"json\" or \"csv\"");
    }
    return cfg;
}

AnalysisConfig AnalysisConfig::from_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError("config file '" + path + "' is not valid JSON: "
                          + e.what());
    }
    return from_json(j);
}

json AnalysisConfig::to_json() const
{
    json j;
    j["model"] = model_to_json(model);
    j["distributions"] = distributions;
    j["estimator"] = std::string(to_string(estimator));
    j["cyclic"] = cyclic;
    j["n"] = n;
    j["seed"] = seed;
    if (trials)
        j["trials"] = *trials;
    if (!ns.empty())
        j["ns"] = ns;
    j["ci_z"] = ci_z;
    j["workers"] = workers;
    if (output)
        j["output"] = *output;
    if (format)
        j["format"] = std::string(format_name(*format));
    return j;
}

void AnalysisConfig::set_model(ModelSpec spec)
{
    model = std::move(spec);
    distributions = shapley::default_distributions(model);
}

void AnalysisConfig::validate() const
{
    if (model.name.empty())
    {
        throw ConfigError("no model selected (use a config file or --model)");
    }
    if (model.dimension() == 0)
    {
        throw ConfigError("model dimension must be at least 1");
    }
    if (distributions.size() != model.dimension())
    {
        throw ConfigError("model '" + model.name + "' has "
                          + std::to_string(model.dimension())
                          + " inputs but " + std::to_string(distributions.size())
                          + " distributions were given");
    }
    if (n < 2)
    {
        throw ConfigError("n must be at least 2");
    }
    if (workers < 1)
    {
        throw ConfigError("workers must be at least 1");
    }
    if (!(ci_z > 0))
    {
        throw ConfigError("ci_z must be positive");
    }
    if (model.name == "sobol-g")
    {
        for (double a : model.sobol_g.a)
        {
            if (!(a >= 0))
                throw ConfigError("sobol-g weights must be >= 0");
        }
    }
    if (model.name == "ishigami"
        && (!(model.ishigami.a > 0) || !(model.ishigami.b > 0)))
    {
        throw ConfigError("ishigami requires a > 0 and b > 0");
    }
}

bool AnalysisConfig::default_distributions() const
{
    return distributions == shapley::default_distributions(model);
}

//---------------------------------------------------------------------------//
ModelFunction build_model(ModelSpec const& spec)
{
    if (spec.name == "ishigami")
        return make_ishigami(spec.ishigami);
    if (spec.name == "sobol-g")
        return make_sobol_g(spec.sobol_g);
    if (spec.name == "plate-buckling")
        return make_plate_buckling();
    if (spec.name == "constant")
        return make_constant(spec.dim, spec.value);
    if (spec.name == "external")
        return make_external_model(spec.command, spec.dim);
    throw ConfigError("unknown model '" + spec.name + "'");
}

InputSpace build_space(AnalysisConfig const& cfg)
{
    std::vector<MarginalDistribution> marginals;
    marginals.reserve(cfg.distributions.size());
    for (auto const& d : cfg.distributions)
        marginals.push_back(parse_marginal(d));
    if (marginals.empty())
        throw ConfigError("no input distributions given");
    return InputSpace(std::move(marginals));
}

std::optional<SensitivityIndices> exact_indices(AnalysisConfig const& cfg)
{
    if (!cfg.model.analytic() || !cfg.default_distributions())
        return std::nullopt;
    if (cfg.model.name == "ishigami")
        return ishigami_exact(cfg.model.ishigami);
    if (cfg.model.name == "sobol-g")
        return sobol_g_exact(cfg.model.sobol_g);

    // Constant: no variance anywhere
    SensitivityIndices r;
    r.d = cfg.model.dim;
    r.main.assign(r.d, 0.0);
    r.total.assign(r.d, 0.0);
    r.shapley.assign(r.d, 0.0);
    r.sigma2 = 0;
    r.mu = cfg.model.value;
    return r;
}

}  // namespace shapley
