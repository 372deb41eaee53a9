// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file shapley_cli.cpp
//! \brief Command-line front end: analyze, convergence, exact
//---------------------------------------------------------------------------//
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapley/analysis.hpp"
#include "shapley/config.hpp"
#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/report.hpp"

namespace
{
using namespace shapley;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_eval = 3;

struct Options
{
    std::string config;
    std::string model;
    std::string estimator;
    std::string output;
    std::string format;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::vector<std::size_t> ns;
    bool cyclic = false;
};

void add_common_options(CLI::App* cmd, Options& opt)
{
    cmd->add_option("--config", opt.config, "JSON analysis config file");
    cmd->add_option("--model", opt.model,
                    "builtin model: ishigami, sobol-g, plate-buckling, "
                    "constant");
    cmd->add_option("--output", opt.output, "output path (default stdout)");
    cmd->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

void add_sampling_options(CLI::App* cmd, Options& opt)
{
    cmd->add_option("--n", opt.n, "sample size N");
    cmd->add_option("--seed", opt.seed, "base random seed");
    cmd->add_option("--workers", opt.workers, "worker threads");
    cmd->add_option("--estimator", opt.estimator,
                    "shapley, shapley-winding, main or total");
    cmd->add_flag("--cyclic", opt.cyclic,
                  "close the winding-stairs sequence (cost dN)");
}

AnalysisConfig resolve(Options const& opt)
{
    AnalysisConfig cfg;
    if (!opt.config.empty())
        cfg = AnalysisConfig::from_file(opt.config);
    if (!opt.model.empty())
    {
        auto spec = ModelSpec::builtin(opt.model);
        if (!spec)
            throw ConfigError("unknown builtin model '" + opt.model + "'");
        cfg.set_model(*spec);
    }
    if (!opt.estimator.empty())
    {
        auto kind = parse_estimator_kind(opt.estimator);
        if (!kind)
            throw ConfigError("unknown estimator '" + opt.estimator + "'");
        cfg.estimator = *kind;
    }
    if (opt.cyclic)
        cfg.cyclic = true;
    if (opt.n)
        cfg.n = *opt.n;
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.trials)
        cfg.trials = *opt.trials;
    if (opt.workers)
        cfg.workers = *opt.workers;
    if (!opt.ns.empty())
        cfg.ns = opt.ns;
    if (!opt.output.empty())
        cfg.output = opt.output;
    if (!opt.format.empty())
        cfg.format = opt.format == "csv" ? OutputFormat::csv
                                         : OutputFormat::json;
    cfg.validate();
    return cfg;
}

void emit(AnalysisConfig const& cfg, std::string const& text)
{
    if (cfg.output)
    {
        std::ofstream out(*cfg.output);
        if (!out)
            throw ConfigError("cannot write output file '" + *cfg.output
                              + "'");
        out << text;
    }
    else
    {
        std::cout << text;
    }
}

EstimatorConfig estimator_config(AnalysisConfig const& cfg)
{
    EstimatorConfig ec;
    ec.n = cfg.n;
    ec.seed = cfg.seed;
    ec.workers = cfg.workers;
    ec.ci_z = cfg.ci_z;
    return ec;
}

void cmd_analyze(AnalysisConfig const& cfg)
{
    auto const f = build_model(cfg.model);
    auto const space = build_space(cfg);
    auto const ec = estimator_config(cfg);

    auto const start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now()
                                             - start)
            .count();
    };

    nlohmann::json report;
    switch (cfg.estimator)
    {
        case EstimatorKind::shapley: {
            auto r = estimate_shapley_all(f, space, ec);
            report = analysis_report_json(cfg, r, elapsed());
            break;
        }
        case EstimatorKind::shapley_winding: {
            auto r = estimate_shapley_winding(f, space, ec, cfg.cyclic);
            report = analysis_report_json(cfg, r, elapsed());
            break;
        }
        case EstimatorKind::main: {
            auto r = estimate_main_effects(f, space, ec);
            report = analysis_report_json(cfg, r, elapsed());
            break;
        }
        case EstimatorKind::total: {
            auto r = estimate_total_effects(f, space, ec);
            report = analysis_report_json(cfg, r, elapsed());
            break;
        }
    }

    std::ostringstream os;
    if (cfg.format.value_or(OutputFormat::json) == OutputFormat::csv)
        write_analysis_csv(os, report);
    else
        os << report.dump(2) << '\n';
    emit(cfg, os.str());
}

void cmd_convergence(AnalysisConfig cfg)
{
    if (cfg.format.value_or(OutputFormat::csv) != OutputFormat::csv)
    {
        throw ConfigError("convergence studies are written as CSV only");
    }
    if (!cfg.trials)
        cfg.trials = 10;
    if (cfg.ns.empty())
    {
        for (std::size_t e = 8; e <= 14; ++e)
            cfg.ns.push_back(std::size_t{1} << e);
    }

    ConvergenceOptions options;
    options.model_id = cfg.model.name;
    options.kind = cfg.estimator;
    options.ns = cfg.ns;
    options.trials = *cfg.trials;
    options.base_seed = cfg.seed;
    options.workers = cfg.workers;
    options.cyclic = cfg.cyclic;
    if (auto exact = exact_indices(cfg))
    {
        switch (cfg.estimator)
        {
            case EstimatorKind::main:
                options.exact = exact->main;
                break;
            case EstimatorKind::total:
                options.exact = exact->total;
                break;
            default:
                options.exact = exact->shapley;
        }
    }

    auto const f = build_model(cfg.model);
    auto const space = build_space(cfg);
    try
    {
        auto const study = convergence_study(f, space, options);
        std::ostringstream os;
        write_convergence_csv(os, study);
        emit(cfg, os.str());
    }
    catch (ParameterError const& e)
    {
        throw ConfigError(e.what());
    }
}

void cmd_exact(AnalysisConfig const& cfg)
{
    if (!cfg.model.analytic())
    {
        throw CapabilityError("no closed-form indices for model '"
                              + cfg.model.name + "'");
    }
    auto const indices = exact_indices(cfg);
    if (!indices)
    {
        throw CapabilityError("closed forms hold only for the model's "
                              "default input distributions");
    }
    std::ostringstream os;
    if (cfg.format.value_or(OutputFormat::json) == OutputFormat::csv)
        write_exact_csv(os, *indices);
    else
        os << exact_report_json(cfg, *indices).dump(2) << '\n';
    emit(cfg, os.str());
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Shapley-effect global sensitivity analysis"};
    app.require_subcommand(1);

    Options analyze_opt, conv_opt, exact_opt;

    auto* analyze = app.add_subcommand("analyze", "estimate sensitivity "
                                                  "indices by Monte Carlo");
    add_common_options(analyze, analyze_opt);
    add_sampling_options(analyze, analyze_opt);

    auto* convergence = app.add_subcommand(
        "convergence", "mean SSE over seeded trials for a ladder of N");
    add_common_options(convergence, conv_opt);
    add_sampling_options(convergence, conv_opt);
    convergence->add_option("--trials", conv_opt.trials, "trials R per N");
    convergence->add_option("--ns", conv_opt.ns, "sample sizes, ascending");

    auto* exact = app.add_subcommand("exact",
                                     "closed-form indices of analytic models");
    add_common_options(exact, exact_opt);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*analyze)
            cmd_analyze(resolve(analyze_opt));
        else if (*convergence)
            cmd_convergence(resolve(conv_opt));
        else if (*exact)
            cmd_exact(resolve(exact_opt));
    }
    catch (EvaluationError const& e)
    {
        std::cerr << "evaluation error: " << e.what() << '\n';
        return exit_eval;
    }
    catch (DomainError const& e)
    {
        std::cerr << "evaluation error: " << e.what() << '\n';
        return exit_eval;
    }
    catch (shapley::Error const& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    }
    catch (nlohmann::json::exception const& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_ok;
}
