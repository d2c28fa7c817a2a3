// Command-line front end: run / sweep experiments to CSV, self-validation, plot scripts.

#include "pasim/experiment.hpp"
#include "pasim/plot_script.hpp"
#include "pasim/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_validation = 2;

struct RunOptions
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
};

int run_experiments(const RunOptions& opt, bool power_sweep)
{
    pasim::ExperimentSpec spec;
    try
    {
        pasim::ConfigMap cfg;
        if (!opt.config_path.empty())
            cfg = pasim::load_config_file(opt.config_path);
        for (const auto& o : opt.overrides)
            pasim::apply_override(cfg, o);
        spec = pasim::experiment_from_config(cfg, power_sweep);
    }
    catch (const pasim::ConfigError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }

    std::vector<pasim::ExperimentRow> rows;
    try
    {
        rows = pasim::run_experiment(spec);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }

    const std::string path = !opt.output.empty() ? opt.output : spec.output_path;
    if (path.empty() || path == "-")
    {
        pasim::write_csv(std::cout, rows);
        return exit_ok;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        std::cerr << "error: config key 'output_csv': cannot write '" << path << "'\n";
        return exit_config;
    }
    pasim::write_csv(out, rows);
    return out ? exit_ok : exit_config;
}

int run_validate(const std::string& fault)
{
    pasim::validation::ValidationHooks hooks;
    if (fault == "chernoff-sign")
        hooks.chernoff_log = [](double s, std::span<const double> psi, double omega, double threshold) {
            // flips the sign of the s * Gamma_th term
            return pasim::chernoff_log_lower(s, psi, omega, threshold) - 2.0 * s * threshold;
        };
    else if (!fault.empty())
    {
        std::cerr << "error: unknown fault '" << fault << "'\n";
        return exit_config;
    }
    const auto report = pasim::validation::run_validation(hooks, [](const auto& r) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(40) << r.name << ' ' << r.detail
                  << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::defaultfloat
                  << std::endl;
    });
    const auto failed = std::count_if(report.results.begin(), report.results.end(), [](const auto& r) {
        return !r.passed;
    });
    std::cout << (failed == 0 ? "all " : "") << report.results.size() - failed << "/" << report.results.size()
              << " properties passed\n";
    return failed == 0 ? exit_ok : exit_validation;
}

int run_plot_script(const std::string& csv, const std::string& output)
{
    std::string script;
    try
    {
        script = pasim::plot_script_from_csv(csv);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    if (output.empty() || output == "-")
    {
        std::cout << script;
        return exit_ok;
    }
    std::ofstream out(output, std::ios::binary);
    out << script;
    if (!out)
    {
        std::cerr << "error: cannot write '" << output << "'\n";
        return exit_config;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pinching-antenna ISAC outage simulator and PA-activation optimizer"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Evaluate the configured scenario (one point unless lists are given)");
    auto* sweep = app.add_subcommand("sweep", "Sweep transmit power (default 0..40 dBm, 2 dB steps) and lists");
    for (auto* sub : {run, sweep})
    {
        sub->add_option("config", run_opt.config_path, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--set", run_opt.overrides, "Override a config key (key=value), repeatable")
            ->allow_extra_args(false);
        sub->add_option("-o,--output", run_opt.output, "CSV destination (default: output_csv key, else stdout)");
    }

    std::string fault;
    auto* validate = app.add_subcommand("validate", "Run the invariant suite and report each property");
    validate->add_option("--inject-fault", fault, "Deliberately break a component to test the suite (chernoff-sign)");

    std::string csv_path;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot-script", "Emit a gnuplot script for a results CSV");
    plot->add_option("csv", csv_path, "Results CSV")->required();
    plot->add_option("-o,--output", plot_out, "Script destination (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (*run)
        return run_experiments(run_opt, false);
    if (*sweep)
        return run_experiments(run_opt, true);
    if (*validate)
        return run_validate(fault);
    return run_plot_script(csv_path, plot_out);
}
