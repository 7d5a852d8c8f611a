#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pathlab/csvio.hpp"
#include "pathlab/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_path;
    std::string format = "csv";
    bool strict = false;
    unsigned threads = 1;
    std::string kneser;
    std::string graph;
    std::vector<std::string> extras;
};

int run(const std::string& name, const CliOptions& opts) {
    pathlab::ExperimentConfig config;
    config.name = name;
    try {
        if (!opts.config_path.empty()) {
            config.params = pathlab::parse_config_file(opts.config_path);
        }
        for (const std::string& extra : opts.extras) {
            const auto eq = extra.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw pathlab::ConfigError("expected key=value argument, got: " + extra);
            }
            // Command-line overrides win over the config file.
            config.params[extra.substr(0, eq)] = extra.substr(eq + 1);
        }
        if (!opts.kneser.empty()) {
            config.params["kneser"] = opts.kneser;
        }
        if (!opts.graph.empty()) {
            config.params["graph"] = opts.graph;
        }
        if (opts.format == "csv") {
            config.format = pathlab::OutputFormat::csv;
        } else if (opts.format == "json") {
            config.format = pathlab::OutputFormat::json;
        } else {
            throw pathlab::ConfigError("format must be csv or json, got: " + opts.format);
        }
    } catch (const pathlab::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    }
    if (opts.seed_given) {
        config.seed = opts.seed;
    }
    config.out_path = opts.out_path;
    config.strict = opts.strict;
    config.threads = opts.threads;

    const pathlab::ExperimentResult result = pathlab::run_experiment(config);
    if (result.exit_code != 0) {
        std::cerr << (result.exit_code == 2 ? "config error: "
                      : result.exit_code == 3 ? "tolerance violation: "
                                              : "numeric failure: ")
                  << result.message << "\n";
    } else {
        std::cout << result.artifact << "\n";
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathlab: batch experiment runner for the path-integral laboratory"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string chosen;
    for (const std::string& name : pathlab::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, pathlab::experiment_description(name));
        sub->add_option("--config", opts.config_path, "flat key=value config file");
        sub->add_option("--seed", opts.seed, "RNG seed (required for stochastic experiments)")
            ->each([&opts](const std::string&) { opts.seed_given = true; });
        sub->add_option("--out", opts.out_path, "output path (default <experiment>.<format>)");
        sub->add_option("--format", opts.format, "csv or json")->capture_default_str();
        sub->add_flag("--strict", opts.strict, "exit 3 when a tolerance is violated");
        sub->add_option("--threads", opts.threads, "worker cap for sampling loops")
            ->capture_default_str();
        if (name == "sq-walk" || name == "sq-consistency") {
            sub->add_option("--kneser", opts.kneser, "bipartite Kneser parameters n,k");
            sub->add_option("--graph", opts.graph, "edge-list file (one 'u v' per line)");
        }
        sub->allow_extras();
        sub->callback([&chosen, sub, name]() { chosen = name; });
        (void)sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommand(chosen);
    opts.extras = sub->remaining();
    return run(chosen, opts);
}
