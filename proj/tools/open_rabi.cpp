// Command-line front end: simulate the driven-free open Rabi model, extract
// asymptotic photon rates and steady states, and reproduce the bundled
// reference tables and figure sweeps as machine-readable CSV/JSON.

#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "openrabi/openrabi.hpp"

namespace {

using namespace openrabi;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    std::string format;
    int workers = -1;
    std::string bounds;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (INI-style)");
    cmd->add_option("--set", args.sets,
                    "override one configuration key, e.g. --set model.g=0.03")
        ->take_all();
    cmd->add_option("--out", args.out_path, "output path ('-' = stdout)");
    cmd->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", args.workers, "worker pool size for sweeps");
    cmd->add_option("--bounds", args.bounds,
                    "strict: exit 4 on analytic bound violation; warn: report only")
        ->check(CLI::IsMember({"strict", "warn"}));
}

RunConfig build_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = load_config_file(args.config_path, cfg);
    for (const std::string& s : args.sets) apply_override(cfg, s);
    // Dedicated flags win over both the file and --set.
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    if (!args.format.empty()) cfg.set("output.format", args.format);
    if (args.workers >= 0) cfg.workers = args.workers;
    if (!args.bounds.empty()) cfg.set("output.bounds", args.bounds);
    cfg.validate();
    return cfg;
}

int run_to_path(const RunConfig& cfg,
                const std::function<int(const RunConfig&, std::ostream&, std::ostream&)>& fn) {
    if (cfg.out_path == "-" || cfg.out_path.empty())
        return fn(cfg, std::cout, std::cerr);
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + cfg.out_path + "'");
    return fn(cfg, out, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open-rabi: open Rabi model simulator and analytic checks"};
    app.require_subcommand(1);

    CommonArgs rate_args, steady_args, evolve_args, sweep_args, table_args, fig_args;
    int table_which = 1, fig_which = 1;

    add_common(app.add_subcommand("rate", "asymptotic photon generation rate"),
               rate_args);
    add_common(app.add_subcommand("steady", "stationary state and bounds"), steady_args);
    add_common(app.add_subcommand("evolve", "full observable time series"), evolve_args);
    add_common(app.add_subcommand("sweep", "one-parameter sweep (rate or steady probe)"),
               sweep_args);
    CLI::App* table = app.add_subcommand("table", "reproduce a bundled reference table");
    table->add_option("--which", table_which, "table number")->check(CLI::IsMember({1, 2}));
    add_common(table, table_args);
    CLI::App* fig = app.add_subcommand("fig", "emit a bundled figure sweep as CSV");
    fig->add_option("--which", fig_which, "figure number")->check(CLI::IsMember({1, 2}));
    add_common(fig, fig_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? openrabi::harness::exit_code::config : 0;
    }

    using namespace openrabi;
    using namespace openrabi::harness;
    try {
        if (app.got_subcommand("rate"))
            return run_to_path(build_config(rate_args), [](const RunConfig& c,
                                                           std::ostream& o,
                                                           std::ostream& d) {
                return cmd_rate(c, o, d);
            });
        if (app.got_subcommand("steady"))
            return run_to_path(build_config(steady_args), [](const RunConfig& c,
                                                             std::ostream& o,
                                                             std::ostream& d) {
                return cmd_steady(c, o, d);
            });
        if (app.got_subcommand("evolve"))
            return run_to_path(build_config(evolve_args), [](const RunConfig& c,
                                                             std::ostream& o,
                                                             std::ostream& d) {
                return cmd_evolve(c, o, d);
            });
        if (app.got_subcommand("sweep"))
            return run_to_path(build_config(sweep_args), [](const RunConfig& c,
                                                            std::ostream& o,
                                                            std::ostream& d) {
                return cmd_sweep(c, o, d);
            });
        if (app.got_subcommand("table"))
            return run_to_path(build_config(table_args),
                               [table_which](const RunConfig& c, std::ostream& o,
                                             std::ostream& d) {
                                   return cmd_table(table_which, c, o, d);
                               });
        if (app.got_subcommand("fig"))
            return run_to_path(build_config(fig_args),
                               [fig_which](const RunConfig& c, std::ostream& o,
                                           std::ostream& d) {
                                   return cmd_fig(fig_which, c, o, d);
                               });
    } catch (const ConfigError& e) {
        std::cerr << "open-rabi: config error: " << e.what() << "\n";
        return exit_code::config;
    } catch (const InvalidParams& e) {
        std::cerr << "open-rabi: config error: " << e.what() << "\n";
        return exit_code::config;
    } catch (const NoSteadyState& e) {
        std::cerr << "open-rabi: no steady state: " << e.what()
                  << "\nhint: add cavity (kappa) or atomic (gamma) damping, or use "
                     "'rate' for the linear-growth regime\n";
        return exit_code::numeric;
    } catch (const DegenerateKernel& e) {
        std::cerr << "open-rabi: degenerate stationary kernel: " << e.what()
                  << "\nhint: couple every conserved sector (g > 0) or add a "
                     "dissipator that mixes them\n";
        return exit_code::numeric;
    } catch (const std::exception& e) {
        std::cerr << "open-rabi: " << e.what() << "\n";
        return exit_code::numeric;
    }
    return exit_code::config;
}
