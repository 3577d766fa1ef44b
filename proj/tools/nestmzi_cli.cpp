// Command-line front end. All real work lives in the library; this file only
// maps flags onto a ScenarioConfig and exceptions onto exit codes:
// 0 success, 1 runtime failure, 2 usage or network-parse failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "nestmzi/cli.hpp"

namespace {

void add_common(CLI::App* cmd, nestmzi::ScenarioConfig& cfg) {
    cmd->add_option("--preset", cfg.preset, "built-in network name");
    cmd->add_option("--net", cfg.net_file, "network description file");
    cmd->add_option("--mode", cfg.mode_text, "engine: modal[:K] or grid[:N[,L]]");
    cmd->add_option("--rate", cfg.rate_hz, "sample rate in Hz");
    cmd->add_option("--duration", cfg.duration_s, "trace length in seconds");
    cmd->add_option("--eps-scale", cfg.eps_scale, "multiplier on every vibration amplitude");
    cmd->add_option("--detector", cfg.detector, "detector to analyse (default: the only one)");
    cmd->add_option("--out", cfg.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nested Mach-Zehnder simulator and analysis toolkit"};
    app.require_subcommand(1);

    nestmzi::ScenarioConfig cfg;

    CLI::App* run = app.add_subcommand("run", "simulate and write traces, spectra, and a report");
    add_common(run, cfg);
    run->add_option("--noise", cfg.noise_sigma, "Gaussian noise level on the difference signal");
    run->add_option("--seed", cfg.seed, "noise seed");

    std::vector<double> eps_list;
    CLI::App* sweep = app.add_subcommand("sweep", "fit peak-power scaling against deflection");
    add_common(sweep, cfg);
    sweep->add_option("--eps", eps_list, "comma-separated deflections to sweep")->delimiter(',');

    std::vector<std::string> convention;
    bool all_conventions = false;
    CLI::App* weak = app.add_subcommand("weak", "weak values on every topological cut");
    add_common(weak, cfg);
    weak->add_option("--convention", convention, "adjoint | c-arm | custom FILE")
        ->expected(1, 2);
    weak->add_flag("--all-conventions", all_conventions, "report every applicable convention");
    weak->add_option("--c-arm", cfg.c_arm, "arm kept by the single-arm convention");

    int max_degree = 2;
    bool verify = false;
    CLI::App* orders = app.add_subcommand("orders", "symbolic spectral-line table");
    add_common(orders, cfg);
    orders->add_option("--max-degree", max_degree, "highest deflection order to expand");
    orders->add_flag("--verify", verify, "also simulate and compare measured peaks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return nestmzi::cmd_run(cfg);
        if (sweep->parsed()) return nestmzi::cmd_sweep(cfg, eps_list);
        if (weak->parsed()) {
            std::string conv, custom_file;
            if (!convention.empty()) {
                conv = convention[0];
                if (conv == "custom") {
                    if (convention.size() != 2)
                        throw nestmzi::usage_error("--convention custom needs a state file");
                    custom_file = convention[1];
                } else if (convention.size() != 1) {
                    throw nestmzi::usage_error("only the custom convention takes a file");
                }
            }
            return nestmzi::cmd_weak(cfg, conv, all_conventions, custom_file);
        }
        if (orders->parsed()) return nestmzi::cmd_orders(cfg, max_degree, verify);
    } catch (const nestmzi::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const nestmzi::usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
