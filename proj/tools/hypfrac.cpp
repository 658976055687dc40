#include "hypfrac/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace cli = hypfrac::cli;

int main(int argc, char** argv) {
    CLI::App app{"hypfrac: fractional kernels, quadratic forms and ground states on hyperbolic space"};
    app.require_subcommand(1);

    cli::KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "tabulate the kernel K_s(rho) on log-spaced points");
    kernel->add_option("--dim", ka.dim, "dimension N >= 2")->required();
    kernel->add_option("--s", ka.s, "order s in (0, 1)")->required();
    kernel->add_option("--rho-min", ka.rho_min, "smallest distance")->required();
    kernel->add_option("--rho-max", ka.rho_max, "largest distance")->required();
    kernel->add_option("--points", ka.points, "number of points (>= 16)")->required();
    kernel->add_option("--out", ka.out, "output CSV path")->required();

    std::string config;
    std::optional<std::string> mode;
    auto* solve = app.add_subcommand("solve", "solve the subcritical or critically perturbed problem");
    solve->add_option("--config", config, "run configuration (JSON)")->required();
    solve->add_option("--mode", mode, "override problem.mode")->check(CLI::IsMember({"subcritical", "critical"}));

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run the property suites and print a pass/fail table");
    verify->add_option("--suite", suite, "suite to run")
        ->required()
        ->check(CLI::IsMember({"kernel", "embedding", "nehari", "maxprinciple", "critical", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return cli::exit_validation;
    }

    if (*kernel) return cli::cmd_kernel(ka, std::cout, std::cerr);
    if (*solve) return cli::cmd_solve(config, mode, std::cout, std::cerr);
    return cli::cmd_verify(suite, std::cout, std::cerr);
}
