#include "hypfrac/cli.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/kernel.hpp"

#include "json.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hypfrac::cli {

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.io.out_dir) / name).string();
}

}  // namespace

int cmd_kernel(const KernelArgs& a, std::ostream& out, std::ostream& err) {
    if (a.points < 16) {
        err << "error: --points must be at least 16\n";
        return exit_validation;
    }
    if (a.dim < 2) {
        err << "error: --dim must be at least 2\n";
        return exit_validation;
    }
    if (!(a.s > 0.0 && a.s < 1.0)) {
        err << "error: --s must lie in (0, 1)\n";
        return exit_validation;
    }
    if (!(a.rho_min > 0.0 && a.rho_max > a.rho_min)) {
        err << "error: need 0 < --rho-min < --rho-max\n";
        return exit_validation;
    }
    if (a.out.empty()) {
        err << "error: --out is required\n";
        return exit_validation;
    }
    kernel::KernelTable t;
    try {
        t = kernel::build_kernel_table(a.dim, a.s, a.rho_min, a.rho_max, a.points);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    std::ostringstream csv;
    csv << std::setprecision(17) << "rho,kernel_value\n";
    for (std::size_t i = 0; i < t.rho_grid.size(); ++i) csv << t.rho_grid[i] << ',' << t.values[i] << '\n';
    try {
        write_atomic(a.out, csv.str());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    out << std::setprecision(6) << "wrote " << t.rho_grid.size() << " rows to " << a.out
        << "; near-field exponent " << t.near_exponent << " (expected " << -(a.dim + 2 * a.s)
        << "), far-field rate " << t.far_rate << " (expected " << a.dim - 1 << ")\n";
    return exit_ok;
}

int cmd_solve(const std::string& config_path, const std::optional<std::string>& mode, std::ostream& out,
              std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    RunConfig cfg;
    try {
        std::ifstream is(config_path);
        if (!is) throw ValidationError("cannot read config file '" + config_path + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        cfg = parse_config(ss.str());
        if (mode) {
            cfg.problem.mode = sv::mode_from_string(*mode);
            cfg.validate();
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    const std::string cache_dir = resolve_cache_dir(cfg.io.cache_dir);
    FormsCache cache(cache_dir);
    sv::SolveReport rep;
    std::string outcome;
    int code = exit_ok;
    std::optional<double> S_mixed;
    try {
        std::filesystem::create_directories(cfg.io.out_dir);
        const auto grid = std::make_shared<const fs::RadialGrid>(fs::make_grid(cfg.problem.N, cfg.grid_options()));
        const auto& forms = cache.forms(*grid, cfg.problem.s);
        const auto opt = cfg.solver_options();
        if (cfg.problem.mode == sv::Mode::subcritical) {
            rep = sv::solve_subcritical(cfg.problem, forms, sv::default_initial(grid), opt);
        } else {
            S_mixed = cache.mixed_constant(grid, cfg.problem.lambda, forms);
            const auto search = sv::search_threshold_profiles(cfg.problem, grid, forms, *S_mixed);
            write_atomic(out_path(cfg, "threshold_search.json"), threshold_search_to_json(search));
            const auto& best = search.checks[std::size_t(search.best)];
            if (!best.passes) throw sv::ThresholdFailure(best.sup_value, best.threshold);
            out << "u0: " << search.labels[std::size_t(search.best)] << '\n';
            rep = sv::solve_critical(cfg.problem, forms, search.best_profile, *S_mixed, opt);
        }
        if (cfg.wants("json")) write_atomic(out_path(cfg, "report.json"), report_to_json(rep));
        if (cfg.wants("csv")) {
            std::ostringstream csv;
            fs::write_csv(csv, rep.solution);
            write_atomic(out_path(cfg, "profile.csv"), csv.str());
        }
        if (cfg.wants("plot")) {
            std::ostringstream plot;
            write_plot_data(plot, rep);
            write_atomic(out_path(cfg, "plot.dat"), plot.str());
        }
        const bool ok = rep.converged && rep.all_checks_pass();
        code = ok ? exit_ok : exit_failed;
        outcome = ok ? "solved" : "failed checks";
        out << std::setprecision(10) << "mode " << sv::to_string(cfg.problem.mode) << ": energy " << rep.energy
            << ", residual " << rep.residual << ", iterations " << rep.iterations
            << (rep.converged ? ", converged" : ", NOT converged") << '\n';
        for (const auto& [name, pass] : rep.checks)
            out << "  " << (pass ? "pass  " : "FAIL  ") << name << '\n';
        for (const auto& w : rep.warnings) out << "  warning: " << w << '\n';
    } catch (const sv::ThresholdFailure& e) {
        err << std::setprecision(10) << "threshold failure: sup_value = " << e.sup_value
            << ", threshold = " << e.threshold << '\n';
        code = exit_threshold;
        outcome = "threshold failure";
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        code = exit_numerical;
        outcome = "numerical failure";
    }

    // run metadata lives apart from the deterministic outputs
    try {
        nlohmann::ordered_json meta;
        meta["started_utc"] = started;
        meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        meta["config_path"] = config_path;
        meta["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
        meta["cache_dir"] = cache_dir;
        meta["cache"] = {{"hits", cache.hits}, {"misses", cache.misses}, {"stale", cache.stale}};
        if (S_mixed) meta["S_mixed_estimate"] = *S_mixed;
        meta["exit_code"] = code;
        meta["outcome"] = outcome;
        write_atomic(out_path(cfg, "metadata.json"), meta.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "warning: cannot write metadata: " << e.what() << '\n';
    }
    return code;
}

int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err) {
    std::vector<std::string> suites;
    if (suite == "all") {
        suites = suite_names();
    } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
        suites = {suite};
    } else {
        err << "error: unknown suite '" << suite << "'\n";
        return exit_validation;
    }
    FormsCache cache(resolve_cache_dir(""));
    std::vector<VerifyRow> rows;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        for (const auto& s : suites) {
            const auto s0 = std::chrono::steady_clock::now();
            auto r = run_suite(s, cache, err);
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
            err << std::fixed << std::setprecision(1) << "[" << s << "] " << dt << " s\n" << std::defaultfloat;
            rows.insert(rows.end(), r.begin(), r.end());
        }
    } catch (const std::exception& e) {
        print_table(out, rows);
        err << "numerical failure: " << e.what() << '\n';
        return exit_failed;
    }
    print_table(out, rows);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t failed = 0;
    for (const auto& r : rows) failed += !r.pass;
    out << std::fixed << std::setprecision(1) << rows.size() - failed << '/' << rows.size() << " invariants pass in "
        << total << " s\n";
    if (failed) {
        out << "failing invariants:\n";
        for (const auto& r : rows)
            if (!r.pass) out << "  " << r.suite << ": " << r.invariant << " (" << r.measured << ", need " << r.bound << ")\n";
        return exit_failed;
    }
    return exit_ok;
}

void print_table(std::ostream& os, const std::vector<VerifyRow>& rows) {
    std::size_t w0 = 5, w1 = 9, w2 = 8;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.suite.size());
        w1 = std::max(w1, r.invariant.size());
        w2 = std::max(w2, r.measured.size());
    }
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e) {
        os << std::left << std::setw(int(w0)) << a << "  " << std::setw(int(w1)) << b << "  " << std::setw(int(w2)) << c
           << "  " << std::setw(6) << d << "  " << e << '\n';
    };
    line("suite", "invariant", "measured", "result", "bound");
    for (const auto& r : rows) line(r.suite, r.invariant, r.measured, r.pass ? "pass" : "FAIL", r.bound);
}

}  // namespace hypfrac::cli
