#pragma once

#include "hypfrac/funcspace.hpp"
#include "hypfrac/solver.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hypfrac::cli {

namespace fs = funcspace;
namespace sv = solver;

// exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;      // not converged, or an invariant failed
inline constexpr int exit_validation = 2;  // bad flags, malformed or out-of-range config
inline constexpr int exit_numerical = 3;   // solver, quadrature or table failure
inline constexpr int exit_threshold = 4;   // no admissible u0 for the critical problem

struct RunConfig {
    sv::ProblemSpec problem;
    struct Grid {
        double R_max = 20.0;
        std::size_t node_count = 400;
        fs::Spacing spacing = fs::Spacing::graded;
    } grid;
    struct Solver {
        double tol = 1e-6;
        int max_iter = 4000;
        int path_nodes = 32;
    } solver;
    struct IO {
        std::string out_dir = "hypfrac_out";
        std::string cache_dir = ".hypfrac_cache";
        std::vector<std::string> formats{"json", "csv", "plot"};
    } io;

    void validate() const;  // throws ValidationError (including out-of-range problem parameters)
    bool wants(const std::string& format) const;
    fs::GridOptions grid_options() const;
    sv::SolverOptions solver_options() const;
};

// Every section and field is optional; unknown keys are rejected. Throws ValidationError.
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& cfg);

// FNV-1a over (N, s, grid hash); further words (e.g. lambda) may be mixed in
std::uint64_t cache_key(int N, double s, std::uint64_t grid_hash, const std::vector<double>& extra = {});
std::string hex(std::uint64_t v);

// HYPFRAC_CACHE, when set, overrides the configured directory
std::string resolve_cache_dir(const std::string& configured);

// Quadratic forms and mixed constants, kept in memory and (with a directory) on disk.
// Files are replaced atomically; a header that does not match the request counts as stale.
class FormsCache {
public:
    explicit FormsCache(std::string dir = {});

    const fs::QuadraticForms& forms(const fs::RadialGrid& grid, double s);
    // concentration estimate of S_{lambda,s} with the default width sweep
    double mixed_constant(std::shared_ptr<const fs::RadialGrid> grid, double lambda, const fs::QuadraticForms& forms);

    const std::string& dir() const { return dir_; }
    int hits = 0, misses = 0, stale = 0;

private:
    std::string dir_;
    std::map<std::uint64_t, std::unique_ptr<fs::QuadraticForms>> forms_;
    std::map<std::uint64_t, double> constants_;
};

extern const std::vector<double> mixed_constant_widths;

void save_forms(const std::string& path, const fs::QuadraticForms& f);
// nullopt when the file is missing, truncated or written for another (N, s, grid)
std::optional<fs::QuadraticForms> load_forms(const std::string& path, int N, double s, std::uint64_t grid_hash);

void write_atomic(const std::string& path, const std::string& content);

std::string report_to_json(const sv::SolveReport& rep);
std::string threshold_search_to_json(const sv::ThresholdSearch& ts);
void write_plot_data(std::ostream& os, const sv::SolveReport& rep);

struct KernelArgs {
    int dim = 0;
    double s = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;
    int points = 0;
    std::string out;
};

int cmd_kernel(const KernelArgs& args, std::ostream& out, std::ostream& err);
int cmd_solve(const std::string& config_path, const std::optional<std::string>& mode, std::ostream& out,
              std::ostream& err);
int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err);

struct VerifyRow {
    std::string suite;
    std::string invariant;
    std::string measured;
    std::string bound;
    bool pass = false;
};

const std::vector<std::string>& suite_names();  // without "all"
// throws ValidationError for an unknown suite
std::vector<VerifyRow> run_suite(const std::string& suite, FormsCache& cache, std::ostream& progress);
void print_table(std::ostream& os, const std::vector<VerifyRow>& rows);

}  // namespace hypfrac::cli
