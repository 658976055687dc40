#include "hypfrac/cli.hpp"
#include "hypfrac/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hypfrac::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
    if (!obj.is_object()) throw ValidationError("config: '" + where + "' must be an object");
    for (const auto& [k, v] : obj.items())
        if (!known.count(k)) throw ValidationError("config: unknown field '" + where + "." + k + "'");
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string name = where + "." + key;
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError("config: '" + name + "' must be a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError("config: '" + name + "' must be an integer");
        const auto x = v.get<long long>();
        if constexpr (std::is_unsigned_v<T>)
            if (x < 0) throw ValidationError("config: '" + name + "' must be nonnegative");
        out = static_cast<T>(x);
    } else {
        if (!v.is_number()) throw ValidationError("config: '" + name + "' must be a number");
        out = v.get<double>();
    }
}

}  // namespace

void RunConfig::validate() const {
    try {
        problem.validate();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("config: problem: ") + e.what());
    }
    if (!(problem.lambda >= 0.0)) throw ValidationError("config: problem.lambda must be nonnegative");
    if (!(grid.R_max >= 5.0 && grid.R_max <= 60.0)) throw ValidationError("config: grid.R_max must lie in [5, 60]");
    if (grid.node_count < 50 || grid.node_count > 4000)
        throw ValidationError("config: grid.node_count must lie in [50, 4000]");
    if (!(solver.tol > 0.0 && solver.tol < 1.0)) throw ValidationError("config: solver.tol must lie in (0, 1)");
    if (solver.max_iter < 1) throw ValidationError("config: solver.max_iter must be positive");
    if (solver.path_nodes < 4) throw ValidationError("config: solver.path_nodes must be at least 4");
    if (io.out_dir.empty()) throw ValidationError("config: io.out_dir must not be empty");
    for (const auto& f : io.formats)
        if (f != "json" && f != "csv" && f != "plot")
            throw ValidationError("config: unknown output format '" + f + "' (json, csv, plot)");
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(io.formats.begin(), io.formats.end(), format) != io.formats.end();
}

fs::GridOptions RunConfig::grid_options() const {
    return fs::scaled_grid_options(grid.R_max, grid.node_count, grid.spacing);
}

sv::SolverOptions RunConfig::solver_options() const {
    sv::SolverOptions o;
    o.tol = solver.tol;
    o.max_iter = solver.max_iter;
    o.path_nodes = solver.path_nodes;
    return o;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
    RunConfig c;
    reject_unknown(j, "config", {"problem", "grid", "solver", "io"});
    if (j.contains("problem")) {
        const json& p = j["problem"];
        reject_unknown(p, "problem", {"N", "s", "lambda", "p", "mode"});
        read(p, "problem", "N", c.problem.N);
        read(p, "problem", "s", c.problem.s);
        read(p, "problem", "lambda", c.problem.lambda);
        read(p, "problem", "p", c.problem.p);
        std::string mode = sv::to_string(c.problem.mode);
        read(p, "problem", "mode", mode);
        c.problem.mode = sv::mode_from_string(mode);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid", {"R_max", "node_count", "spacing"});
        read(g, "grid", "R_max", c.grid.R_max);
        read(g, "grid", "node_count", c.grid.node_count);
        std::string sp = fs::to_string(c.grid.spacing);
        read(g, "grid", "spacing", sp);
        c.grid.spacing = fs::spacing_from_string(sp);
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown(s, "solver", {"tol", "max_iter", "path_nodes"});
        read(s, "solver", "tol", c.solver.tol);
        read(s, "solver", "max_iter", c.solver.max_iter);
        read(s, "solver", "path_nodes", c.solver.path_nodes);
    }
    if (j.contains("io")) {
        const json& o = j["io"];
        reject_unknown(o, "io", {"out_dir", "cache_dir", "formats"});
        read(o, "io", "out_dir", c.io.out_dir);
        read(o, "io", "cache_dir", c.io.cache_dir);
        if (o.contains("formats")) {
            const json& f = o["formats"];
            if (!f.is_array()) throw ValidationError("config: 'io.formats' must be an array of strings");
            c.io.formats.clear();
            for (const auto& x : f) {
                if (!x.is_string()) throw ValidationError("config: 'io.formats' must be an array of strings");
                c.io.formats.push_back(x.get<std::string>());
            }
        }
    }
    c.validate();
    return c;
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["problem"] = {{"N", c.problem.N},
                    {"s", c.problem.s},
                    {"lambda", c.problem.lambda},
                    {"p", c.problem.p},
                    {"mode", sv::to_string(c.problem.mode)}};
    j["grid"] = {{"R_max", c.grid.R_max}, {"node_count", c.grid.node_count}, {"spacing", fs::to_string(c.grid.spacing)}};
    j["solver"] = {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"path_nodes", c.solver.path_nodes}};
    j["io"] = {{"out_dir", c.io.out_dir}, {"cache_dir", c.io.cache_dir}, {"formats", c.io.formats}};
    return j.dump(2);
}

}  // namespace hypfrac::cli
