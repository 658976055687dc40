#include "hypfrac/cli.hpp"

#include "json.hpp"

#include <cmath>
#include <iomanip>

namespace hypfrac::cli {

using nlohmann::ordered_json;

namespace {

// NaN and infinities become null
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

std::string report_to_json(const sv::SolveReport& rep) {
    ordered_json j;
    ordered_json sol;
    sol["r"] = ordered_json::array();
    sol["u"] = ordered_json::array();
    if (rep.solution.grid)
        for (std::size_t i = 0; i < rep.solution.size(); ++i) {
            sol["r"].push_back(number(rep.solution.grid->nodes[i]));
            sol["u"].push_back(number(rep.solution.values[Eigen::Index(i)]));
        }
    j["solution"] = sol;
    j["energy"] = number(rep.energy);
    j["nehari_value"] = number(rep.nehari_value);
    j["residual"] = number(rep.residual);
    j["c_star"] = number(rep.c_star);
    j["mp_level_m"] = number(rep.mp_level_m);
    j["beta"] = number(rep.beta);
    j["mp_radius"] = number(rep.mp_radius);
    j["threshold"] = number(rep.threshold);
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    ordered_json hist = ordered_json::array();
    for (const auto& h : rep.history)
        hist.push_back({{"iteration", h.iteration},
                        {"energy", number(h.energy)},
                        {"residual", number(h.residual)},
                        {"nehari_slope", number(h.nehari_slope)}});
    j["history"] = hist;
    ordered_json checks = ordered_json::array();
    for (const auto& [name, ok] : rep.checks) checks.push_back({{"name", name}, {"pass", ok}});
    j["checks"] = checks;
    j["warnings"] = rep.warnings;
    return j.dump(2) + "\n";
}

std::string threshold_search_to_json(const sv::ThresholdSearch& ts) {
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < ts.checks.size(); ++k) {
        const auto& c = ts.checks[k];
        rows.push_back({{"profile", ts.labels[k]},
                        {"sup_value", number(c.sup_value)},
                        {"zeta", number(c.zeta)},
                        {"threshold", number(c.threshold)},
                        {"passes", c.passes}});
    }
    ordered_json j;
    j["candidates"] = rows;
    j["best"] = ts.best;
    j["first_passing"] = ts.first_passing;
    return j.dump(2) + "\n";
}

void write_plot_data(std::ostream& os, const sv::SolveReport& rep) {
    // two gnuplot blocks: index 0 is the profile, index 1 the iteration history
    os << std::setprecision(17);
    os << "# r u\n";
    if (rep.solution.grid)
        for (std::size_t i = 0; i < rep.solution.size(); ++i)
            os << rep.solution.grid->nodes[i] << ' ' << rep.solution.values[Eigen::Index(i)] << '\n';
    os << "\n\n# iteration energy residual\n";
    for (const auto& h : rep.history) os << h.iteration << ' ' << h.energy << ' ' << h.residual << '\n';
}

}  // namespace hypfrac::cli
