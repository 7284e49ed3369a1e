#pragma once

#include "drmdp/dp.hpp"
#include "drmdp/model.hpp"

#include <string>

/// JSON model files.
///
///     { "format": "drmdp-model", "version": 1,
///       "horizon": { "type": "finite", "stages": 3 }
///                | { "type": "finite_stationary", "periods": 4 }
///                | { "type": "infinite", "discount": 0.9 },
///       "initial": "<state name>",
///       "states": [ { "name", "stage", "actions", "successors", "terminal",
///                     "factor_map": { "dim", "P", "p0", "R", "r0" },
///                     "ambiguity": { "builder": ..., builder parameters } } ] }
///
/// Unknown keys are rejected. Errors carry the line and column of the
/// offending value.
namespace drmdp::io {

DrMdpModel parse_model(const std::string& text);
DrMdpModel load_model(const std::string& path);

/// Explicit form: staged states, full factor maps and generic ambiguity blocks.
std::string serialize_model(const DrMdpModel& model);

struct SolveSummary {
    std::string horizon;
    std::string initial_state;
    double value = 0.0;
    double saddle_residual = 0.0;
    long iterations = 0;
    double stationarity_residual = 0.0;
    double bellman_residual = 0.0;
    bool slater_surrogates_passed = true;
};

SolveSummary summarize(const DrMdpModel& model, const dp::DpSolution& sol, bool slater_surrogates_passed);
std::string summary_json(const SolveSummary& s);

/// values.csv, policy.csv and summary.json under `dir`.
void write_solution(const std::string& dir, const DrMdpModel& model, const dp::DpSolution& sol,
                    const SolveSummary& summary);

} // namespace drmdp::io
