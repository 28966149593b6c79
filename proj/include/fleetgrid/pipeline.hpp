#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fleetgrid/analysis.hpp"
#include "fleetgrid/coupling.hpp"
#include "fleetgrid/scenario.hpp"
#include "fleetgrid/solver.hpp"

namespace fleetgrid {

enum class RunMode { base, uncoordinated, coordinated };

std::optional<RunMode> parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

// Exit codes shared by the pipeline and the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitPowerFlow = 5;

struct RunResult {
    int exit_code = kExitOk;
    std::string failed_stage;
    std::string error;
    std::optional<ScenarioReport> report;
    // Fleet operating cost under the fleet-only objective (distance plus
    // plug-priced charging), reported for both modes that solve an LP.
    std::optional<double> fleet_objective_usd;
};

/// Runs one experiment: exact base power flow only (base), the fleet
/// program followed by exact validation (uncoordinated), or the joint
/// program seeded with base-case linearization parameters followed by
/// exact validation (coordinated). All artifacts (MPS model, solution
/// values, reports, traces, manifest.json) land in `out_dir`.
RunResult run_pipeline(const Scenario& scenario, RunMode mode,
                       const std::filesystem::path& out_dir,
                       const std::string& solver_command = "");

}  // namespace fleetgrid
