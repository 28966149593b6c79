#include "fleetgrid/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "fleetgrid/mps.hpp"

namespace fleetgrid {

std::optional<RunMode> parse_run_mode(const std::string& name) {
    if (name == "base") return RunMode::base;
    if (name == "uncoordinated") return RunMode::uncoordinated;
    if (name == "coordinated") return RunMode::coordinated;
    return std::nullopt;
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::base: return "base";
        case RunMode::uncoordinated: return "uncoordinated";
        case RunMode::coordinated: return "coordinated";
    }
    return "base";
}

namespace {

void write_solution_values(const LpModel& model, const LpSolution& sol,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    char buf[64];
    for (std::size_t v = 0; v < model.num_variables(); ++v) {
        std::snprintf(buf, sizeof(buf), " %.17g\n", sol.values[v]);
        out << model.variable(static_cast<VarId>(v)).name << buf;
    }
}

void write_voltages_csv(const Pdn& pdn, const std::vector<PowerFlowSolution>& series,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "t,bus,phase,vmag_pu,angle_deg\n";
    char buf[120];
    for (const auto& sol : series)
        for (std::size_t b = 0; b < pdn.buses.size(); ++b)
            for (std::size_t p = 0; p < pdn.buses[b].phases.size(); ++p) {
                const Complex v = sol.v[b][static_cast<Eigen::Index>(p)];
                std::snprintf(buf, sizeof(buf), "%d,%zu,%c,%.10g,%.10g\n", sol.t, b,
                              phase_letter(pdn.buses[b].phases[p]), std::abs(v),
                              std::arg(v) * 180.0 / std::numbers::pi);
                out << buf;
            }
}

void write_schedule_csv(const FleetSchedule& schedule, const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "kind,from,to,t,c,flow\n";
    char buf[120];
    for (const auto& f : schedule.flows) {
        std::snprintf(buf, sizeof(buf), "%c,%u,%u,%d,%d,%.10g\n", f.kind, f.tail.vertex,
                      f.head.vertex, f.tail.t, f.tail.c, f.flow);
        out << buf;
    }
}

struct StageClock {
    std::vector<std::pair<std::string, double>> stages;
    std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    void mark(const std::string& name) {
        auto now = std::chrono::steady_clock::now();
        stages.emplace_back(name, std::chrono::duration<double>(now - last).count());
        last = now;
    }
};

void write_manifest(const std::filesystem::path& dir, const Scenario& sc, RunMode mode,
                    const StageClock& clock, const std::vector<std::string>& artifacts,
                    const std::string& linearization, const RunResult& result) {
    nlohmann::json j;
    j["mode"] = to_string(mode);
    j["seed"] = sc.seed;
    j["exit_code"] = result.exit_code;
    if (!result.error.empty()) {
        j["error"] = result.error;
        j["failed_stage"] = result.failed_stage;
    }
    j["stages"] = nlohmann::json::array();
    for (const auto& [name, seconds] : clock.stages)
        j["stages"].push_back({{"name", name}, {"seconds", seconds}});
    j["artifacts"] = artifacts;
    j["linearization"] = linearization;
    if (result.fleet_objective_usd) j["fleet_objective_usd"] = *result.fleet_objective_usd;
    j["timestamp_utc"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream out(dir / "manifest.json");
    out << j.dump(1) << '\n';
}

std::vector<double> charging_trace(const FleetSchedule& schedule, int n_t) {
    std::vector<double> trace(static_cast<std::size_t>(n_t), 0.0);
    for (const auto& per_charger : schedule.charger_occupancy)
        for (std::size_t ti = 0; ti < per_charger.size(); ++ti) trace[ti] += per_charger[ti];
    return trace;
}

ScenarioReport build_report(const Scenario& sc, RunMode mode,
                            const std::vector<std::vector<PowerFlowSolution>>& base,
                            const std::vector<std::vector<PowerFlowSolution>>& run,
                            const std::vector<ControllableLoadSeries>& loads,
                            double rebalancing_km, const std::vector<double>& charging) {
    ScenarioReport report;
    report.mode = to_string(mode);
    report.dt_hours = sc.dt_hours;
    report.violations = summarize_violations(sc.pdns, run, sc.dt_hours,
                                             sc.report.serious_du_threshold);
    report.energy = energy_and_cost_accounting(sc.pdns, base, run, loads, sc.dt_hours,
                                               rebalancing_km, sc.distance_price);
    for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
        report.substation_base_mva.push_back(substation_apparent_mva(sc.pdns[d], base[d]));
        report.substation_run_mva.push_back(substation_apparent_mva(sc.pdns[d], run[d]));
        report.rating_mva.push_back(sc.pdns[d].rating * sc.pdns[d].s_base_va / 1e6);
        report.price_per_kwh.push_back(sc.pdns[d].price_per_kwh);
    }
    report.charging_vehicles = charging;
    return report;
}

}  // namespace

RunResult run_pipeline(const Scenario& sc, RunMode mode, const std::filesystem::path& out_dir,
                       const std::string& solver_command) {
    RunResult result;
    StageClock clock;
    std::vector<std::string> artifacts;
    std::string linearization = "none";
    std::filesystem::create_directories(out_dir);

    try {
        // Exact base case: always needed, both as the uncoordinated/
        // coordinated comparison baseline and as the base-mode result.
        std::vector<std::vector<PowerFlowSolution>> base;
        for (const auto& pdn : sc.pdns)
            base.push_back(solve_power_flow_series(pdn, base_injections(pdn), sc.pf));
        clock.mark("base-power-flow");

        if (mode == RunMode::base) {
            std::vector<ControllableLoadSeries> loads;
            for (const auto& pdn : sc.pdns) {
                ControllableLoadSeries zero;
                zero.s.resize(static_cast<std::size_t>(sc.n_t));
                for (auto& at_t : zero.s)
                    for (const auto& slot : pdn.controllable)
                        at_t.push_back(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(
                            pdn.buses[static_cast<std::size_t>(slot.bus)].phases.size())));
                loads.push_back(std::move(zero));
            }
            auto report = build_report(sc, mode, base, base, loads, 0.0,
                                       std::vector<double>(static_cast<std::size_t>(sc.n_t)));
            emit_report(report, sc.report, out_dir);
            for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
                const auto name = "voltages_" + sc.pdns[d].id + ".csv";
                write_voltages_csv(sc.pdns[d], base[d], out_dir / name);
                artifacts.push_back(name);
            }
            for (const char* name : {"report.json", "du_events.csv", "ds_events.csv",
                                     "du_hist.csv", "ds_hist.csv", "substation_load.csv",
                                     "charging_vehicles.csv"})
                artifacts.emplace_back(name);
            clock.mark("report");
            result.report = std::move(report);
            write_manifest(out_dir, sc, mode, clock, artifacts, linearization, result);
            return result;
        }

        // Assemble the requested program.
        LpModel* model = nullptr;
        UncoordinatedAssembly fleet_only;
        JointAssembly joint;
        const EamodFragment* eamod = nullptr;
        const ExpandedGraph* expanded = nullptr;
        if (mode == RunMode::uncoordinated) {
            fleet_only = assemble_uncoordinated(sc);
            model = &fleet_only.model;
            eamod = &fleet_only.eamod;
            expanded = &fleet_only.expanded;
        } else {
            joint = assemble_coordinated(sc, sc.pf);
            model = &joint.model;
            eamod = &joint.eamod;
            expanded = &joint.expanded;
            linearization = "base-case-estimate";
        }
        clock.mark("assemble");

        export_mps(*model, out_dir / "model.mps");
        artifacts.emplace_back("model.mps");
        artifacts.emplace_back("model.mps.names");
        clock.mark("export");

        ExternalMpsSolver adapter(
            default_solver_command(!solver_command.empty() ? solver_command
                                                           : sc.solver.command));
        LpSolution solution = solve(*model, adapter, sc.solver.feasibility_tol);
        clock.mark("solve");
        if (solution.status != LpStatus::optimal) {
            result.exit_code =
                solution.status == LpStatus::infeasible ? kExitInfeasible : kExitSolver;
            result.failed_stage = "solve";
            result.error = "solver status: " + to_string(solution.status);
            write_manifest(out_dir, sc, mode, clock, artifacts, linearization, result);
            return result;
        }
        write_solution_values(*model, solution, out_dir / "solution.txt");
        artifacts.emplace_back("solution.txt");

        auto schedule = extract_fleet_solution(*model, *eamod, *expanded, sc.road, sc.chargers,
                                               solution, sc.solver.feasibility_tol);
        result.fleet_objective_usd = eamod_operating_cost(*eamod, *expanded, sc.road,
                                                          sc.chargers, sc.distance_price,
                                                          solution);
        write_schedule_csv(schedule, out_dir / "fleet_schedule.csv");
        artifacts.emplace_back("fleet_schedule.csv");
        clock.mark("extract");

        // Exact validation of the dispatched charger loads.
        auto loads = mode == RunMode::uncoordinated
                         ? charger_loads_from_flows(sc, *eamod, solution)
                         : loads_from_joint(sc, joint, solution);
        std::vector<std::vector<PowerFlowSolution>> run;
        for (std::size_t d = 0; d < sc.pdns.size(); ++d)
            run.push_back(validate_solution(sc.pdns[d], loads[d], sc.pf));
        clock.mark("validate");

        auto report = build_report(sc, mode, base, run, loads, schedule.rebalancing_km,
                                   charging_trace(schedule, sc.n_t));
        emit_report(report, sc.report, out_dir);
        for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
            const auto name = "voltages_" + sc.pdns[d].id + ".csv";
            write_voltages_csv(sc.pdns[d], run[d], out_dir / name);
            artifacts.push_back(name);
        }
        for (const char* name : {"report.json", "du_events.csv", "ds_events.csv", "du_hist.csv",
                                 "ds_hist.csv", "substation_load.csv", "charging_vehicles.csv"})
            artifacts.emplace_back(name);
        clock.mark("report");
        result.report = std::move(report);
        write_manifest(out_dir, sc, mode, clock, artifacts, linearization, result);
        return result;
    } catch (const PowerFlowError& e) {
        result.exit_code = kExitPowerFlow;
        result.failed_stage = "power-flow";
        result.error = std::string(e.what()) + " (t = " + std::to_string(e.t) + ")";
    } catch (const SolverError& e) {
        result.exit_code = kExitSolver;
        result.failed_stage = "solve";
        result.error = e.what();
    } catch (const ValidationError& e) {
        result.exit_code = kExitValidation;
        result.failed_stage = "validate";
        result.error = e.what();
    } catch (const std::exception& e) {
        result.exit_code = kExitSolver;
        result.failed_stage = "pipeline";
        result.error = e.what();
    }
    write_manifest(out_dir, sc, mode, clock, artifacts, linearization, result);
    return result;
}

}  // namespace fleetgrid
