#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "fleetgrid/pipeline.hpp"

namespace {

int run_validate(const std::string& path) {
    auto result = fleetgrid::load_scenario(path);
    std::cout << result.diagnostics.to_string();
    if (!result.scenario) {
        std::cout << "invalid: " << result.diagnostics.error_count() << " error(s)\n";
        return fleetgrid::kExitValidation;
    }
    const auto& sc = *result.scenario;
    const auto expanded = fleetgrid::build_expanded_graph(sc.road, sc.chargers, sc.n_t, sc.n_c,
                                                          sc.dt_hours, sc.unit_kwh);
    std::vector<fleetgrid::PdnShape> shapes;
    for (const auto& pdn : sc.pdns) shapes.push_back(fleetgrid::shape_of(pdn));
    const auto counts = fleetgrid::model_statistics(expanded, sc.trips.size(), shapes);
    std::cout << "valid scenario: " << sc.road.vertices.size() << " road vertices, "
              << sc.road.arcs.size() << " arcs, " << sc.chargers.size() << " chargers, "
              << sc.trips.size() << " trips, " << sc.pdns.size() << " networks\n";
    std::cout << "decision variables: fleet " << counts.eamod << " + grid " << counts.mopf
              << " = " << counts.total << '\n';
    return fleetgrid::kExitOk;
}

int run_run(const std::string& scenario_path, const std::string& mode_name,
            const std::string& out_dir, const std::string& solver, std::uint64_t seed,
            bool seed_set) {
    const auto mode = fleetgrid::parse_run_mode(mode_name);
    if (!mode) {
        std::cerr << "unknown mode '" << mode_name << "'\n";
        return fleetgrid::kExitValidation;
    }
    auto loaded = fleetgrid::load_scenario(
        scenario_path, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    std::cerr << loaded.diagnostics.to_string();
    if (!loaded.scenario) return fleetgrid::kExitValidation;
    const auto result =
        fleetgrid::run_pipeline(*loaded.scenario, *mode, out_dir, solver);
    if (result.exit_code != fleetgrid::kExitOk) {
        std::cerr << "failed (" << result.failed_stage << "): " << result.error << '\n';
        return result.exit_code;
    }
    if (result.report) {
        const auto& r = *result.report;
        std::printf("voltage violations: %.6g p.u.h over %zu events (%zu serious)\n",
                    r.violations.du_integral_pu_h, r.violations.du_event_count,
                    r.violations.du_serious_count);
        std::printf("rating violations:  %.6g MVAh over %zu events\n",
                    r.violations.ds_integral_mvah, r.violations.ds_event_count);
        std::printf("fleet energy: %.6g kWh (charging %.6g, losses %.6g)\n",
                    r.energy.e_amod_kwh, r.energy.e_charge_kwh, r.energy.e_losses_kwh);
        std::printf("fleet cost:   %.6g USD (rebalancing %.6g, electricity %.6g)\n",
                    r.energy.total_fleet_usd, r.energy.rebalancing_usd, r.energy.c_amod_usd);
    }
    std::cout << "artifacts written to " << out_dir << '\n';
    return fleetgrid::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint electric-fleet and distribution-network scheduling"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, solver, mode = "base";
    std::uint64_t seed = 0;

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    auto* run = app.add_subcommand("run", "Run an experiment");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--mode", mode, "base | uncoordinated | coordinated")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--solver", solver, "External LP solver command");
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (validate->parsed()) return run_validate(scenario_path);
        return run_run(scenario_path, mode, out_dir, solver, seed, seed_opt->count() > 0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fleetgrid::kExitSolver;
    }
}
