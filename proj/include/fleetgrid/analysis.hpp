#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fleetgrid/pdn.hpp"
#include "fleetgrid/power_flow.hpp"
#include "fleetgrid/scenario.hpp"

namespace fleetgrid {

// One voltage-bound exceedance: signed distance outside the band, negative
// below the lower bound, positive above the upper bound.
struct VoltageViolationEvent {
    std::size_t bus;
    Phase phase;
    int t;
    double du_pu;
};

struct VoltageViolationResult {
    std::vector<VoltageViolationEvent> events;  // nonzero deviations only
    double integral_pu_h = 0.0;                 // dt-weighted sum of |du|
    std::size_t serious_count = 0;              // |du| above the threshold
};

VoltageViolationResult voltage_violation_integral(const Pdn& pdn,
                                                  const std::vector<PowerFlowSolution>& series,
                                                  double dt_hours,
                                                  double serious_threshold = 0.005);

struct RatingViolationEvent {
    int t;
    double ds_mva;  // excess of |sum of per-phase injections| over the rating
};

struct RatingViolationResult {
    std::vector<RatingViolationEvent> events;
    double integral_mvah = 0.0;
};

RatingViolationResult substation_violation_integral(const Pdn& pdn,
                                                    const std::vector<PowerFlowSolution>& series,
                                                    double dt_hours);

struct ViolationSummary {
    double du_integral_pu_h = 0.0;
    double ds_integral_mvah = 0.0;
    std::size_t du_event_count = 0;
    std::size_t du_serious_count = 0;
    std::size_t ds_event_count = 0;
    // Events tagged with their network index, flattened for reporting.
    std::vector<std::pair<std::size_t, VoltageViolationEvent>> du_events;
    std::vector<std::pair<std::size_t, RatingViolationEvent>> ds_events;
};

ViolationSummary summarize_violations(const std::vector<Pdn>& pdns,
                                      const std::vector<std::vector<PowerFlowSolution>>& series,
                                      double dt_hours, double serious_threshold);

struct EnergyReport {
    double e_total_kwh = 0.0;
    double e_base_kwh = 0.0;
    double e_amod_kwh = 0.0;    // e_total - e_base
    double e_charge_kwh = 0.0;  // energy delivered to charging stations
    double e_losses_kwh = 0.0;  // e_amod - e_charge
    double c_amod_usd = 0.0;
    double c_charge_usd = 0.0;
    double c_losses_usd = 0.0;  // c_amod - c_charge
    double rebalancing_usd = 0.0;
    double total_fleet_usd = 0.0;  // rebalancing + c_amod
};

/// Substation-side energy drawn on top of the base case, the share arriving
/// at the charging stations, the loss remainder, and their costs at the
/// per-substation prices.
EnergyReport energy_and_cost_accounting(
    const std::vector<Pdn>& pdns, const std::vector<std::vector<PowerFlowSolution>>& base,
    const std::vector<std::vector<PowerFlowSolution>>& run,
    const std::vector<ControllableLoadSeries>& loads, double dt_hours, double rebalancing_km,
    double distance_price);

struct ScenarioReport {
    std::string mode;
    ViolationSummary violations;
    EnergyReport energy;
    std::vector<std::vector<double>> substation_base_mva;  // [pdn][t]
    std::vector<std::vector<double>> substation_run_mva;   // [pdn][t]
    std::vector<double> rating_mva;                        // [pdn]
    std::vector<double> charging_vehicles;                 // [t], fleet-wide
    std::vector<std::vector<double>> price_per_kwh;        // [pdn][t]
    double dt_hours = 0.0;
};

/// Apparent power |sum of per-phase injections| at the reference bus, MVA.
std::vector<double> substation_apparent_mva(const Pdn& pdn,
                                            const std::vector<PowerFlowSolution>& series);

/// Writes report.json plus the violation event/histogram CSVs and the
/// substation-load and charging-activity traces under `dir`.
void emit_report(const ScenarioReport& report, const ReportConfig& config,
                 const std::filesystem::path& dir);

}  // namespace fleetgrid
