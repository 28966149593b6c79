#include "fleetgrid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

namespace fleetgrid {

VoltageViolationResult voltage_violation_integral(const Pdn& pdn,
                                                  const std::vector<PowerFlowSolution>& series,
                                                  double dt_hours, double serious_threshold) {
    VoltageViolationResult result;
    for (const auto& sol : series) {
        for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
            const auto& bus = pdn.buses[b];
            for (std::size_t p = 0; p < bus.phases.size(); ++p) {
                const auto pi = static_cast<Eigen::Index>(p);
                const double u = std::abs(sol.v[b][pi]);
                const double du = std::min(u - bus.u_min[pi], 0.0) +
                                  std::max(u - bus.u_max[pi], 0.0);
                if (du == 0.0) continue;
                result.events.push_back({b, bus.phases[p], sol.t, du});
                result.integral_pu_h += dt_hours * std::abs(du);
                if (std::abs(du) > serious_threshold) ++result.serious_count;
            }
        }
    }
    return result;
}

RatingViolationResult substation_violation_integral(const Pdn& pdn,
                                                    const std::vector<PowerFlowSolution>& series,
                                                    double dt_hours) {
    RatingViolationResult result;
    const double to_mva = pdn.s_base_va / 1e6;
    for (const auto& sol : series) {
        const double apparent = std::abs(sol.s_ref.sum());
        const double ds = std::max(apparent - pdn.rating, 0.0);
        if (ds == 0.0) continue;
        result.events.push_back({sol.t, ds * to_mva});
        result.integral_mvah += dt_hours * ds * to_mva;
    }
    return result;
}

ViolationSummary summarize_violations(const std::vector<Pdn>& pdns,
                                      const std::vector<std::vector<PowerFlowSolution>>& series,
                                      double dt_hours, double serious_threshold) {
    ViolationSummary summary;
    for (std::size_t d = 0; d < pdns.size(); ++d) {
        auto du = voltage_violation_integral(pdns[d], series[d], dt_hours, serious_threshold);
        summary.du_integral_pu_h += du.integral_pu_h;
        summary.du_event_count += du.events.size();
        summary.du_serious_count += du.serious_count;
        for (auto& event : du.events) summary.du_events.emplace_back(d, event);
        auto ds = substation_violation_integral(pdns[d], series[d], dt_hours);
        summary.ds_integral_mvah += ds.integral_mvah;
        summary.ds_event_count += ds.events.size();
        for (auto& event : ds.events) summary.ds_events.emplace_back(d, event);
    }
    return summary;
}

EnergyReport energy_and_cost_accounting(
    const std::vector<Pdn>& pdns, const std::vector<std::vector<PowerFlowSolution>>& base,
    const std::vector<std::vector<PowerFlowSolution>>& run,
    const std::vector<ControllableLoadSeries>& loads, double dt_hours, double rebalancing_km,
    double distance_price) {
    EnergyReport report;
    for (std::size_t d = 0; d < pdns.size(); ++d) {
        const auto& pdn = pdns[d];
        if (base[d].size() != run[d].size())
            throw ValidationError("base and run series are misaligned for network " + pdn.id);
        const double to_kw = pdn.s_base_va / 1e3;
        for (std::size_t ti = 0; ti < run[d].size(); ++ti) {
            const double price = pdn.price_per_kwh[ti];
            const double p_run = run[d][ti].s_ref.real().sum() * to_kw;
            const double p_base = base[d][ti].s_ref.real().sum() * to_kw;
            report.e_total_kwh += dt_hours * p_run;
            report.e_base_kwh += dt_hours * p_base;
            report.c_amod_usd += dt_hours * price * (p_run - p_base);
            if (!loads.empty() && !loads[d].s.empty()) {
                double p_charge = 0.0;
                for (const auto& slot : loads[d].s[ti]) p_charge += slot.real().sum() * to_kw;
                report.e_charge_kwh += dt_hours * p_charge;
                report.c_charge_usd += dt_hours * price * p_charge;
            }
        }
    }
    report.e_amod_kwh = report.e_total_kwh - report.e_base_kwh;
    report.e_losses_kwh = report.e_amod_kwh - report.e_charge_kwh;
    report.c_losses_usd = report.c_amod_usd - report.c_charge_usd;
    report.rebalancing_usd = distance_price * rebalancing_km;
    report.total_fleet_usd = report.rebalancing_usd + report.c_amod_usd;
    return report;
}

std::vector<double> substation_apparent_mva(const Pdn& pdn,
                                            const std::vector<PowerFlowSolution>& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& sol : series)
        out.push_back(std::abs(sol.s_ref.sum()) * pdn.s_base_va / 1e6);
    return out;
}

namespace {

void write_histogram(const std::filesystem::path& path, const std::vector<double>& values,
                     double bin_width) {
    std::ofstream out(path);
    out << "bin_lo,bin_hi,count\n";
    if (bin_width <= 0.0) return;
    std::map<long long, std::size_t> bins;
    for (double v : values) bins[static_cast<long long>(std::floor(v / bin_width))]++;
    char buf[160];
    for (const auto& [bin, count] : bins) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%zu\n",
                      static_cast<double>(bin) * bin_width,
                      static_cast<double>(bin + 1) * bin_width, count);
        out << buf;
    }
}

}  // namespace

void emit_report(const ScenarioReport& report, const ReportConfig& config,
                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mode"] = report.mode;
    j["dt_hours"] = report.dt_hours;
    j["violations"] = {
        {"voltage_integral_pu_h", report.violations.du_integral_pu_h},
        {"voltage_events", report.violations.du_event_count},
        {"voltage_serious_events", report.violations.du_serious_count},
        {"serious_threshold_pu", config.serious_du_threshold},
        {"rating_integral_mvah", report.violations.ds_integral_mvah},
        {"rating_events", report.violations.ds_event_count},
    };
    j["energy_kwh"] = {
        {"total", report.energy.e_total_kwh},     {"base", report.energy.e_base_kwh},
        {"fleet", report.energy.e_amod_kwh},      {"charging", report.energy.e_charge_kwh},
        {"losses", report.energy.e_losses_kwh},
    };
    j["cost_usd"] = {
        {"fleet_electricity", report.energy.c_amod_usd},
        {"charging_electricity", report.energy.c_charge_usd},
        {"loss_electricity", report.energy.c_losses_usd},
        {"rebalancing", report.energy.rebalancing_usd},
        {"fleet_total", report.energy.total_fleet_usd},
    };
    {
        std::ofstream out(dir / "report.json");
        if (!out) throw std::runtime_error("cannot write report.json");
        out << j.dump(1) << '\n';
    }

    char buf[200];
    {
        std::ofstream out(dir / "du_events.csv");
        out << "pdn,bus,phase,t,du_pu\n";
        for (const auto& [d, e] : report.violations.du_events) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%c,%d,%.10g\n", d, e.bus,
                          phase_letter(e.phase), e.t, e.du_pu);
            out << buf;
        }
    }
    {
        std::ofstream out(dir / "ds_events.csv");
        out << "pdn,t,ds_mva\n";
        for (const auto& [d, e] : report.violations.ds_events) {
            std::snprintf(buf, sizeof(buf), "%zu,%d,%.10g\n", d, e.t, e.ds_mva);
            out << buf;
        }
    }
    {
        std::vector<double> du;
        for (const auto& [d, e] : report.violations.du_events) du.push_back(e.du_pu);
        write_histogram(dir / "du_hist.csv", du, config.du_bin_width);
        std::vector<double> ds;
        for (const auto& [d, e] : report.violations.ds_events) ds.push_back(e.ds_mva);
        write_histogram(dir / "ds_hist.csv", ds, config.ds_bin_width_mva);
    }
    {
        std::ofstream out(dir / "substation_load.csv");
        out << "pdn,t,base_mva,run_mva,rating_mva\n";
        for (std::size_t d = 0; d < report.substation_run_mva.size(); ++d)
            for (std::size_t ti = 0; ti < report.substation_run_mva[d].size(); ++ti) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%.10g,%.10g,%.10g\n", d, ti + 1,
                              report.substation_base_mva[d][ti],
                              report.substation_run_mva[d][ti], report.rating_mva[d]);
                out << buf;
            }
    }
    {
        std::ofstream out(dir / "charging_vehicles.csv");
        out << "t,vehicles\n";
        for (std::size_t ti = 0; ti < report.charging_vehicles.size(); ++ti) {
            std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", ti + 1,
                          report.charging_vehicles[ti]);
            out << buf;
        }
    }
}

}  // namespace fleetgrid
