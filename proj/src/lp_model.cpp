#include "fleetgrid/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fleetgrid {

namespace {

void require_finite_or_inf(double x, const std::string& what) {
    if (std::isnan(x)) throw std::invalid_argument(what + " is NaN");
}

void require_finite(double x, const std::string& what) {
    if (!std::isfinite(x)) throw std::invalid_argument(what + " is not finite");
}

}  // namespace

VarId LpModel::add_variable(std::string name, double lb, double ub, double obj) {
    require_finite_or_inf(lb, "lower bound of " + name);
    require_finite_or_inf(ub, "upper bound of " + name);
    require_finite(obj, "objective coefficient of " + name);
    if (lb > ub) throw std::invalid_argument("inconsistent bounds for " + name);
    auto id = static_cast<VarId>(vars_.size());
    auto [it, inserted] = var_names_.emplace(name, id);
    if (!inserted) throw std::invalid_argument("duplicate variable name: " + name);
    vars_.push_back({std::move(name), lb, ub, obj});
    return id;
}

RowId LpModel::add_row(std::string name, RowSense sense, double rhs) {
    require_finite(rhs, "rhs of " + name);
    auto id = static_cast<RowId>(rows_.size());
    auto [it, inserted] = row_names_.emplace(name, id);
    if (!inserted) throw std::invalid_argument("duplicate row name: " + name);
    rows_.push_back({std::move(name), sense, rhs, {}});
    return id;
}

void LpModel::add_coef(RowId row, VarId var, double coef) {
    require_finite(coef, "coefficient in row " + rows_.at(static_cast<std::size_t>(row)).name);
    if (var < 0 || static_cast<std::size_t>(var) >= vars_.size())
        throw std::out_of_range("unknown variable id");
    if (coef == 0.0) return;
    rows_[static_cast<std::size_t>(row)].coefs.emplace_back(var, coef);
    canonical_ = false;
}

void LpModel::set_bounds(VarId var, double lb, double ub) {
    require_finite_or_inf(lb, "lower bound");
    require_finite_or_inf(ub, "upper bound");
    if (lb > ub) throw std::invalid_argument("inconsistent bounds for " + variable(var).name);
    vars_[static_cast<std::size_t>(var)].lb = lb;
    vars_[static_cast<std::size_t>(var)].ub = ub;
}

void LpModel::set_objective_coef(VarId var, double obj) {
    require_finite(obj, "objective coefficient");
    vars_[static_cast<std::size_t>(var)].obj = obj;
}

std::optional<VarId> LpModel::find_variable(const std::string& name) const {
    auto it = var_names_.find(name);
    if (it == var_names_.end()) return std::nullopt;
    return it->second;
}

void LpModel::canonicalize() {
    if (canonical_) return;
    for (auto& row : rows_) {
        std::sort(row.coefs.begin(), row.coefs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<VarId, double>> merged;
        merged.reserve(row.coefs.size());
        for (const auto& [v, c] : row.coefs) {
            if (!merged.empty() && merged.back().first == v)
                merged.back().second += c;
            else
                merged.emplace_back(v, c);
        }
        std::erase_if(merged, [](const auto& p) { return p.second == 0.0; });
        row.coefs = std::move(merged);
    }
    canonical_ = true;
}

bool LpModel::structurally_equal(const LpModel& other, double tol) const {
    auto close = [tol](double a, double b) {
        if (std::isinf(a) || std::isinf(b)) return a == b;
        return std::abs(a - b) <= tol;
    };
    if (vars_.size() != other.vars_.size() || rows_.size() != other.rows_.size()) return false;
    LpModel a = *this;
    LpModel b = other;
    a.canonicalize();
    b.canonicalize();
    for (std::size_t i = 0; i < a.vars_.size(); ++i) {
        const auto& va = a.vars_[i];
        const auto& vb = b.vars_[i];
        if (va.name != vb.name || !close(va.lb, vb.lb) || !close(va.ub, vb.ub) ||
            !close(va.obj, vb.obj))
            return false;
    }
    for (std::size_t i = 0; i < a.rows_.size(); ++i) {
        const auto& ra = a.rows_[i];
        const auto& rb = b.rows_[i];
        if (ra.name != rb.name || ra.sense != rb.sense || !close(ra.rhs, rb.rhs) ||
            ra.coefs.size() != rb.coefs.size())
            return false;
        for (std::size_t k = 0; k < ra.coefs.size(); ++k) {
            if (ra.coefs[k].first != rb.coefs[k].first) return false;
            if (!close(ra.coefs[k].second, rb.coefs[k].second)) return false;
        }
    }
    return true;
}

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::limit: return "limit";
        case LpStatus::error: return "error";
    }
    return "error";
}

ResidualReport check_feasibility(const LpModel& model, const LpSolution& solution, double tol) {
    ResidualReport report;
    report.tolerance = tol;
    if (solution.status != LpStatus::optimal ||
        solution.values.size() != model.num_variables()) {
        report.pass = false;
        return report;
    }
    const auto& x = solution.values;
    for (std::size_t i = 0; i < model.num_variables(); ++i) {
        const auto& v = model.variable(static_cast<VarId>(i));
        double viol = 0.0;
        if (x[i] < v.lb) viol = v.lb - x[i];
        if (x[i] > v.ub) viol = std::max(viol, x[i] - v.ub);
        report.max_residual = std::max(report.max_residual, viol);
        if (viol > tol) report.bound_violations.push_back({v.name, viol});
    }
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
        const auto& row = model.row(static_cast<RowId>(r));
        double lhs = 0.0;
        for (const auto& [v, c] : row.coefs) lhs += c * x[static_cast<std::size_t>(v)];
        double viol = 0.0;
        switch (row.sense) {
            case RowSense::le: viol = std::max(0.0, lhs - row.rhs); break;
            case RowSense::ge: viol = std::max(0.0, row.rhs - lhs); break;
            case RowSense::eq: viol = std::abs(lhs - row.rhs); break;
        }
        report.max_residual = std::max(report.max_residual, viol);
        if (viol > tol) report.row_violations.push_back({row.name, viol});
    }
    report.pass = report.row_violations.empty() && report.bound_violations.empty();
    return report;
}

}  // namespace fleetgrid
