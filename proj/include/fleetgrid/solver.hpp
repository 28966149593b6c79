#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "fleetgrid/lp_model.hpp"

namespace fleetgrid {

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Contract for LP engines: accept a model, return a faithful status and,
/// when optimal, a full value vector. Adapters must be deterministic for
/// fixed settings.
class LpSolverAdapter {
  public:
    virtual ~LpSolverAdapter() = default;
    virtual LpSolution solve_raw(const LpModel& model) = 0;
    virtual std::string name() const = 0;
};

/// Reference adapter: exports the model as fixed-format MPS, invokes an
/// external solver command ("<command> <model.mps> <solution.txt>"), and
/// parses the plain-text solution file (status line, objective line, then
/// one "column value" pair per line).
class ExternalMpsSolver final : public LpSolverAdapter {
  public:
    explicit ExternalMpsSolver(std::string command, bool keep_files = false);

    LpSolution solve_raw(const LpModel& model) override;
    std::string name() const override { return "external-mps"; }

  private:
    std::string command_;
    bool keep_files_;
};

/// Resolves the solver command: an explicit non-empty `preferred` wins,
/// then the FLEETGRID_LP_SOLVER environment variable, then a bundled
/// python backend looked up next to the running executable.
std::string default_solver_command(const std::string& preferred = "");

/// Runs the adapter and, on an optimal outcome, audits the solution with
/// check_feasibility before releasing it; audit failures throw SolverError.
LpSolution solve(const LpModel& model, LpSolverAdapter& adapter, double feasibility_tol = 1e-6);

}  // namespace fleetgrid
