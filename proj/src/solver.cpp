#include "fleetgrid/solver.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "fleetgrid/mps.hpp"

#ifdef __linux__
#include <unistd.h>
#endif

namespace fleetgrid {

namespace {

std::filesystem::path unique_temp_dir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto dir = base / ("fleetgrid-" + std::to_string(rd()));
        std::error_code ec;
        if (std::filesystem::create_directory(dir, ec)) return dir;
    }
    throw SolverError("cannot create a temporary directory under " + base.string());
}

std::filesystem::path executable_dir() {
#ifdef __linux__
    char buf[4096];
    const ssize_t len = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (len > 0) {
        buf[len] = '\0';
        return std::filesystem::path(buf).parent_path();
    }
#endif
    return std::filesystem::current_path();
}

}  // namespace

std::string default_solver_command(const std::string& preferred) {
    if (!preferred.empty()) return preferred;
    if (const char* env = std::getenv("FLEETGRID_LP_SOLVER"); env && *env) return env;
    const auto exe_dir = executable_dir();
    for (const auto& candidate :
         {exe_dir / "lp_solve_mps.py", exe_dir / "tools" / "lp_solve_mps.py",
          exe_dir / ".." / "tools" / "lp_solve_mps.py"}) {
        std::error_code ec;
        if (std::filesystem::exists(candidate, ec))
            return "python3 " + std::filesystem::weakly_canonical(candidate).string();
    }
    throw SolverError(
        "no LP solver configured: pass --solver, set FLEETGRID_LP_SOLVER, or keep "
        "lp_solve_mps.py next to the executable");
}

ExternalMpsSolver::ExternalMpsSolver(std::string command, bool keep_files)
    : command_(std::move(command)), keep_files_(keep_files) {
    if (command_.empty()) throw SolverError("empty solver command");
}

LpSolution ExternalMpsSolver::solve_raw(const LpModel& model) {
    const auto dir = unique_temp_dir();
    const auto mps_path = dir / "model.mps";
    const auto sol_path = dir / "solution.txt";
    const auto log_path = dir / "solver.log";

    export_mps(model, mps_path);

    const std::string cmd = command_ + " \"" + mps_path.string() + "\" \"" +
                            sol_path.string() + "\" > \"" + log_path.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());

    auto cleanup = [&]() {
        if (!keep_files_) {
            std::error_code ec;
            std::filesystem::remove_all(dir, ec);
        }
    };
    if (rc != 0) {
        std::string log;
        std::ifstream lf(log_path);
        std::stringstream ss;
        ss << lf.rdbuf();
        log = ss.str();
        cleanup();
        throw SolverError("solver command failed (exit " + std::to_string(rc) + "): " + log);
    }

    std::ifstream in(sol_path);
    if (!in) {
        cleanup();
        throw SolverError("solver produced no solution file");
    }
    LpSolution solution;
    std::string line;
    if (!std::getline(in, line)) {
        cleanup();
        throw SolverError("empty solution file");
    }
    {
        std::istringstream iss(line);
        std::string tag, status;
        iss >> tag >> status;
        if (tag != "status") {
            cleanup();
            throw SolverError("malformed solution file: " + line);
        }
        if (status == "optimal")
            solution.status = LpStatus::optimal;
        else if (status == "infeasible")
            solution.status = LpStatus::infeasible;
        else if (status == "unbounded")
            solution.status = LpStatus::unbounded;
        else if (status == "limit")
            solution.status = LpStatus::limit;
        else
            solution.status = LpStatus::error;
    }
    if (std::getline(in, line)) {
        std::istringstream iss(line);
        std::string tag;
        iss >> tag >> solution.objective;
    }
    if (solution.status == LpStatus::optimal) {
        solution.values.assign(model.num_variables(), 0.0);
        std::string name;
        double value;
        std::size_t count = 0;
        while (in >> name >> value) {
            // Columns come back under their deterministic mangled names.
            if (name.size() < 2 || name[0] != 'X') {
                cleanup();
                throw SolverError("unexpected column name in solution: " + name);
            }
            const std::size_t index = std::stoull(name.substr(1));
            if (index >= solution.values.size()) {
                cleanup();
                throw SolverError("column index out of range in solution: " + name);
            }
            solution.values[index] = value;
            ++count;
        }
        if (count != model.num_variables()) {
            cleanup();
            throw SolverError("solution file covers " + std::to_string(count) + " of " +
                              std::to_string(model.num_variables()) + " columns");
        }
    }
    solution.solver_info = name() + ": " + command_;
    cleanup();
    return solution;
}

LpSolution solve(const LpModel& model, LpSolverAdapter& adapter, double feasibility_tol) {
    LpModel canonical = model;
    canonical.canonicalize();
    LpSolution solution = adapter.solve_raw(canonical);
    if (solution.status == LpStatus::optimal) {
        const auto audit = check_feasibility(canonical, solution, feasibility_tol);
        if (!audit.pass) {
            std::string detail;
            if (!audit.row_violations.empty())
                detail += " row " + audit.row_violations.front().name + " by " +
                          std::to_string(audit.row_violations.front().residual);
            if (!audit.bound_violations.empty())
                detail += " bound " + audit.bound_violations.front().name + " by " +
                          std::to_string(audit.bound_violations.front().residual);
            throw SolverError("solution failed the feasibility audit:" + detail);
        }
    }
    return solution;
}

}  // namespace fleetgrid
