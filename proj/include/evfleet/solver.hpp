#pragma once

// File-based coupling to external MILP solvers. Each call writes free MPS
// files into a working directory, runs one child process and reads back a
// solution file per model.
//
// Backends (SolverConfig::solver, or EVFLEET_SOLVER when "auto"):
//   highspy  tools/milp_shim.py driving the HiGHS Python bindings
//   scipy    the same shim using scipy.optimize.milp
//   highs    a HiGHS command line binary (EVFLEET_HIGHS or PATH)
//   auto     highspy, else scipy, else highs
// EVFLEET_PYTHON and EVFLEET_SHIM override the interpreter and shim paths.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evfleet/model.hpp"

namespace evfleet {

struct SolverConfig {
  std::string solver = "auto";
  double time_limit_s = 3600.0;
  double mip_rel_gap = 1e-6;
  int threads = 1;
  std::uint64_t seed = 0;
  std::filesystem::path work_dir;  // empty: private temp dir, removed afterwards
  bool check_incumbents = true;

  void validate() const;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit, Error };

std::string_view to_string(SolveStatus s) noexcept;

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  std::vector<double> values;  // column order; empty without an incumbent
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double wall_time_s = 0.0;  // solver time as reported by the backend
  std::string engine;
  std::string message;
  std::filesystem::path log_path;  // empty when the working directory was temporary

  bool has_incumbent() const noexcept { return !values.empty(); }
  bool proven_optimal() const noexcept { return status == SolveStatus::Optimal; }
};

SolveResult solve(const MilpModel& model, const SolverConfig& cfg);
/// Solves all models in one child process. Results keep input order.
std::vector<SolveResult> solve_batch(const std::vector<const MilpModel*>& models,
                                     const SolverConfig& cfg);

enum class Feasibility { Feasible, Infeasible, Unknown };

std::string_view to_string(Feasibility f) noexcept;

struct FeasibilityResult {
  Feasibility status = Feasibility::Unknown;
  std::vector<double> values;
  double wall_time_s = 0.0;
};

/// The objective is ignored; time limits without a witness give Unknown.
FeasibilityResult solve_feasibility(const MilpModel& model, const SolverConfig& cfg);
std::vector<FeasibilityResult> solve_feasibility_batch(const std::vector<const MilpModel*>& models,
                                                        const SolverConfig& cfg);

/// Backend actually used for `cfg.solver` after environment overrides and discovery.
std::string resolve_backend(const SolverConfig& cfg);

/// Parses a HiGHS raw solution file (write_solution_style 0) against `model`.
SolveResult parse_highs_solution(const std::string& text, const MilpModel& model);
/// Parses a milp_shim solution file against `model`.
SolveResult parse_shim_solution(const std::string& text, const MilpModel& model);

}  // namespace evfleet
