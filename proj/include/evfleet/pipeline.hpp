#pragma once

// Cluster -> disaggregate workflow, bound-chain verification and the
// brute-force ground truth for tiny instances.
//
// Variant naming: "lower" is SurplusAllowed, "upper" is ExactEnergy.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evfleet/formulation.hpp"
#include "evfleet/solver.hpp"

namespace evfleet {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Equality tolerance for bound comparisons: max(1e-6 |J|, 1e-3).
double bound_tolerance(double a, double b);
/// a / b - 1, with 0 / 0 read as no gap.
double relative_gap(double a, double b);

struct StageResult {
  bool ran = false;
  SolveStatus status = SolveStatus::Error;
  double objective = kNaN;  // incumbent value, NaN without one
  double bound = kNaN;      // best proven lower bound
  double build_s = 0.0;
  double solve_s = 0.0;

  bool proven() const noexcept { return ran && status == SolveStatus::Optimal; }
  bool infeasible() const noexcept { return ran && status == SolveStatus::Infeasible; }
  /// Certified interval containing the optimum (infeasible: [+inf, +inf]).
  double lower() const noexcept;
  double upper() const noexcept;
};

struct VariantReport {
  Variant variant = Variant::SurplusAllowed;
  StageResult p1;
  Feasibility p3 = Feasibility::Unknown;
  std::vector<Feasibility> p3_by_type;
  double p3_build_s = 0.0, p3_solve_s = 0.0;
  StageResult p4;             // final P4 (after slack escalation)
  StageResult p4_no_slack;    // P4 at slack 0
  int slack_limit_used = 0;   // 0 unless P4 at slack 0 was infeasible
  double extra_chargers = 0.0;
  StageResult p2;             // ran == false unless requested
  double gap41 = kNaN;
  double gap21 = kNaN;
  bool gap21_from_p4 = false;  // P2 not proven: gap41 reported as its upper bound
  std::optional<AggSolution> agg;
  std::vector<std::string> notes;
};

struct PipelineOptions {
  int slack_limit = 1;
  bool with_p2 = false;
  BuildOptions build;
};

struct PipelineReport {
  std::string instance_hash;
  std::size_t K = 0, I = 0, J = 0;
  int T = 0;
  int omega = 0;  // 0 when not a subsample
  std::vector<VariantReport> variants;

  /// Flat CSV row per variant; header from pipeline_csv_header().
  std::vector<std::string> csv_rows() const;
  std::string to_json() const;
};

std::string pipeline_csv_header();

/// P1 -> P3 -> P4 for inst.variant; P4 retries with the slack limit only when
/// infeasible at slack 0.
PipelineReport run_cluster_disaggregate(const Instance& inst, const SolverConfig& cfg,
                                        const PipelineOptions& opt = {});
VariantReport run_variant(const Instance& inst, const SolverConfig& cfg,
                          const PipelineOptions& opt);

enum class VerdictStatus { Pass, Fail, Inconclusive };
std::string_view to_string(VerdictStatus v) noexcept;

struct Verdict {
  std::string claim;         // e.g. "J1 <= J2 (surplus)"
  VerdictStatus status = VerdictStatus::Inconclusive;
  double lhs = kNaN, rhs = kNaN;  // upper bound of the left side, lower bound of the right
  double residual = kNaN;         // lhs - rhs
  double tolerance = 0.0;
  bool informational = false;     // reported but not part of the overall verdict
};

/// Verdict for "a <= b" from certified intervals.
Verdict check_le(std::string claim, const StageResult& a, const StageResult& b);

struct BoundsCheck {
  VariantReport lower, upper;
  /// Surplus P4 on the exact variant's fixed investments and assignments.
  StageResult p4_lower_common;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  bool any_fail() const;
  std::string to_json() const;
};

/// Solves P1/P4 (and P2 when asked) for both variants and checks every
/// inequality of the bound chain. Throws InconclusiveDueToTimeLimit when
/// `strict` and a verdict cannot be certified.
BoundsCheck verify_bounds(const Instance& inst, const SolverConfig& cfg, bool with_p2,
                          bool strict = false, const BuildOptions& build = {});

/// Exact optimum of the individual-vehicle problem on a tiny instance by
/// enumerating block-to-vehicle groupings (K <= 6, I <= 2, J <= 2).
struct OracleResult {
  double objective = kInf;        // +inf when no grouping is feasible
  std::size_t groupings = 0;      // labeled groupings solved
  std::vector<int> best_group;    // group per block
  std::vector<std::size_t> best_type;  // vehicle type per group
};

OracleResult brute_force_oracle(const Instance& inst, const SolverConfig& cfg);

}  // namespace evfleet
