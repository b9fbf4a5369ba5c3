#pragma once

// Independent re-evaluation of candidate solutions against a built model.

#include <string>
#include <vector>

#include "evfleet/domain.hpp"
#include "evfleet/model.hpp"

namespace evfleet {

inline constexpr double kFeasTol = 1e-6;

struct Violation {
  enum class Kind { Row, Bound, Integrality } kind = Kind::Row;
  std::string name;      // row or variable name
  double amount = 0.0;   // how far outside, always > tolerance
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool feasible() const noexcept { return violations.empty(); }
  /// Violations whose row or variable name starts with `family`.
  std::size_t count(const std::string& family) const;
  std::string summary(std::size_t max_lines = 10) const;
};

ViolationReport check_solution(const MilpModel& model, const std::vector<double>& values,
                               double tol = kFeasTol);
/// Values are looked up by canonical variable name; every column must be present.
ViolationReport check_solution(const MilpModel& model, const ValueMap& values,
                               double tol = kFeasTol);

/// Planning cost recomputed from N_v, N_c, p_pk, p_g, b (and slack_Nc when present).
double eval_objective(const Instance& inst, const ValueMap& values);

/// |a - b| <= max(rel * max(|a|, |b|), abs_floor).
bool objectives_match(double a, double b, double rel = 1e-6, double abs_floor = 1e-4);

}  // namespace evfleet
