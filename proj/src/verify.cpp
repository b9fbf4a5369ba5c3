#include "evfleet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evfleet {

std::size_t ViolationReport::count(const std::string& family) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [&](const Violation& v) { return v.name.compare(0, family.size(), family) == 0; }));
}

std::string ViolationReport::summary(std::size_t max_lines) const {
  if (violations.empty()) return "feasible";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (std::size_t n = 0; n < violations.size() && n < max_lines; ++n) {
    const auto& v = violations[n];
    const char* kind = v.kind == Violation::Kind::Row     ? "row"
                       : v.kind == Violation::Kind::Bound ? "bound"
                                                          : "integrality";
    os << "\n  " << kind << ' ' << v.name << " by " << v.amount;
  }
  if (violations.size() > max_lines) os << "\n  ...";
  return os.str();
}

ViolationReport check_solution(const MilpModel& model, const std::vector<double>& values,
                               double tol) {
  if (values.size() != model.num_vars()) {
    throw Error(ErrorCode::MissingValue, "milp_core.check_solution",
                "expected " + std::to_string(model.num_vars()) + " values, got " +
                    std::to_string(values.size()));
  }
  ViolationReport rep;
  const auto& vars = model.variables();
  for (std::size_t c = 0; c < vars.size(); ++c) {
    const double x = values[c];
    if (!std::isfinite(x)) {
      rep.violations.push_back({Violation::Kind::Bound, vars[c].name, kInf});
      continue;
    }
    const double below = vars[c].lower - x;
    const double above = x - vars[c].upper;
    if (below > tol) rep.violations.push_back({Violation::Kind::Bound, vars[c].name, below});
    if (above > tol) rep.violations.push_back({Violation::Kind::Bound, vars[c].name, above});
    if (vars[c].is_integral()) {
      const double frac = std::fabs(x - std::round(x));
      if (frac > tol) rep.violations.push_back({Violation::Kind::Integrality, vars[c].name, frac});
    }
  }
  for (const auto& row : model.constraints()) {
    double lhs = 0.0;
    for (const auto& term : row.terms) lhs += term.coef * values[term.col];
    double amount = 0.0;
    switch (row.sense) {
      case RowSense::LessEqual: amount = lhs - row.rhs; break;
      case RowSense::GreaterEqual: amount = row.rhs - lhs; break;
      case RowSense::Equal: amount = std::fabs(lhs - row.rhs); break;
    }
    if (amount > tol || std::isnan(amount)) {
      rep.violations.push_back({Violation::Kind::Row, row.name, amount});
    }
  }
  return rep;
}

ViolationReport check_solution(const MilpModel& model, const ValueMap& values, double tol) {
  std::vector<double> dense(model.num_vars());
  for (std::size_t c = 0; c < model.num_vars(); ++c) {
    const auto it = values.find(model.variables()[c].name);
    if (it == values.end()) {
      throw Error(ErrorCode::MissingValue, "milp_core.check_solution",
                  "no value for " + model.variables()[c].name);
    }
    dense[c] = it->second;
  }
  return check_solution(model, dense, tol);
}

double eval_objective(const Instance& inst, const ValueMap& values) {
  auto need = [&](const std::string& name) {
    const auto it = values.find(name);
    if (it == values.end()) {
      throw Error(ErrorCode::MissingValue, "milp_core.eval_objective", "no value for " + name);
    }
    return it->second;
  };
  auto one = [](std::size_t x) { return static_cast<int>(x) + 1; };
  double investment = 0.0;
  for (std::size_t i = 0; i < inst.I(); ++i)
    investment += need(make_name("N_v", {{'i', one(i)}})) * inst.vehicles[i].capital_cost;
  for (std::size_t j = 0; j < inst.J(); ++j) {
    double count = need(make_name("N_c", {{'j', one(j)}}));
    const auto slack = values.find(make_name("slack_Nc", {{'j', one(j)}}));
    if (slack != values.end()) count += slack->second;
    investment += count * inst.chargers[j].capital_cost;
  }
  double demand = 0.0;
  for (std::size_t l = 0; l < inst.L(); ++l)
    demand += need(make_name("p_pk", {{'l', one(l)}})) * inst.tariff.demand_groups[l].rate;
  const auto& g = inst.time_grid;
  double energy = 0.0;
  for (int s = 0; s < g.days; ++s) {
    double day = 0.0;
    for (int t = g.tau_lo(s); t <= g.tau_hi(s); ++t)
      day += need(make_name("p_g", {{'t', t}})) * g.delta_t * inst.tariff.energy_price[t - 1];
    energy += day * g.day_weight[s];
  }
  double maintenance = 0.0;
  for (std::size_t i = 0; i < inst.I(); ++i)
    for (std::size_t k = 0; k < inst.K(); ++k)
      maintenance += inst.blocks[k].distance_km * need(make_name("b", {{'k', one(k)}, {'i', one(i)}})) *
                     inst.vehicles[i].maintenance_cost_per_km;
  return investment + demand + energy + maintenance;
}

bool objectives_match(double a, double b, double rel, double abs_floor) {
  return std::fabs(a - b) <= std::max(rel * std::max(std::fabs(a), std::fabs(b)), abs_floor);
}

}  // namespace evfleet
