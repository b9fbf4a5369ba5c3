#include "evfleet/model.hpp"

#include <algorithm>

namespace evfleet {

std::string_view to_string(ProblemId p) noexcept {
  switch (p) {
    case ProblemId::P1: return "P1";
    case ProblemId::P2: return "P2";
    case ProblemId::P3: return "P3";
    case ProblemId::P4: return "P4";
    case ProblemId::Custom: return "custom";
  }
  return "custom";
}

std::string make_name(std::string_view family, const IndexTuple& index) {
  std::string out(family);
  if (index.empty()) return out;
  out += '[';
  for (std::size_t n = 0; n < index.size(); ++n) {
    if (n) out += ',';
    out += index[n].first;
    out += '=';
    out += std::to_string(index[n].second);
  }
  out += ']';
  return out;
}

std::size_t MilpModel::add_var(std::string family, IndexTuple index, VarKind kind, double lower,
                               double upper, double objective) {
  if (kind == VarKind::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  VarRef ref{std::move(family), std::move(index), kind, lower, upper, {}};
  ref.name = make_name(ref.family, ref.index);
  const std::size_t col = vars_.size();
  if (!by_name_.emplace(ref.name, col).second) {
    throw Error(ErrorCode::InvalidArgument, "milp_core.MilpModel.add_var",
                "duplicate variable " + ref.name);
  }
  vars_.push_back(std::move(ref));
  objective_.push_back(objective);
  return col;
}

std::size_t MilpModel::add_row(std::string family, const IndexTuple& index, const LinExpr& expr,
                               RowSense sense, double rhs) {
  Constraint row;
  row.name = make_name(family, index);
  row.sense = sense;
  row.rhs = rhs;
  row.terms.reserve(expr.coefs().size());
  for (const auto& [col, coef] : expr.coefs()) {
    if (col >= vars_.size()) {
      throw Error(ErrorCode::InvalidArgument, "milp_core.MilpModel.add_row",
                  "row " + row.name + " references an undeclared column");
    }
    if (coef != 0.0) row.terms.push_back({col, coef});
  }
  rows_.push_back(std::move(row));
  row_families_.push_back(std::move(family));
  return rows_.size() - 1;
}

void MilpModel::set_bounds(std::size_t col, double lower, double upper) {
  auto& v = vars_.at(col);
  v.lower = lower;
  v.upper = upper;
}

bool MilpModel::has_integers() const noexcept {
  return std::any_of(vars_.begin(), vars_.end(), [](const VarRef& v) { return v.is_integral(); });
}

std::size_t MilpModel::find(const std::string& name) const {
  const auto it = by_name_.find(name);
  return it == by_name_.end() ? npos : it->second;
}

std::size_t MilpModel::col(const std::string& family, const IndexTuple& index) const {
  const auto c = find(make_name(family, index));
  if (c == npos) {
    throw Error(ErrorCode::InvalidArgument, "milp_core.MilpModel.col",
                "no variable " + make_name(family, index));
  }
  return c;
}

std::size_t MilpModel::count_vars(std::string_view family) const {
  return static_cast<std::size_t>(std::count_if(
      vars_.begin(), vars_.end(), [&](const VarRef& v) { return v.family == family; }));
}

std::size_t MilpModel::count_rows(std::string_view family) const {
  return static_cast<std::size_t>(
      std::count(row_families_.begin(), row_families_.end(), std::string(family)));
}

double MilpModel::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (std::size_t c = 0; c < objective_.size() && c < values.size(); ++c) {
    total += objective_[c] * values[c];
  }
  return total;
}

ValueMap to_value_map(const MilpModel& model, const std::vector<double>& values) {
  ValueMap out;
  out.reserve(values.size());
  for (std::size_t c = 0; c < model.num_vars() && c < values.size(); ++c) {
    out.emplace(model.variables()[c].name, values[c]);
  }
  return out;
}

}  // namespace evfleet
