#pragma once

// Solver-agnostic MILP container. Variables and rows keep insertion order, so
// building the same model twice yields identical serializations.

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evfleet/domain.hpp"

namespace evfleet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Integer, Binary };
enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class ProblemId { P1, P2, P3, P4, Custom };

std::string_view to_string(ProblemId p) noexcept;

/// One named index slot of a variable or row, e.g. {'t', 17}.
using IndexTuple = std::vector<std::pair<char, int>>;

/// Canonical name: family[a=1,b=2]. Index values are printed as given.
std::string make_name(std::string_view family, const IndexTuple& index);

struct VarRef {
  std::string family;
  IndexTuple index;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
  std::string name;

  bool is_integral() const noexcept { return kind != VarKind::Continuous; }
};

struct Term {
  std::size_t col;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by column, no duplicates, no zeros
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

/// Sparse linear expression under construction.
class LinExpr {
 public:
  LinExpr& add(std::size_t col, double coef) {
    if (coef != 0.0) coefs_[col] += coef;
    return *this;
  }
  const std::map<std::size_t, double>& coefs() const noexcept { return coefs_; }

 private:
  std::map<std::size_t, double> coefs_;
};

struct ModelMetadata {
  ProblemId problem = ProblemId::Custom;
  Variant variant = Variant::SurplusAllowed;
  std::string instance_hash;
  std::string label;  // e.g. the vehicle type of a P3 submodel
};

class MilpModel {
 public:
  MilpModel() = default;
  explicit MilpModel(ModelMetadata meta) : meta_(std::move(meta)) {}

  std::size_t add_var(std::string family, IndexTuple index, VarKind kind, double lower,
                      double upper, double objective = 0.0);
  std::size_t add_row(std::string family, const IndexTuple& index, const LinExpr& expr,
                      RowSense sense, double rhs);

  void set_objective(std::size_t col, double coef) { objective_.at(col) = coef; }
  void add_objective(std::size_t col, double coef) { objective_.at(col) += coef; }
  void set_bounds(std::size_t col, double lower, double upper);

  const std::vector<VarRef>& variables() const noexcept { return vars_; }
  const std::vector<Constraint>& constraints() const noexcept { return rows_; }
  const std::vector<double>& objective() const noexcept { return objective_; }
  const ModelMetadata& metadata() const noexcept { return meta_; }
  ModelMetadata& metadata() noexcept { return meta_; }

  std::size_t num_vars() const noexcept { return vars_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  bool has_integers() const noexcept;

  /// Column of a variable by canonical name, or npos.
  std::size_t find(const std::string& name) const;
  std::size_t col(const std::string& family, const IndexTuple& index) const;

  /// Number of variables / rows whose family matches.
  std::size_t count_vars(std::string_view family) const;
  std::size_t count_rows(std::string_view family) const;

  double objective_value(const std::vector<double>& values) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  ModelMetadata meta_;
  std::vector<VarRef> vars_;
  std::vector<double> objective_;
  std::vector<Constraint> rows_;
  std::vector<std::string> row_families_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Variable values keyed by canonical name.
using ValueMap = std::unordered_map<std::string, double>;

ValueMap to_value_map(const MilpModel& model, const std::vector<double>& values);

}  // namespace evfleet
