#pragma once

// Model file emission (free MPS, CPLEX-style LP) and an independent MPS reader
// used to check that emitted files reproduce the constraint matrix exactly.

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evfleet/model.hpp"

namespace evfleet {

/// Exact decimal form with 17 significant digits.
std::string format_number(double value);

std::string to_mps(const MilpModel& model);
std::string to_lp(const MilpModel& model);

void write_mps(const std::filesystem::path& path, const MilpModel& model);
void write_lp(const std::filesystem::path& path, const MilpModel& model);

/// LP-format form of a canonical name ('[' -> '(', ']' -> ')', '=' -> '_').
std::string lp_name(const std::string& name);

/// What an MPS file says, parsed without reference to the in-memory model.
struct ParsedMps {
  std::string name;
  std::vector<std::string> col_names;
  std::vector<bool> col_integral;
  std::vector<double> col_lower, col_upper, objective;
  std::vector<std::string> row_names;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;
  std::map<std::pair<std::size_t, std::size_t>, double> entries;  // (row, col) -> coef
};

ParsedMps parse_mps(const std::string& text);
ParsedMps read_mps(const std::filesystem::path& path);

/// Empty string when `parsed` reproduces `model` exactly, else the first difference.
std::string compare_with_model(const ParsedMps& parsed, const MilpModel& model);

}  // namespace evfleet
