#pragma once

// Omega sweeps over a block dataset: one pipeline run per (omega, variant),
// appended to a resumable CSV, plus summary statistics and plot series.

#include <filesystem>
#include <string>
#include <vector>

#include "evfleet/pipeline.hpp"

namespace evfleet {

/// Default subsample windows between 500 and 3.
std::vector<int> default_omegas();

struct SweepConfig {
  std::vector<int> omegas = default_omegas();
  std::vector<Variant> variants{Variant::SurplusAllowed};
  SolverConfig solver;          // time_limit_s applies per stage
  std::filesystem::path output;  // CSV; existing rows are kept and their keys skipped
  int repetitions = 1;           // > 1 reports median solver times
  bool with_p2 = true;
  int slack_limit = 1;
  bool parallel = false;         // cases run concurrently, speedup left blank
  BuildOptions build;

  void validate() const;
};

struct SweepRow {
  int omega = 0;
  std::size_t K = 0;
  Variant variant = Variant::SurplusAllowed;
  double J1 = kNaN;
  std::string J1_status;
  std::string P3;
  double J4 = kNaN;
  std::string J4_status;
  int slack = 0;
  double J2 = kNaN;
  std::string J2_status;   // "TimeLimit" etc.; empty when P2 was skipped
  double gap41 = kNaN;
  double gap21 = kNaN;     // gap41 when P2 is not proven optimal
  bool gap21_from_p4 = false;
  double T_P1 = kNaN, T_P3 = kNaN, T_P4 = kNaN, T_P2 = kNaN;
  double build_P1 = kNaN, build_P3 = kNaN, build_P4 = kNaN, build_P2 = kNaN;
  double speedup = kNaN;   // T_P2 / (T_P1 + T_P4), only when P2 was solved
  std::string error;

  bool operator==(const SweepRow& o) const;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
std::string emit_sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

/// `base` supplies blocks (the full dataset), catalogs and tariff.
std::vector<SweepRow> run_sweep(const Instance& base, const SweepConfig& cfg);

/// Builds one row from a pipeline run (exposed for tests).
SweepRow make_sweep_row(int omega, std::size_t K, const VariantReport& v, bool report_speedup);

struct SummaryStats {
  std::size_t rows = 0;
  std::size_t failed = 0;        // rows carrying an error
  double max_gap41 = kNaN;
  double median_gap41 = kNaN;
  double max_speedup = kNaN;
  std::size_t p3_feasible = 0;
  std::size_t p2_time_limit = 0;
};

SummaryStats summarize(const std::vector<SweepRow>& rows);

/// Writes gap_vs_K.dat and time_vs_K.dat (whitespace separated, '#' header).
void emit_plot_data(const std::vector<SweepRow>& rows, const std::filesystem::path& dir);

}  // namespace evfleet
