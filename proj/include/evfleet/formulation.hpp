#pragma once

// Builders for the four fleet problems:
//   P1  integer-clustering planning model (fleet-level charging and energy);
//   P2  individual-vehicle planning benchmark (P1 plus per-vehicle schedules);
//   P3  exact disaggregation feasibility check of a P1 solution, one submodel
//       per vehicle type;
//   P4  disaggregation re-optimization with fleet sizing and block-type
//       assignment fixed from a P1 solution, optional charger slack.
//
// Row names encode the constraint family and 1-based index tuple, e.g.
// eq09_soe[i=1,s=1,t=17]. Variable families: b n m N_v N_c p_v soe d p_g p_pk
// y bb x pp soev dd slack_Nc.

#include <cstddef>
#include <vector>

#include "evfleet/domain.hpp"
#include "evfleet/model.hpp"

namespace evfleet {

struct BuildOptions {
  std::size_t max_variables = 3'000'000;  // ModelTooLarge guard
  bool symmetry_breaking = true;          // P2/P3/P4 vehicle relabeling cuts
};

/// Values of every P1 variable family, cleaned (integers rounded, |v| < 1e-9 -> 0).
struct AggSolution {
  std::vector<std::vector<double>> b;               // [k][i]
  std::vector<std::vector<double>> n;               // [i][t-1]
  std::vector<std::vector<std::vector<double>>> m;  // [i][j][t-1]
  std::vector<double> Nv;                           // [i]
  std::vector<double> Nc;                           // [j]
  std::vector<std::vector<double>> p_v;             // [i][t-1]
  std::vector<std::vector<double>> soe;             // [i][t-1]
  std::vector<std::vector<double>> d;               // [k][i]
  std::vector<double> p_g;                          // [t-1]
  std::vector<double> p_pk;                         // [l]
  double objective = 0.0;

  int fleet_size(std::size_t i) const;
  int charger_count(std::size_t j) const;
  /// Vehicle type serving block k.
  std::size_t type_of(std::size_t k) const;
};

/// Reads the P1 families out of a solved P1, P2 or P4 model.
AggSolution extract_agg(const Instance& inst, const MilpModel& model,
                        const std::vector<double>& values);

MilpModel build_p1(const Instance& inst, const BuildOptions& opt = {});
MilpModel build_p2(const Instance& inst, const BuildOptions& opt = {});
/// One independent feasibility submodel per vehicle type (index = type).
std::vector<MilpModel> build_p3(const Instance& inst, const AggSolution& agg,
                                const BuildOptions& opt = {});
MilpModel build_p4(const Instance& inst, const AggSolution& agg, int charger_slack_limit = 0,
                   const BuildOptions& opt = {});

struct ModelCounts {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  bool operator==(const ModelCounts&) const = default;
};

/// Closed-form sizes. `fleet` gives per-type vehicle counts for P3/P4 and is
/// ignored for P1/P2; `p3_type` selects the P3 submodel.
ModelCounts expected_counts(const Instance& inst, ProblemId problem,
                            const std::vector<int>& fleet = {}, bool with_slack = false,
                            std::size_t p3_type = 0);

}  // namespace evfleet
