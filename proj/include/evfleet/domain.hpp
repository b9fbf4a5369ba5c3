#pragma once

// Fleet domain model: time structure, vehicle/charger catalogs, tariff, trip
// blocks and the schedule matrices derived from them.
//
// Index conventions used across the library:
//   * time intervals t are 1-based global indices 1..T (T = S * T_d);
//   * days s, blocks k, vehicle types i, charger types j and demand groups l
//     are 0-based positions in their containers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evfleet/error.hpp"

namespace evfleet {

enum class Variant {
  SurplusAllowed,  // departures may carry more energy than the block needs
  ExactEnergy,     // departures carry exactly the block's energy need
};

std::string_view to_string(Variant v) noexcept;
/// Accepts "surplus"/"exact" as well as the enumerator names.
Variant parse_variant(std::string_view text);

struct TimeGrid {
  int days = 1;                     // S
  int intervals_per_day = 24;       // T_d
  double delta_t = 1.0;             // hours per interval
  std::vector<double> day_weight;   // real days represented by each representative day

  int horizon() const noexcept { return days * intervals_per_day; }
  int tau_lo(int s) const noexcept { return s * intervals_per_day + 1; }
  int tau_hi(int s) const noexcept { return (s + 1) * intervals_per_day; }
  int day_of(int t) const noexcept { return (t - 1) / intervals_per_day; }
  /// Interval following t inside its own day, wrapping tau_hi(s) -> tau_lo(s).
  int next_in_day(int t) const noexcept {
    const int s = day_of(t);
    return t == tau_hi(s) ? tau_lo(s) : t + 1;
  }
};

struct VehicleType {
  std::string id;
  double energy_capacity_kwh = 0.0;           // R_i
  double drive_efficiency_kwh_per_km = 0.0;   // eta_i
  double capital_cost = 0.0;                  // per planning period, annualized
  double maintenance_cost_per_km = 0.0;
  double max_accept_power_kw = 0.0;
};

struct ChargerType {
  std::string id;
  double rated_power_kw = 0.0;
  double capital_cost = 0.0;  // per planning period, annualized
};

/// Effective charging power of vehicle type i on charger type j.
struct PairingMatrix {
  std::vector<std::vector<double>> p_kw;

  double operator()(std::size_t i, std::size_t j) const { return p_kw.at(i).at(j); }

  static PairingMatrix from_catalogs(const std::vector<VehicleType>& vehicles,
                                     const std::vector<ChargerType>& chargers);
};

struct DemandGroup {
  std::string name;
  std::vector<int> intervals;  // global 1-based interval indices
  double rate = 0.0;           // money per kW, already scaled by billing periods
};

struct Tariff {
  std::vector<double> energy_price;  // money per kWh, one entry per interval
  std::vector<DemandGroup> demand_groups;
  double grid_cap_kw = 0.0;
};

struct Block {
  std::string id;
  double distance_km = 0.0;
  int start_interval = 1;  // inclusive
  int end_interval = 1;    // inclusive, same representative day as start

  int length() const noexcept { return end_interval - start_interval + 1; }
};

using BlockSet = std::vector<Block>;

/// Dense 0/1 matrices A (en route), U (departure) and V (return) of size K x T.
class ScheduleMatrices {
 public:
  ScheduleMatrices() = default;
  ScheduleMatrices(std::size_t blocks, int horizon);

  static ScheduleMatrices build(const BlockSet& blocks, const TimeGrid& grid);

  std::size_t blocks() const noexcept { return blocks_; }
  int horizon() const noexcept { return horizon_; }

  std::uint8_t A(std::size_t k, int t) const { return a_[offset(k, t)]; }
  std::uint8_t U(std::size_t k, int t) const { return u_[offset(k, t)]; }
  std::uint8_t V(std::size_t k, int t) const { return v_[offset(k, t)]; }

  void set_A(std::size_t k, int t, bool on) { a_[offset(k, t)] = on ? 1 : 0; }
  void set_U(std::size_t k, int t, bool on) { u_[offset(k, t)] = on ? 1 : 0; }
  void set_V(std::size_t k, int t, bool on) { v_[offset(k, t)] = on ? 1 : 0; }

  bool operator==(const ScheduleMatrices&) const = default;

 private:
  std::size_t offset(std::size_t k, int t) const;

  std::size_t blocks_ = 0;
  int horizon_ = 0;
  std::vector<std::uint8_t> a_, u_, v_;
};

struct Instance {
  TimeGrid time_grid;
  BlockSet blocks;
  std::vector<VehicleType> vehicles;
  std::vector<ChargerType> chargers;
  PairingMatrix pairing;
  Tariff tariff;
  Variant variant = Variant::SurplusAllowed;
  ScheduleMatrices schedule;  // derived from blocks + time_grid

  std::size_t K() const noexcept { return blocks.size(); }
  std::size_t I() const noexcept { return vehicles.size(); }
  std::size_t J() const noexcept { return chargers.size(); }
  int T() const noexcept { return time_grid.horizon(); }
  std::size_t L() const noexcept { return tariff.demand_groups.size(); }

  /// Energy block k needs on vehicle type i (D_k * eta_i).
  double block_energy(std::size_t k, std::size_t i) const {
    return blocks[k].distance_km * vehicles[i].drive_efficiency_kwh_per_km;
  }
};

/// Fills in the derived pairing matrix and schedule matrices.
Instance make_instance(TimeGrid grid, BlockSet blocks, std::vector<VehicleType> vehicles,
                       std::vector<ChargerType> chargers, Tariff tariff,
                       Variant variant = Variant::SurplusAllowed);

struct ValidationIssue {
  ErrorCode code;
  std::string block_id;  // empty when the issue is not tied to a block
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool passed() const noexcept { return issues.empty(); }
  /// Throws the first issue as an Error; no-op when passed.
  void raise_if_failed() const;
};

ValidationReport validate_instance(const Instance& inst);

/// Blocks can share one vehicle iff their en-route windows do not overlap.
bool block_compatibility(const Block& first, const Block& second) noexcept;

/// Straight-line annualization of a capital outlay; a positive discount rate
/// switches to the capital recovery factor r / (1 - (1 + r)^-n).
double annualize(double capital, double lifetime_years, double discount_rate = 0.0);

}  // namespace evfleet
