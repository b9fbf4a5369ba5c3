#pragma once

// Seeded synthetic instances and the default equipment/tariff catalogs.
//
// Default catalog (annualized over the asset lifetime, straight line):
//   vehicles  40 ft bus 225 kWh / 106 mi range, 60 ft bus 450 kWh / 197 mi,
//             both accept up to 500 kW, 0.64 $/km maintenance, 12 year life;
//   chargers  50, 150 and 500 kW plugs, hardware plus installation, 28 years;
//   tariff    0.132 $/kWh flat energy price; monthly demand charge billed as a
//             4-month summer group at 24.09 $/kW and an 8-month group at 17.92.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "evfleet/domain.hpp"

namespace evfleet {

std::vector<VehicleType> default_vehicle_catalog();
std::vector<ChargerType> default_charger_catalog();

/// Flat energy price and the two seasonal demand groups over `grid`.
/// One representative day carries both groups; with more days the first day
/// is the summer day and the rest share the other eight months.
Tariff default_tariff(const TimeGrid& grid, double grid_cap_kw = 10000.0);
/// Day weights matching default_tariff's season split (365 days in total).
std::vector<double> default_day_weights(int days);

/// Wraps blocks with the first `vehicle_types` / `charger_types` default catalog
/// entries and the default tariff.
Instance default_instance(BlockSet blocks, const TimeGrid& grid, int vehicle_types = 2,
                          int charger_types = 3, Variant variant = Variant::SurplusAllowed,
                          double grid_cap_kw = 10000.0);

struct SyntheticConfig {
  int blocks = 8;                 // K
  int days = 1;                   // S
  int intervals_per_day = 24;     // T_d
  double delta_t = 1.0;           // hours
  int min_block_intervals = 2;
  int max_block_intervals = 6;
  double km_per_hour = 20.0;      // mean driving distance per hour en route
  double distance_jitter = 0.2;   // distances scale by U(1 - j, 1 + j)
  int vehicle_types = 1;          // first I entries of the default catalog
  int charger_types = 1;          // first J entries
  double grid_cap_kw = 10000.0;
  Variant variant = Variant::SurplusAllowed;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Blocks are named "syn<k>" in generation order and then sorted by start.
Instance generate_synthetic(const SyntheticConfig& cfg);

std::string serialize_synthetic_config(const SyntheticConfig& cfg);
SyntheticConfig parse_synthetic_config(const std::string& text);
SyntheticConfig read_synthetic_config(const std::filesystem::path& path);

/// mt19937_64 with fixed range mappings, so streams agree across standard libraries
/// (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace evfleet
