#include "evfleet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evfleet {

namespace {

constexpr double kKmPerMile = 1.609344;
constexpr double kChargerInstall = 22626.0;

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

int Rng::uniform_int(int lo, int hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next() % span);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::vector<VehicleType> default_vehicle_catalog() {
  return {
      {"bus40", 225.0, 225.0 / (106.0 * kKmPerMile), annualize(800000.0, 12.0), 0.64, 500.0},
      {"bus60", 450.0, 450.0 / (197.0 * kKmPerMile), annualize(821944.0, 12.0), 0.64, 500.0},
  };
}

std::vector<ChargerType> default_charger_catalog() {
  return {
      {"plug50", 50.0, annualize(37000.0 + kChargerInstall, 28.0)},
      {"plug150", 150.0, annualize(45000.0 + kChargerInstall, 28.0)},
      {"pantograph500", 500.0, annualize(349000.0 + 250000.0, 28.0)},
  };
}

std::vector<double> default_day_weights(int days) {
  if (days <= 1) return {365.0};
  std::vector<double> w(static_cast<std::size_t>(days), 243.0 / (days - 1));
  w[0] = 122.0;
  return w;
}

Tariff default_tariff(const TimeGrid& grid, double grid_cap_kw) {
  Tariff t;
  t.energy_price.assign(static_cast<std::size_t>(grid.horizon()), 0.132);
  t.grid_cap_kw = grid_cap_kw;
  DemandGroup summer{"summer", {}, 4 * 24.09};
  DemandGroup other{"other", {}, 8 * 17.92};
  for (int s = 0; s < grid.days; ++s) {
    for (int tt = grid.tau_lo(s); tt <= grid.tau_hi(s); ++tt) {
      if (grid.days == 1 || s == 0) summer.intervals.push_back(tt);
      if (grid.days == 1 || s > 0) other.intervals.push_back(tt);
    }
  }
  t.demand_groups = {summer, other};
  return t;
}

Instance default_instance(BlockSet blocks, const TimeGrid& grid, int vehicle_types,
                          int charger_types, Variant variant, double grid_cap_kw) {
  auto vehicles = default_vehicle_catalog();
  auto chargers = default_charger_catalog();
  if (vehicle_types < 1 || vehicle_types > static_cast<int>(vehicles.size()) || charger_types < 1 ||
      charger_types > static_cast<int>(chargers.size())) {
    throw Error(ErrorCode::InvalidArgument, "schedule_ingest.default_instance",
                "catalog offers 1-2 vehicle types and 1-3 charger types");
  }
  vehicles.resize(static_cast<std::size_t>(vehicle_types));
  chargers.resize(static_cast<std::size_t>(charger_types));
  return make_instance(grid, std::move(blocks), std::move(vehicles), std::move(chargers),
                       default_tariff(grid, grid_cap_kw), variant);
}

void SyntheticConfig::validate() const {
  constexpr const char* where = "schedule_ingest.generate_synthetic";
  if (blocks < 0 || days < 1 || intervals_per_day < 2 || !(delta_t > 0.0) ||
      min_block_intervals < 1 || max_block_intervals < min_block_intervals ||
      !(km_per_hour > 0.0) || distance_jitter < 0.0 || distance_jitter >= 1.0 ||
      !(grid_cap_kw > 0.0)) {
    throw Error(ErrorCode::ConfigInfeasible, where, "synthetic config has out-of-range fields");
  }
  if (vehicle_types < 1 || vehicle_types > 2 || charger_types < 1 || charger_types > 3) {
    throw Error(ErrorCode::ConfigInfeasible, where,
                "default catalog offers 1-2 vehicle types and 1-3 charger types");
  }
  if (max_block_intervals >= intervals_per_day) {
    throw Error(ErrorCode::ConfigInfeasible, where,
                "blocks of " + std::to_string(max_block_intervals) +
                    " intervals leave no time to recharge in a " +
                    std::to_string(intervals_per_day) + "-interval day");
  }
  // Worst-case block must fit some vehicle type's battery.
  const auto vehicles = default_vehicle_catalog();
  const double worst_km = max_block_intervals * delta_t * km_per_hour * (1.0 + distance_jitter);
  bool fits = false;
  for (int i = 0; i < vehicle_types; ++i) {
    fits = fits || worst_km * vehicles[i].drive_efficiency_kwh_per_km <=
                       vehicles[i].energy_capacity_kwh;
  }
  if (!fits) {
    throw Error(ErrorCode::ConfigInfeasible, where,
                "longest possible block exceeds every battery in the catalog");
  }
}

Instance generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  TimeGrid grid{cfg.days, cfg.intervals_per_day, cfg.delta_t, default_day_weights(cfg.days)};
  BlockSet blocks;
  for (int k = 0; k < cfg.blocks; ++k) {
    const int len = rng.uniform_int(cfg.min_block_intervals, cfg.max_block_intervals);
    const int day = rng.uniform_int(0, cfg.days - 1);
    const int start = rng.uniform_int(1, cfg.intervals_per_day - len);
    const double km = len * cfg.delta_t * cfg.km_per_hour *
                      rng.uniform(1.0 - cfg.distance_jitter, 1.0 + cfg.distance_jitter);
    const int t0 = grid.tau_lo(day) + start - 1;
    blocks.push_back({"syn" + std::to_string(k + 1), std::round(km * 1000.0) / 1000.0, t0,
                      t0 + len - 1});
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return a.start_interval < b.start_interval;
  });
  Instance inst = default_instance(std::move(blocks), grid, cfg.vehicle_types, cfg.charger_types,
                                   cfg.variant, cfg.grid_cap_kw);
  validate_instance(inst).raise_if_failed();
  return inst;
}

std::string serialize_synthetic_config(const SyntheticConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = "evfleet.synthetic/1";
  j["K"] = cfg.blocks;
  j["S"] = cfg.days;
  j["T_d"] = cfg.intervals_per_day;
  j["delta_t"] = cfg.delta_t;
  j["min_block_intervals"] = cfg.min_block_intervals;
  j["max_block_intervals"] = cfg.max_block_intervals;
  j["km_per_hour"] = cfg.km_per_hour;
  j["distance_jitter"] = cfg.distance_jitter;
  j["vehicle_types"] = cfg.vehicle_types;
  j["charger_types"] = cfg.charger_types;
  j["grid_cap_kw"] = cfg.grid_cap_kw;
  j["variant"] = std::string(to_string(cfg.variant));
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

SyntheticConfig parse_synthetic_config(const std::string& text) {
  constexpr const char* where = "schedule_ingest.parse_synthetic_config";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, where, e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "evfleet.synthetic/1") {
    throw Error(ErrorCode::SchemaError, where, "expected schema evfleet.synthetic/1");
  }
  SyntheticConfig cfg;
  try {
    cfg.blocks = j.value("K", cfg.blocks);
    cfg.days = j.value("S", cfg.days);
    cfg.intervals_per_day = j.value("T_d", cfg.intervals_per_day);
    cfg.delta_t = j.value("delta_t", cfg.delta_t);
    cfg.min_block_intervals = j.value("min_block_intervals", cfg.min_block_intervals);
    cfg.max_block_intervals = j.value("max_block_intervals", cfg.max_block_intervals);
    cfg.km_per_hour = j.value("km_per_hour", cfg.km_per_hour);
    cfg.distance_jitter = j.value("distance_jitter", cfg.distance_jitter);
    cfg.vehicle_types = j.value("vehicle_types", cfg.vehicle_types);
    cfg.charger_types = j.value("charger_types", cfg.charger_types);
    cfg.grid_cap_kw = j.value("grid_cap_kw", cfg.grid_cap_kw);
    if (j.contains("variant")) cfg.variant = parse_variant(j["variant"].get<std::string>());
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, where, e.what());
  }
  return cfg;
}

SyntheticConfig read_synthetic_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "schedule_ingest.read_synthetic_config", path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_synthetic_config(os.str());
}

}  // namespace evfleet
