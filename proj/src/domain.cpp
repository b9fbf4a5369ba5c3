#include "evfleet/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace evfleet {

std::string_view to_string(Variant v) noexcept {
  return v == Variant::SurplusAllowed ? "SurplusAllowed" : "ExactEnergy";
}

Variant parse_variant(std::string_view text) {
  if (text == "surplus" || text == "SurplusAllowed") return Variant::SurplusAllowed;
  if (text == "exact" || text == "ExactEnergy") return Variant::ExactEnergy;
  throw Error(ErrorCode::InvalidArgument, "fleet_domain.parse_variant",
              "unknown variant '" + std::string(text) + "'");
}

PairingMatrix PairingMatrix::from_catalogs(const std::vector<VehicleType>& vehicles,
                                           const std::vector<ChargerType>& chargers) {
  PairingMatrix out;
  out.p_kw.assign(vehicles.size(), std::vector<double>(chargers.size(), 0.0));
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = 0; j < chargers.size(); ++j) {
      out.p_kw[i][j] = std::max(0.0, std::min(chargers[j].rated_power_kw,
                                              vehicles[i].max_accept_power_kw));
    }
  }
  return out;
}

ScheduleMatrices::ScheduleMatrices(std::size_t blocks, int horizon)
    : blocks_(blocks),
      horizon_(horizon),
      a_(blocks * static_cast<std::size_t>(horizon), 0),
      u_(a_.size(), 0),
      v_(a_.size(), 0) {}

std::size_t ScheduleMatrices::offset(std::size_t k, int t) const {
  if (k >= blocks_ || t < 1 || t > horizon_) {
    throw Error(ErrorCode::InvalidArgument, "fleet_domain.ScheduleMatrices",
                "index (k=" + std::to_string(k) + ", t=" + std::to_string(t) + ") out of range");
  }
  return k * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t - 1);
}

ScheduleMatrices ScheduleMatrices::build(const BlockSet& blocks, const TimeGrid& grid) {
  ScheduleMatrices out(blocks.size(), grid.horizon());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& b = blocks[k];
    if (b.start_interval < 1 || b.end_interval > grid.horizon() ||
        b.start_interval > b.end_interval ||
        grid.day_of(b.start_interval) != grid.day_of(b.end_interval)) {
      throw Error(ErrorCode::BlockSpansDayBoundary, "fleet_domain.ScheduleMatrices.build",
                  "block '" + b.id + "' interval [" + std::to_string(b.start_interval) + "," +
                      std::to_string(b.end_interval) + "] leaves its representative day");
    }
    for (int t = b.start_interval; t <= b.end_interval; ++t) out.set_A(k, t, true);
    out.set_U(k, b.start_interval, true);
    out.set_V(k, grid.next_in_day(b.end_interval), true);
  }
  return out;
}

Instance make_instance(TimeGrid grid, BlockSet blocks, std::vector<VehicleType> vehicles,
                       std::vector<ChargerType> chargers, Tariff tariff, Variant variant) {
  Instance inst;
  inst.time_grid = std::move(grid);
  inst.blocks = std::move(blocks);
  inst.vehicles = std::move(vehicles);
  inst.chargers = std::move(chargers);
  inst.tariff = std::move(tariff);
  inst.variant = variant;
  inst.pairing = PairingMatrix::from_catalogs(inst.vehicles, inst.chargers);
  inst.schedule = ScheduleMatrices::build(inst.blocks, inst.time_grid);
  return inst;
}

void ValidationReport::raise_if_failed() const {
  if (passed()) return;
  const auto& first = issues.front();
  std::string detail = first.message;
  if (!first.block_id.empty()) detail += " (block '" + first.block_id + "')";
  throw Error(first.code, "fleet_domain.validate_instance", detail);
}

namespace {

class IssueSink {
 public:
  explicit IssueSink(ValidationReport& report) : report_(report) {}

  void add(ErrorCode code, std::string message, std::string block_id = {}) {
    report_.issues.push_back({code, std::move(block_id), std::move(message)});
  }

 private:
  ValidationReport& report_;
};

template <typename T>
bool ids_unique(const std::vector<T>& items) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) return false;
  }
  return true;
}

void check_grid(const TimeGrid& g, IssueSink& sink) {
  if (g.days < 1 || g.intervals_per_day < 1)
    sink.add(ErrorCode::NegativeParameter, "time grid needs S >= 1 and T_d >= 1");
  if (!(g.delta_t > 0.0)) sink.add(ErrorCode::NegativeParameter, "delta_t must be > 0");
  if (g.day_weight.size() != static_cast<std::size_t>(std::max(g.days, 0))) {
    sink.add(ErrorCode::SchemaError, "day_weight must have one entry per representative day");
  }
  for (double w : g.day_weight) {
    if (!(w >= 1.0)) sink.add(ErrorCode::NegativeParameter, "day_weight entries must be >= 1");
  }
}

void check_catalogs(const Instance& inst, IssueSink& sink) {
  if (inst.vehicles.empty()) sink.add(ErrorCode::SchemaError, "at least one vehicle type required");
  if (inst.chargers.empty()) sink.add(ErrorCode::SchemaError, "at least one charger type required");
  if (!ids_unique(inst.vehicles)) sink.add(ErrorCode::SchemaError, "vehicle ids must be unique");
  if (!ids_unique(inst.chargers)) sink.add(ErrorCode::SchemaError, "charger ids must be unique");

  for (const auto& v : inst.vehicles) {
    if (!(v.energy_capacity_kwh > 0.0 && v.drive_efficiency_kwh_per_km > 0.0 &&
          v.capital_cost > 0.0 && v.maintenance_cost_per_km > 0.0 &&
          v.max_accept_power_kw > 0.0)) {
      sink.add(ErrorCode::NegativeParameter,
               "vehicle type '" + v.id + "' has a non-positive numeric field");
    }
  }
  for (const auto& c : inst.chargers) {
    if (!(c.rated_power_kw > 0.0))
      sink.add(ErrorCode::NegativeParameter, "charger type '" + c.id + "' rated power must be > 0");
    if (!(c.capital_cost >= 0.0))
      sink.add(ErrorCode::NegativeParameter, "charger type '" + c.id + "' capital cost must be >= 0");
  }

  const auto expected = PairingMatrix::from_catalogs(inst.vehicles, inst.chargers);
  bool shape_ok = inst.pairing.p_kw.size() == inst.I();
  for (const auto& row : inst.pairing.p_kw) shape_ok = shape_ok && row.size() == inst.J();
  if (!shape_ok) {
    sink.add(ErrorCode::InvalidMatrix, "pairing matrix must be I x J");
    return;
  }
  for (std::size_t i = 0; i < inst.I(); ++i) {
    for (std::size_t j = 0; j < inst.J(); ++j) {
      if (inst.pairing(i, j) < 0.0 || inst.pairing(i, j) != expected.p_kw[i][j]) {
        sink.add(ErrorCode::InvalidMatrix,
                 "pairing p_kw(" + std::to_string(i) + "," + std::to_string(j) +
                     ") must equal min(charger rating, vehicle acceptance)");
      }
    }
  }
}

void check_tariff(const Instance& inst, IssueSink& sink) {
  const auto& tariff = inst.tariff;
  if (tariff.energy_price.size() != static_cast<std::size_t>(inst.T()))
    sink.add(ErrorCode::SchemaError, "energy_price must have one entry per interval");
  for (double p : tariff.energy_price) {
    if (!(p >= 0.0)) sink.add(ErrorCode::NegativeParameter, "energy prices must be >= 0");
  }
  for (const auto& group : tariff.demand_groups) {
    if (!(group.rate >= 0.0))
      sink.add(ErrorCode::NegativeParameter, "demand group '" + group.name + "' rate must be >= 0");
    for (int t : group.intervals) {
      if (t < 1 || t > inst.T())
        sink.add(ErrorCode::SchemaError,
                 "demand group '" + group.name + "' references interval " + std::to_string(t));
    }
  }
  if (!(tariff.grid_cap_kw > 0.0)) sink.add(ErrorCode::NegativeParameter, "grid_cap_kw must be > 0");
}

bool check_blocks(const Instance& inst, IssueSink& sink) {
  bool ok = true;
  if (!ids_unique(inst.blocks)) {
    sink.add(ErrorCode::SchemaError, "block ids must be unique");
    ok = false;
  }
  const auto& g = inst.time_grid;
  for (const auto& b : inst.blocks) {
    if (!(b.distance_km > 0.0)) {
      sink.add(ErrorCode::NegativeParameter, "distance_km must be > 0", b.id);
      ok = false;
    }
    if (b.start_interval < 1 || b.end_interval > g.horizon() || b.start_interval > b.end_interval ||
        g.day_of(b.start_interval) != g.day_of(b.end_interval)) {
      sink.add(ErrorCode::BlockSpansDayBoundary,
               "block interval must lie inside one representative day", b.id);
      ok = false;
    } else if (b.length() >= g.intervals_per_day) {
      sink.add(ErrorCode::AssumptionViolation,
               "block occupies the whole day and leaves no interval to recharge", b.id);
    }
  }
  return ok;
}

void check_schedule(const Instance& inst, IssueSink& sink) {
  const ScheduleMatrices expected = ScheduleMatrices::build(inst.blocks, inst.time_grid);
  const auto& got = inst.schedule;
  if (got.blocks() != expected.blocks() || got.horizon() != expected.horizon()) {
    sink.add(ErrorCode::InvalidMatrix, "schedule matrices have the wrong shape");
    return;
  }
  for (std::size_t k = 0; k < inst.K(); ++k) {
    int u_sum = 0, v_sum = 0;
    bool row_ok = true;
    for (int t = 1; t <= inst.T(); ++t) {
      u_sum += got.U(k, t);
      v_sum += got.V(k, t);
      row_ok = row_ok && got.A(k, t) == expected.A(k, t) && got.U(k, t) == expected.U(k, t) &&
               got.V(k, t) == expected.V(k, t);
    }
    if (!row_ok || u_sum != 1 || v_sum != 1) {
      sink.add(ErrorCode::InvalidMatrix, "A/U/V rows disagree with block start/end",
               inst.blocks[k].id);
    }
  }
}

void check_assumption(const Instance& inst, IssueSink& sink) {
  if (inst.blocks.empty() || inst.vehicles.empty() || inst.chargers.empty()) return;
  const auto longest = std::max_element(
      inst.blocks.begin(), inst.blocks.end(),
      [](const Block& a, const Block& b) { return a.distance_km < b.distance_km; });
  const std::size_t k = static_cast<std::size_t>(longest - inst.blocks.begin());
  const double day_hours = inst.time_grid.intervals_per_day * inst.time_grid.delta_t;

  bool range_ok = false;
  for (std::size_t i = 0; i < inst.I(); ++i) {
    const double need = inst.block_energy(k, i);
    if (inst.vehicles[i].energy_capacity_kwh < need) continue;
    range_ok = true;
    for (std::size_t j = 0; j < inst.J(); ++j) {
      if (inst.pairing(i, j) * day_hours >= need) return;
    }
  }
  std::ostringstream msg;
  msg << (range_ok ? "no charger can replenish the longest block within one day"
                   : "no vehicle type has enough range for the longest block")
      << " (" << longest->distance_km << " km)";
  sink.add(ErrorCode::AssumptionViolation, msg.str(), longest->id);
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  IssueSink sink(report);
  check_grid(inst.time_grid, sink);
  if (!report.passed()) return report;
  check_catalogs(inst, sink);
  check_tariff(inst, sink);
  const bool blocks_ok = check_blocks(inst, sink);
  if (blocks_ok) check_schedule(inst, sink);
  if (report.passed()) check_assumption(inst, sink);
  return report;
}

bool block_compatibility(const Block& first, const Block& second) noexcept {
  return first.end_interval < second.start_interval || second.end_interval < first.start_interval;
}

double annualize(double capital, double lifetime_years, double discount_rate) {
  if (!(lifetime_years > 0.0)) {
    throw Error(ErrorCode::NegativeParameter, "fleet_domain.annualize", "lifetime must be > 0");
  }
  if (discount_rate == 0.0) return capital / lifetime_years;
  const double crf = discount_rate / (1.0 - std::pow(1.0 + discount_rate, -lifetime_years));
  return capital * crf;
}

}  // namespace evfleet
