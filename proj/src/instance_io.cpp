#include "evfleet/instance_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evfleet {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kWhere = "fleet_domain.instance_io";

json to_json(const Instance& inst) {
  json doc;
  doc["schema"] = kInstanceSchema;
  doc["variant"] = std::string(to_string(inst.variant));

  const auto& g = inst.time_grid;
  doc["time_grid"] = {{"S", g.days},
                      {"T_d", g.intervals_per_day},
                      {"delta_t", g.delta_t},
                      {"day_weight", g.day_weight}};

  json blocks = json::array();
  for (const auto& b : inst.blocks) {
    blocks.push_back({{"id", b.id},
                      {"distance_km", b.distance_km},
                      {"start_interval", b.start_interval},
                      {"end_interval", b.end_interval}});
  }
  doc["blocks"] = std::move(blocks);

  json vehicles = json::array();
  for (const auto& v : inst.vehicles) {
    vehicles.push_back({{"id", v.id},
                        {"energy_capacity_kwh", v.energy_capacity_kwh},
                        {"drive_efficiency_kwh_per_km", v.drive_efficiency_kwh_per_km},
                        {"capital_cost", v.capital_cost},
                        {"maintenance_cost_per_km", v.maintenance_cost_per_km},
                        {"max_accept_power_kw", v.max_accept_power_kw}});
  }
  doc["vehicles"] = std::move(vehicles);

  json chargers = json::array();
  for (const auto& c : inst.chargers) {
    chargers.push_back(
        {{"id", c.id}, {"rated_power_kw", c.rated_power_kw}, {"capital_cost", c.capital_cost}});
  }
  doc["chargers"] = std::move(chargers);

  doc["pairing"] = {{"p_kw", inst.pairing.p_kw}};

  json groups = json::array();
  for (const auto& grp : inst.tariff.demand_groups) {
    groups.push_back({{"name", grp.name}, {"intervals", grp.intervals}, {"rate", grp.rate}});
  }
  doc["tariff"] = {{"energy_price", inst.tariff.energy_price},
                   {"demand_groups", std::move(groups)},
                   {"grid_cap_kw", inst.tariff.grid_cap_kw}};
  return doc;
}

template <typename T>
T field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::SchemaError, kWhere, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, kWhere, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string serialize_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, kWhere, e.what());
  }
  const auto schema = field<std::string>(doc, "schema");
  if (schema != kInstanceSchema) {
    throw Error(ErrorCode::SchemaError, kWhere, "unsupported schema '" + schema + "'");
  }

  TimeGrid grid;
  const json& g = doc.at("time_grid");
  grid.days = field<int>(g, "S");
  grid.intervals_per_day = field<int>(g, "T_d");
  grid.delta_t = field<double>(g, "delta_t");
  grid.day_weight = field<std::vector<double>>(g, "day_weight");

  BlockSet blocks;
  for (const auto& b : field<json>(doc, "blocks")) {
    blocks.push_back({field<std::string>(b, "id"), field<double>(b, "distance_km"),
                      field<int>(b, "start_interval"), field<int>(b, "end_interval")});
  }
  std::vector<VehicleType> vehicles;
  for (const auto& v : field<json>(doc, "vehicles")) {
    vehicles.push_back({field<std::string>(v, "id"), field<double>(v, "energy_capacity_kwh"),
                        field<double>(v, "drive_efficiency_kwh_per_km"),
                        field<double>(v, "capital_cost"),
                        field<double>(v, "maintenance_cost_per_km"),
                        field<double>(v, "max_accept_power_kw")});
  }
  std::vector<ChargerType> chargers;
  for (const auto& c : field<json>(doc, "chargers")) {
    chargers.push_back({field<std::string>(c, "id"), field<double>(c, "rated_power_kw"),
                        field<double>(c, "capital_cost")});
  }
  Tariff tariff;
  const json& t = field<json>(doc, "tariff");
  tariff.energy_price = field<std::vector<double>>(t, "energy_price");
  for (const auto& grp : field<json>(t, "demand_groups")) {
    tariff.demand_groups.push_back({field<std::string>(grp, "name"),
                                    field<std::vector<int>>(grp, "intervals"),
                                    field<double>(grp, "rate")});
  }
  tariff.grid_cap_kw = field<double>(t, "grid_cap_kw");

  Instance inst = make_instance(std::move(grid), std::move(blocks), std::move(vehicles),
                                std::move(chargers), std::move(tariff),
                                parse_variant(field<std::string>(doc, "variant")));
  if (doc.contains("pairing")) {
    inst.pairing.p_kw = field<std::vector<std::vector<double>>>(doc.at("pairing"), "p_kw");
  }
  return inst;
}

void write_instance(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, kWhere, "cannot write " + path.string());
  out << serialize_instance(inst);
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, kWhere, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string instance_fingerprint(const Instance& inst) { return fnv1a_hex(serialize_instance(inst)); }

}  // namespace evfleet
