#include <cmath>

#include "doctest.h"
#include "evfleet/domain.hpp"
#include "evfleet/instance_io.hpp"
#include "evfleet/synthetic.hpp"
#include "test_util.hpp"

using namespace evfleet;

namespace {

Block blk(const char* id, int s, int e, double km = 10.0) { return {id, km, s, e}; }

bool has_code(const ValidationReport& r, ErrorCode c) {
  for (const auto& i : r.issues)
    if (i.code == c) return true;
  return false;
}

}  // namespace

TEST_CASE("time grid indexing") {
  TimeGrid g{3, 24, 1.0, {100, 100, 165}};
  CHECK(g.horizon() == 72);
  CHECK(g.tau_lo(0) == 1);
  CHECK(g.tau_hi(0) == 24);
  CHECK(g.tau_lo(2) == 49);
  CHECK(g.tau_hi(2) == 72);
  CHECK(g.next_in_day(24) == 1);
  CHECK(g.next_in_day(48) == 25);
  CHECK(g.next_in_day(30) == 31);
  CHECK(g.day_of(49) == 2);
}

TEST_CASE("block compatibility") {
  CHECK(block_compatibility(blk("a", 3, 5), blk("b", 6, 9)));
  CHECK_FALSE(block_compatibility(blk("a", 3, 5), blk("b", 3, 5)));
  CHECK_FALSE(block_compatibility(blk("a", 1, 4), blk("b", 4, 8)));

  Rng rng(11);
  for (int n = 0; n < 500; ++n) {
    const int s1 = rng.uniform_int(1, 20), s2 = rng.uniform_int(1, 20);
    const Block a = blk("a", s1, s1 + rng.uniform_int(0, 4));
    const Block b = blk("b", s2, s2 + rng.uniform_int(0, 4));
    CHECK(block_compatibility(a, b) == block_compatibility(b, a));
    const auto S = ScheduleMatrices::build({a, b}, TimeGrid{1, 24, 1.0, {365}});
    int worst = 0;
    for (int t = 1; t <= 24; ++t) worst = std::max(worst, S.A(0, t) + S.A(1, t));
    CHECK(block_compatibility(a, b) == (worst <= 1));
  }
}

TEST_CASE("schedule matrices") {
  TimeGrid g{2, 8, 1.0, {100, 265}};
  const BlockSet bs{blk("a", 2, 4), blk("b", 5, 8), blk("c", 9, 16)};
  const auto S = ScheduleMatrices::build(bs, g);
  for (std::size_t k = 0; k < bs.size(); ++k) {
    int a = 0, u = 0, v = 0;
    for (int t = 1; t <= g.horizon(); ++t) {
      a += S.A(k, t);
      u += S.U(k, t);
      v += S.V(k, t);
    }
    CHECK(a == bs[k].length());
    CHECK(u == 1);
    CHECK(v == 1);
    CHECK(S.U(k, bs[k].start_interval) == 1);
  }
  CHECK(S.V(0, 5) == 1);
  CHECK(S.V(1, 1) == 1);  // ends at tau_hi of day 1, returns at its tau_lo
  CHECK(S.V(2, 9) == 1);  // same on day 2
}

TEST_CASE("pairing power is the smaller of charger rating and vehicle acceptance") {
  const auto inst = testutil::tiny({blk("a", 3, 5)}, 2, 3);
  for (std::size_t i = 0; i < inst.I(); ++i)
    for (std::size_t j = 0; j < inst.J(); ++j)
      CHECK(inst.pairing(i, j) ==
            std::min(inst.chargers[j].rated_power_kw, inst.vehicles[i].max_accept_power_kw));
  CHECK(inst.pairing(0, 2) == 500.0);
  CHECK(inst.pairing(0, 0) == 50.0);
}

TEST_CASE("validate_instance") {
  SUBCASE("100 km block fits a 225 kWh bus") {
    auto v = default_vehicle_catalog();
    for (auto& x : v) x.drive_efficiency_kwh_per_km = 1.2;
    const auto inst = make_instance(testutil::day_grid(), {blk("k", 8, 12, 100.0)}, v,
                                    default_charger_catalog(), default_tariff(testutil::day_grid()));
    CHECK(validate_instance(inst).passed());
  }
  SUBCASE("empty block set") {
    CHECK(validate_instance(testutil::tiny({})).passed());
  }
  SUBCASE("500 km block exceeds every battery") {
    auto v = default_vehicle_catalog();
    for (auto& x : v) x.drive_efficiency_kwh_per_km = 1.0;
    const auto inst = make_instance(testutil::day_grid(), {blk("long", 2, 20, 500.0)}, v,
                                    default_charger_catalog(), default_tariff(testutil::day_grid()));
    const auto r = validate_instance(inst);
    REQUIRE_FALSE(r.passed());
    CHECK(r.issues[0].code == ErrorCode::AssumptionViolation);
    CHECK(r.issues[0].block_id == "long");
    CHECK_THROWS_AS(r.raise_if_failed(), Error);
  }
  SUBCASE("slow charger cannot refill the block within a day") {
    auto c = default_charger_catalog();
    c.resize(1);
    c[0].rated_power_kw = 5.0;  // 5 kW * 24 h = 120 kWh < energy of a 150 km block
    auto inst = make_instance(testutil::day_grid(), {blk("k", 2, 8, 150.0)},
                              {default_vehicle_catalog()[1]}, c, default_tariff(testutil::day_grid()));
    CHECK(has_code(validate_instance(inst), ErrorCode::AssumptionViolation));
  }
  SUBCASE("negative and zero parameters") {
    auto inst = testutil::tiny({blk("k", 2, 4)});
    inst.vehicles[0].capital_cost = -1;
    CHECK(has_code(validate_instance(inst), ErrorCode::NegativeParameter));
    inst = testutil::tiny({blk("k", 2, 4, 0.0)});
    CHECK_FALSE(validate_instance(inst).passed());
  }
  SUBCASE("inconsistent matrices") {
    auto inst = testutil::tiny({blk("k", 2, 4)});
    inst.schedule.set_A(0, 10, true);
    CHECK(has_code(validate_instance(inst), ErrorCode::InvalidMatrix));
  }
  SUBCASE("block crossing a day boundary") {
    TimeGrid g{2, 8, 1.0, {100, 265}};
    CHECK_THROWS_AS(make_instance(g, {blk("k", 7, 10)}, default_vehicle_catalog(),
                                  default_charger_catalog(), default_tariff(g)),
                    Error);
  }
  SUBCASE("duplicate ids") {
    auto inst = testutil::tiny({blk("k", 2, 4), blk("k", 6, 8)});
    CHECK_FALSE(validate_instance(inst).passed());
  }
}

TEST_CASE("annualize") {
  CHECK(annualize(800000, 12) == doctest::Approx(66666.6667));
  // capital recovery factor at 5 % over 10 years
  const double crf = 0.05 * std::pow(1.05, 10) / (std::pow(1.05, 10) - 1);
  CHECK(annualize(1000, 10, 0.05) == doctest::Approx(1000 * crf));
}

TEST_CASE("instance file round trip is bit exact") {
  SyntheticConfig sc;
  sc.blocks = 6;
  sc.days = 2;
  sc.vehicle_types = 2;
  sc.charger_types = 3;
  sc.seed = 5;
  const Instance a = generate_synthetic(sc);
  const std::string text = serialize_instance(a);
  const Instance b = parse_instance(text);
  CHECK(serialize_instance(b) == text);
  CHECK(b.schedule == a.schedule);
  CHECK(b.blocks[3].distance_km == a.blocks[3].distance_km);
  CHECK(b.vehicles[1].drive_efficiency_kwh_per_km == a.vehicles[1].drive_efficiency_kwh_per_km);
  CHECK(instance_fingerprint(a) == instance_fingerprint(b));
  CHECK(instance_fingerprint(a).size() == 16);

  CHECK_THROWS_AS(parse_instance("{\"schema\": \"other/1\"}"), Error);
  CHECK_THROWS_AS(parse_instance("not json"), Error);
  CHECK_THROWS_AS(read_instance("/nonexistent/instance.json"), Error);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("variant names") {
  CHECK(parse_variant("surplus") == Variant::SurplusAllowed);
  CHECK(parse_variant("exact") == Variant::ExactEnergy);
  CHECK(parse_variant(to_string(Variant::ExactEnergy)) == Variant::ExactEnergy);
  CHECK_THROWS_AS(parse_variant("loose"), Error);
}
