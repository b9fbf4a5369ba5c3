#include <cmath>
#include <functional>

#include "doctest.h"
#include "evfleet/gtfs.hpp"
#include "evfleet/instance_io.hpp"
#include "evfleet/synthetic.hpp"
#include "test_util.hpp"

using namespace evfleet;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

ServiceDaySelection monday() {
  ServiceDaySelection sel;
  ServiceDay d;
  d.date = 20240304;
  d.weight = 365;
  sel.days.push_back(d);
  return sel;
}

// 0.05 degrees of latitude on the mean-radius sphere.
const double kLatStepKm = 0.05 * M_PI / 180.0 * 6371.0088;

}  // namespace

TEST_CASE("csv parsing") {
  const auto t = parse_csv("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n2,,3\n", "t.txt");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.header[0] == "a");
  CHECK(t.rows[0][1] == "x, y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.rows[1][1].empty());
  CHECK(t.line[1] == 4);
  CHECK(t.column("c") == 2);
  CHECK(t.column("zz") == -1);
  CHECK(code_of([] { parse_csv("a,b\n1,2,3\n", "t.txt"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_csv("a,b\n\"open,2\n", "t.txt"); }) == ErrorCode::MalformedRow);
}

TEST_CASE("gtfs times") {
  CHECK(parse_gtfs_time("08:10:00") == 29400);
  CHECK(parse_gtfs_time("25:00:30") == 90030);
  CHECK(parse_gtfs_time(" 7:05:00") == 25500);
  CHECK_THROWS_AS(parse_gtfs_time("8h10"), Error);
  CHECK_THROWS_AS(parse_gtfs_time("08:61:00"), Error);
}

TEST_CASE("minimal feed") {
  const RawGtfsFeed f = parse_gtfs(testutil::data("gtfs_min"));
  CHECK(f.trips.size() == 1);
  REQUIRE(f.stop_times.count("T1"));
  CHECK(f.stop_times.at("T1").size() == 2);
  CHECK(f.active_services(20240304).count("WKDY"));
  CHECK(f.active_services(20240309).empty());  // Saturday
  const BlockSet b = extract_blocks(f, monday());
  REQUIRE(b.size() == 1);
  CHECK(b[0].id == "B1");
  CHECK(b[0].start_interval == 9);
  CHECK(b[0].end_interval == 9);
  CHECK(b[0].distance_km == doctest::Approx(kLatStepKm).epsilon(1e-9));
}

TEST_CASE("feed errors") {
  CHECK(code_of([] { parse_gtfs(testutil::data("gtfs_dangling")); }) == ErrorCode::DanglingReference);
  CHECK(code_of([] { parse_gtfs(testutil::data("no_such_feed")); }) == ErrorCode::MissingFile);
  try {
    parse_gtfs(testutil::data("gtfs_dangling"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("stop_times.txt") != std::string::npos);
  }
  const RawGtfsFeed over = parse_gtfs(testutil::data("gtfs_overnight"));
  CHECK(code_of([&] { extract_blocks(over, monday()); }) == ErrorCode::BlockSpansDayBoundary);
  const RawGtfsFeed min = parse_gtfs(testutil::data("gtfs_min"));
  CHECK(code_of([&] { extract_blocks(min, ServiceDaySelection{}); }) == ErrorCode::EmptySelection);
  auto sat = monday();
  sat.days[0].date = 20240309;
  CHECK(code_of([&] { extract_blocks(min, sat); }) == ErrorCode::EmptySelection);
}

TEST_CASE("block extraction") {
  const RawGtfsFeed f = parse_gtfs(testutil::data("gtfs_blocks"));
  const auto rep = extract_blocks_detailed(f, monday());
  REQUIRE(rep.blocks.size() == 2);
  const Block& b1 = rep.blocks[0];
  CHECK(b1.id == "B1");
  CHECK(b1.start_interval == 9);
  CHECK(b1.end_interval == 12);
  CHECK(b1.distance_km == doctest::Approx(2 * kLatStepKm).epsilon(1e-9));

  const Block& b3 = rep.blocks[1];
  CHECK(b3.id == "B3");
  CHECK(b3.start_interval == 14);
  CHECK(b3.end_interval == 15);
  // shape polyline: north 0.05 deg, then east 0.05 deg at 42.05 N
  const double east = haversine_km(42.05, -71.0, 42.05, -70.95);
  CHECK(b3.distance_km == doctest::Approx(kLatStepKm + east).epsilon(1e-9));
  CHECK(b3.distance_km > haversine_km(42.0, -71.0, 42.05, -70.95));

  bool zero = false, orphan = false;
  for (const auto& r : rep.rejected) {
    zero |= r.find("BZ") != std::string::npos;
    orphan |= r.find("T4") != std::string::npos;
  }
  CHECK(zero);
  CHECK(orphan);

  // calendar_dates removes the service on 2024-03-05
  auto tue = monday();
  tue.days[0].date = 20240305;
  CHECK_THROWS_AS(extract_blocks(f, tue), Error);

  auto strict = monday();
  strict.depot_stop_ids = {"DEP"};
  strict.strict_depot = true;
  const BlockSet s = extract_blocks(f, strict);
  REQUIRE(s.size() == 1);  // B3 ends at stop B
  CHECK(s[0].id == "B1");

  auto two = monday();
  ServiceDay wed;
  wed.date = 20240306;
  wed.weight = 100;
  two.days.push_back(wed);
  const BlockSet d2 = extract_blocks(f, two);
  REQUIRE(d2.size() == 4);
  CHECK(d2[0].id == "B1@d1");
  CHECK(d2[2].id == "B1@d2");
  CHECK(d2[2].start_interval == 24 + 9);
  CHECK(two.grid().horizon() == 48);

  // same feed twice, same blocks
  const BlockSet again = extract_blocks(parse_gtfs(testutil::data("gtfs_blocks")), monday());
  REQUIRE(again.size() == rep.blocks.size());
  for (std::size_t k = 0; k < again.size(); ++k) {
    CHECK(again[k].id == rep.blocks[k].id);
    CHECK(again[k].distance_km == rep.blocks[k].distance_km);
  }

  auto service = ServiceDaySelection{};
  ServiceDay by_id;
  by_id.service_ids = {"WKDY"};
  service.days.push_back(by_id);
  CHECK(extract_blocks(f, service).size() == 2);

  auto half = monday();
  half.intervals_per_day = 48;
  half.delta_t = 0.5;
  const BlockSet h = extract_blocks(f, half);
  CHECK(h[0].start_interval == 17);  // 08:10 -> floor(16.33) + 1
  CHECK(h[0].end_interval == 23);    // 11:20 -> ceil(22.67)
}

TEST_CASE("subsample") {
  BlockSet bs;
  for (int k = 0; k < 10; ++k) bs.push_back({"b" + std::to_string(9 - k), 10.0, 10 - k, 12 - k});
  const BlockSet all = subsample(bs, 1);
  REQUIRE(all.size() == 10);
  CHECK(all[0].start_interval == 1);
  const BlockSet third = subsample(bs, 3);
  REQUIRE(third.size() == 4);
  CHECK(third[0].start_interval == 1);
  CHECK(third[1].start_interval == 4);
  CHECK(third[2].start_interval == 7);
  CHECK(third[3].start_interval == 10);
  for (int w = 1; w <= 12; ++w) CHECK(subsample(bs, w).size() == static_cast<std::size_t>((10 + w - 1) / w));
  CHECK_THROWS_AS(subsample(bs, 0), Error);

  // ties on start are broken by id
  const BlockSet tie = subsample({{"z", 1.0, 3, 4}, {"a", 1.0, 3, 5}}, 1);
  CHECK(tie[0].id == "a");
}

TEST_CASE("haversine") {
  CHECK(haversine_km(0, 0, 0, 0) == 0.0);
  CHECK(haversine_km(0, 0, 0, 180) == doctest::Approx(M_PI * 6371.0088));
  CHECK(haversine_km(42, -71, 43, -70) == doctest::Approx(haversine_km(43, -70, 42, -71)));
}

TEST_CASE("rng streams are pinned") {
  // The C++ standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng r(5489);
  std::uint64_t v = 0;
  for (int n = 0; n < 10000; ++n) v = r.next();
  CHECK(v == 9981545732273789042ULL);
  Rng a(1), b(1);
  for (int n = 0; n < 100; ++n) {
    const int x = a.uniform_int(2, 6);
    CHECK(x == b.uniform_int(2, 6));
    CHECK(x >= 2);
    CHECK(x <= 6);
    const double d = a.uniform(0.8, 1.2);
    CHECK(d == b.uniform(0.8, 1.2));
    CHECK(d >= 0.8);
    CHECK(d < 1.2);
  }
}

TEST_CASE("synthetic generation") {
  SyntheticConfig sc;
  sc.seed = 42;
  const Instance a = generate_synthetic(sc), b = generate_synthetic(sc);
  CHECK(serialize_instance(a) == serialize_instance(b));
  CHECK(a.K() == 8);
  CHECK(validate_instance(a).passed());
  for (std::size_t k = 1; k < a.K(); ++k) CHECK(a.blocks[k - 1].start_interval <= a.blocks[k].start_interval);
  for (const auto& blk : a.blocks) {
    CHECK(blk.length() >= sc.min_block_intervals);
    CHECK(blk.length() <= sc.max_block_intervals);
  }

  sc.seed = 43;
  CHECK(serialize_instance(generate_synthetic(sc)) != serialize_instance(a));

  sc.blocks = 0;
  const Instance empty = generate_synthetic(sc);
  CHECK(empty.K() == 0);
  CHECK(validate_instance(empty).passed());

  SyntheticConfig bad;
  bad.max_block_intervals = 30;
  CHECK(code_of([&] { generate_synthetic(bad); }) == ErrorCode::ConfigInfeasible);
  bad = {};
  bad.km_per_hour = 80;
  CHECK(code_of([&] { generate_synthetic(bad); }) == ErrorCode::ConfigInfeasible);

  SyntheticConfig multi;
  multi.days = 3;
  multi.vehicle_types = 2;
  multi.charger_types = 3;
  multi.blocks = 12;
  const Instance m = generate_synthetic(multi);
  CHECK(m.T() == 72);
  CHECK(m.time_grid.day_weight.size() == 3);
  double days = 0;
  for (double w : m.time_grid.day_weight) days += w;
  CHECK(days == doctest::Approx(365.0));
  CHECK(validate_instance(m).passed());
}

TEST_CASE("synthetic config file") {
  SyntheticConfig sc;
  sc.blocks = 5;
  sc.km_per_hour = 17.5;
  sc.variant = Variant::ExactEnergy;
  sc.seed = 99;
  const std::string text = serialize_synthetic_config(sc);
  const SyntheticConfig back = parse_synthetic_config(text);
  CHECK(serialize_synthetic_config(back) == text);
  CHECK(serialize_instance(generate_synthetic(back)) == serialize_instance(generate_synthetic(sc)));
  CHECK_THROWS_AS(parse_synthetic_config("{\"schema\": \"x\"}"), Error);
  const SyntheticConfig w = read_synthetic_config(testutil::data("witness_config.json"));
  CHECK(w.blocks == 4);
  CHECK(w.seed == 37);
}
