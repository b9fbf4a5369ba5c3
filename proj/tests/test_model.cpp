#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "evfleet/formulation.hpp"
#include "evfleet/model.hpp"
#include "evfleet/model_io.hpp"
#include "evfleet/synthetic.hpp"
#include "test_util.hpp"

using namespace evfleet;

TEST_CASE("variable and row naming") {
  MilpModel m;
  const auto x = m.add_var("x", {{'i', 1}, {'t', 17}}, VarKind::Integer, 0, 5, 2.0);
  CHECK(m.variables()[x].name == "x[i=1,t=17]");
  CHECK(m.find("x[i=1,t=17]") == x);
  CHECK(m.find("x[i=2,t=17]") == MilpModel::npos);
  CHECK(m.col("x", {{'i', 1}, {'t', 17}}) == x);
  CHECK_THROWS_AS(m.add_var("x", {{'i', 1}, {'t', 17}}, VarKind::Binary, 0, 1), Error);

  LinExpr e;
  e.add(x, 1.0).add(x, 2.0);
  const auto r = m.add_row("cap", {{'t', 3}}, e, RowSense::LessEqual, 4.0);
  CHECK(m.constraints()[r].name == "cap[t=3]");
  REQUIRE(m.constraints()[r].terms.size() == 1);
  CHECK(m.constraints()[r].terms[0].coef == 3.0);
  CHECK(m.count_rows("cap") == 1);
  CHECK(m.objective_value({2.0}) == 4.0);
}

TEST_CASE("number printing keeps doubles exact") {
  Rng rng(3);
  for (int n = 0; n < 2000; ++n) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform_int(-12, 6));
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
}

TEST_CASE("MPS emission is deterministic and reparses to the same matrix") {
  SyntheticConfig sc;
  sc.blocks = 5;
  sc.vehicle_types = 2;
  sc.charger_types = 2;
  sc.seed = 9;
  const Instance inst = generate_synthetic(sc);
  for (const auto* which : {"p1", "p2"}) {
    CAPTURE(which);
    const MilpModel a = std::string(which) == "p1" ? build_p1(inst) : build_p2(inst);
    const MilpModel b = std::string(which) == "p1" ? build_p1(inst) : build_p2(inst);
    const std::string text = to_mps(a);
    CHECK(text == to_mps(b));
    CHECK(to_lp(a) == to_lp(b));
    const ParsedMps p = parse_mps(text);
    CHECK(compare_with_model(p, a).empty());
    CHECK(p.col_names.size() == a.num_vars());
    CHECK(p.row_names.size() == a.num_rows());
  }
}

TEST_CASE("reparse notices a changed coefficient") {
  const MilpModel m = build_p1(testutil::tiny({{"a", 40.0, 8, 11}}));
  std::string text = to_mps(m);
  const auto pos = text.find("eq01_block[k=1]  1\n");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("eq01_block[k=1]  1").size(), "eq01_block[k=1]  2");
  CHECK_FALSE(compare_with_model(parse_mps(text), m).empty());
}

TEST_CASE("LP names are sanitized") {
  CHECK(lp_name("x[i=1,t=2]").find('[') == std::string::npos);
  CHECK(lp_name("x[i=1,t=2]") != lp_name("x[i=1,t=3]"));
  const MilpModel m = build_p1(testutil::tiny({{"a", 40.0, 8, 11}}));
  const std::string lp = to_lp(m);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("End") != std::string::npos);
}

TEST_CASE("MPS parse errors") {
  CHECK_THROWS_AS(parse_mps("ROWS\n N obj\nCOLUMNS\n x  nosuchrow  1\nENDATA\n"), Error);
}
