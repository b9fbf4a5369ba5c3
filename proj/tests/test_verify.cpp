#include "doctest.h"
#include "evfleet/formulation.hpp"
#include "evfleet/verify.hpp"
#include "test_util.hpp"

using namespace evfleet;

TEST_CASE("eval_objective against a hand sum") {
  // Two blocks, one bus type, one charger type, flat 0.132 $/kWh, 365 days.
  const Instance inst = testutil::tiny({{"a", 30.0, 5, 8}, {"b", 50.0, 12, 15}});
  const MilpModel p1 = build_p1(inst);
  ValueMap v;
  for (const auto& x : p1.variables()) v[x.name] = 0.0;
  v["N_v[i=1]"] = 2;
  v["N_c[j=1]"] = 1;
  v["b[k=1,i=1]"] = 1;
  v["b[k=2,i=1]"] = 1;
  v["p_g[t=3]"] = 40;
  v["p_g[t=4]"] = 25;
  v["p_pk[l=1]"] = 40;
  v["p_pk[l=2]"] = 40;

  const double bus = 800000.0 / 12, plug = (37000.0 + 22626.0) / 28;
  const double demand = 4 * 24.09 * 40 + 8 * 17.92 * 40;
  const double energy = (40 + 25) * 1.0 * 0.132 * 365;
  const double maint = (30 + 50) * 0.64;
  const double hand = 2 * bus + plug + demand + energy + maint;
  CHECK(eval_objective(inst, v) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(p1.objective_value([&] {
          std::vector<double> x(p1.num_vars());
          for (std::size_t c = 0; c < x.size(); ++c) x[c] = v[p1.variables()[c].name];
          return x;
        }()) == doctest::Approx(hand).epsilon(1e-12));

  ValueMap zero;
  for (const auto& x : p1.variables()) zero[x.name] = 0.0;
  CHECK(eval_objective(inst, zero) == 0.0);

  v.erase("N_v[i=1]");
  CHECK_THROWS_AS(eval_objective(inst, v), Error);
  CHECK_THROWS_AS(check_solution(p1, v), Error);
}

TEST_CASE("objectives_match tolerance policy") {
  CHECK(objectives_match(100000.0, 100000.05));
  CHECK_FALSE(objectives_match(100000.0, 100000.2));
  CHECK(objectives_match(0.0, 5e-5));
  CHECK_FALSE(objectives_match(0.0, 2e-4));
}

TEST_CASE("bound violations are reported") {
  MilpModel m;
  LinExpr e;
  const auto x = m.add_var("x", {}, VarKind::Continuous, 0, 1);
  e.add(x, 1.0);
  m.add_row("r", {}, e, RowSense::GreaterEqual, 0.5);
  CHECK(check_solution(m, std::vector<double>{0.7}).feasible());
  const auto rep = check_solution(m, std::vector<double>{1.5});
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].kind == Violation::Kind::Bound);
  CHECK(rep.violations[0].amount == doctest::Approx(0.5));
  CHECK(check_solution(m, std::vector<double>{0.4}).count("r") == 1);
  CHECK(check_solution(m, std::vector<double>{0.5 - 5e-7}).feasible());
  CHECK_FALSE(rep.summary().empty());
}
