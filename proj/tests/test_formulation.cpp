#include <set>

#include "doctest.h"
#include "evfleet/formulation.hpp"
#include "evfleet/pipeline.hpp"
#include "evfleet/solver.hpp"
#include "evfleet/synthetic.hpp"
#include "evfleet/verify.hpp"
#include "test_util.hpp"

using namespace evfleet;

TEST_CASE("P1 size on a one-block day") {
  // K=1, I=1, J=1, T=24 and two demand groups covering the whole day.
  const Instance inst = testutil::tiny({{"a", 40.0, 8, 11}});
  REQUIRE(inst.L() == 2);
  const MilpModel m = build_p1(inst);
  // b 1, n 24, m 24, N_v 1, N_c 1, p_v 24, soe 24, d 1, p_g 24, p_pk 2
  CHECK(m.num_vars() == 126);
  // eq01 1, eq02 24, eq03 24, eq04 24, eq09 23, eq11 1, eq10 24, eq12 24,
  // variant 2, pbal 24, peak 48
  CHECK(m.num_rows() == 219);
  CHECK(m.count_rows("eq09_soe") == 23);
  CHECK(m.count_rows("eq11_wrap") == 1);
  CHECK(m.count_rows("eq13_lo") + m.count_rows("eq13_hi") == 2);
  CHECK(m.count_rows("eq14_exact") + m.count_rows("eq14_hi") == 0);
  CHECK(m.find("soe[i=1,t=17]") != MilpModel::npos);
  bool named = false;
  for (const auto& r : m.constraints()) named |= r.name == "eq09_soe[i=1,s=1,t=17]";
  CHECK(named);

  const MilpModel e = build_p1(testutil::tiny({{"a", 40.0, 8, 11}}, 1, 1, Variant::ExactEnergy));
  CHECK(e.count_rows("eq14_exact") + e.count_rows("eq14_hi") == 2);
  CHECK(e.count_rows("eq13_lo") + e.count_rows("eq13_hi") == 0);
}

TEST_CASE("built sizes match the closed forms") {
  for (int seed = 1; seed <= 6; ++seed) {
    SyntheticConfig sc;
    sc.blocks = seed;
    sc.days = 1 + seed % 2;
    sc.vehicle_types = 1 + seed % 2;
    sc.charger_types = 1 + seed % 3;
    sc.seed = seed;
    const Instance inst = generate_synthetic(sc);
    const MilpModel p1 = build_p1(inst);
    const MilpModel p2 = build_p2(inst);
    CHECK(ModelCounts{p1.num_vars(), p1.num_rows()} == expected_counts(inst, ProblemId::P1));
    CHECK(ModelCounts{p2.num_vars(), p2.num_rows()} == expected_counts(inst, ProblemId::P2));
    // P2 per type: y K, and K vehicles worth of bb, x, pp, soev, dd
    const std::size_t K = inst.K(), T = inst.T(), J = inst.J(), I = inst.I();
    CHECK(p2.count_vars("y") == I * K);
    CHECK(p2.count_vars("bb") == I * K * K);
    CHECK(p2.count_vars("x") == I * K * J * T);
    CHECK(p2.count_vars("soev") == I * K * T);
    CHECK(p2.count_rows("eq19_chargers") == J * T);
    CHECK(p2.count_rows("sym_y") == I * (K - 1));
  }
}

TEST_CASE("model size guard") {
  SyntheticConfig sc;
  sc.blocks = 20;
  const Instance inst = generate_synthetic(sc);
  BuildOptions opt;
  opt.max_variables = 1000;
  CHECK_THROWS_AS(build_p2(inst, opt), Error);
  try {
    build_p2(inst, opt);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModelTooLarge);
  }
}

TEST_CASE("check_solution flags uncovered blocks and over-full depots") {
  SyntheticConfig sc;
  sc.blocks = 3;
  sc.seed = 2;
  const Instance inst = generate_synthetic(sc);
  const MilpModel p1 = build_p1(inst);

  const auto zeros = check_solution(p1, std::vector<double>(p1.num_vars(), 0.0));
  CHECK(zeros.count("eq01_block") == inst.K());
  CHECK_THROWS_AS(check_solution(p1, std::vector<double>(3, 0.0)), Error);

  const SolveResult r = solve(p1, testutil::exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(check_solution(p1, r.values).feasible());

  // Push the stored energy one interval above R * n while keeping everything else.
  auto v = r.values;
  const double R = inst.vehicles[0].energy_capacity_kwh;
  int t = 1;
  for (; t <= inst.T(); ++t) {
    bool departs = false;
    for (std::size_t k = 0; k < inst.K(); ++k) departs |= inst.schedule.U(k, t) == 1;
    if (!departs) break;
  }
  const std::size_t soe = p1.col("soe", {{'i', 1}, {'t', t}});
  const std::size_t n = p1.col("n", {{'i', 1}, {'t', t}});
  v[soe] = R * v[n] + 1.0;
  const auto bad = check_solution(p1, v);
  CHECK(bad.count("eq12_soecap") == 1);
  CHECK_FALSE(bad.feasible());

  auto frac = r.values;
  frac[p1.col("N_v", {{'i', 1}})] += 0.5;
  bool integrality = false;
  for (const auto& x : check_solution(p1, frac).violations)
    integrality |= x.kind == Violation::Kind::Integrality;
  CHECK(integrality);
}

TEST_CASE("exact-energy solutions are feasible for the surplus model") {
  for (int seed = 1; seed <= 4; ++seed) {
    SyntheticConfig sc;
    sc.blocks = 4;
    sc.seed = seed;
    sc.variant = Variant::ExactEnergy;
    Instance exact_inst = generate_synthetic(sc);
    Instance surplus_inst = exact_inst;
    surplus_inst.variant = Variant::SurplusAllowed;
    const MilpModel pe = build_p1(exact_inst);
    const MilpModel ps = build_p1(surplus_inst);
    const SolveResult r = solve(pe, testutil::exact());
    REQUIRE(r.has_incumbent());
    CHECK(check_solution(ps, to_value_map(pe, r.values)).feasible());
  }
}

TEST_CASE("storage cap counts the departing vehicle") {
  // Literal 0 <= soe <= R * n_i(t) leaves no room for the energy a departing
  // vehicle carries at its departure interval, so one block needs a spare bus.
  const Instance inst = generate_synthetic([] {
    SyntheticConfig sc;
    sc.blocks = 1;
    sc.seed = 3;
    return sc;
  }());
  MilpModel p1 = build_p1(inst);
  const SolveResult r = solve(p1, testutil::exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const auto agg = extract_agg(inst, p1, r.values);
  CHECK(agg.Nv[0] == doctest::Approx(1.0));
  CHECK(agg.Nc[0] == doctest::Approx(1.0));

  // Drop the departure term from every storage row.
  MilpModel literal(p1.metadata());
  for (const auto& v : p1.variables())
    literal.add_var(v.family, v.index, v.kind, v.lower, v.upper, p1.objective()[literal.num_vars()]);
  for (const auto& row : p1.constraints()) {
    LinExpr e;
    const bool cap = row.name.rfind("eq12_soecap", 0) == 0;
    for (const auto& t : row.terms)
      if (!(cap && p1.variables()[t.col].family == "b")) e.add(t.col, t.coef);
    literal.add_row(row.name, {}, e, row.sense, row.rhs);
  }
  const SolveResult lit = solve(literal, testutil::exact());
  REQUIRE(lit.status == SolveStatus::Optimal);
  CHECK(lit.values[literal.col("N_v", {{'i', 1}})] == doctest::Approx(2.0));
  CHECK(lit.objective > r.objective + 1000.0);
}

TEST_CASE("P3 splits by vehicle type and P4 fixes the investments") {
  SyntheticConfig sc;
  sc.blocks = 4;
  sc.vehicle_types = 2;
  sc.charger_types = 2;
  sc.seed = 4;
  const Instance inst = generate_synthetic(sc);
  const MilpModel p1 = build_p1(inst);
  const SolveResult r = solve(p1, testutil::exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const AggSolution agg = extract_agg(inst, p1, r.values);

  const auto p3 = build_p3(inst, agg);
  REQUIRE(p3.size() == inst.I());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < p3.size(); ++i) {
    CHECK(p3[i].metadata().label == "i" + std::to_string(i + 1));
    CHECK(p3[i].count_vars("y") == 0);
    CHECK(p3[i].count_rows("eq19_chargers") == 0);
    for (double c : p3[i].objective()) CHECK(c == 0.0);
    std::vector<int> fleet;
    for (double n : agg.Nv) fleet.push_back(static_cast<int>(std::lround(n)));
    CHECK(ModelCounts{p3[i].num_vars(), p3[i].num_rows()} ==
          expected_counts(inst, ProblemId::P3, fleet, false, i));
    for (const auto& v : p3[i].variables()) {
      if (v.family == "bb" || v.family == "x" || v.family == "pp" || v.family == "soev" ||
          v.family == "dd") {
        CHECK(v.name.find("[i=" + std::to_string(i + 1) + ",") != std::string::npos);
      }
      if (v.family == "b") {
        CHECK(v.lower == v.upper);
      }
      if (v.family == "bb" || v.family == "x" || v.family == "pp" || v.family == "soev" ||
          v.family == "dd") {
        CHECK(seen.insert(v.name).second);
      }
    }
  }

  const MilpModel p4 = build_p4(inst, agg, 1);
  CHECK(p4.count_vars("slack_Nc") == inst.J());
  for (std::size_t i = 0; i < inst.I(); ++i) {
    const auto& nv = p4.variables()[p4.col("N_v", {{'i', static_cast<int>(i + 1)}})];
    CHECK(nv.lower == nv.upper);
    CHECK(nv.lower == doctest::Approx(agg.Nv[i]));
  }
  const auto& sl = p4.variables()[p4.col("slack_Nc", {{'j', 1}})];
  CHECK(sl.upper == 1.0);
  CHECK(build_p4(inst, agg, 0).count_vars("slack_Nc") == 0);
}

TEST_CASE("empty instance builds and solves to zero") {
  const Instance inst = testutil::tiny({});
  const MilpModel p1 = build_p1(inst);
  const SolveResult r = solve(p1, testutil::exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(0.0));
  const MilpModel p2 = build_p2(inst);
  CHECK(p2.count_vars("y") == 0);
  CHECK(solve(p2, testutil::exact()).objective == doctest::Approx(0.0));
}

TEST_CASE("symmetry cuts restrict block slots by chronological rank") {
  SyntheticConfig sc;
  sc.blocks = 4;
  sc.seed = 7;
  const Instance inst = generate_synthetic(sc);
  const MilpModel p2 = build_p2(inst);
  // first block can only sit on vehicle 1
  CHECK(p2.variables()[p2.col("bb", {{'i', 1}, {'k', 1}, {'v', 2}})].upper == 0.0);
  CHECK(p2.variables()[p2.col("bb", {{'i', 1}, {'k', 4}, {'v', 4}})].upper == 1.0);
  BuildOptions off;
  off.symmetry_breaking = false;
  const MilpModel bare = build_p2(inst, off);
  CHECK(bare.count_rows("sym_y") == 0);
  CHECK(bare.variables()[bare.col("bb", {{'i', 1}, {'k', 1}, {'v', 2}})].upper == 1.0);
  CHECK(objectives_match(solve(p2, testutil::exact()).objective,
                         solve(bare, testutil::exact()).objective));
}
