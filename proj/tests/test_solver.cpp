#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "evfleet/formulation.hpp"
#include "evfleet/solver.hpp"
#include "evfleet/synthetic.hpp"
#include "evfleet/verify.hpp"
#include "test_util.hpp"

using namespace evfleet;
namespace fs = std::filesystem;

namespace {

MilpModel at_least_three() {
  MilpModel m;
  const auto x = m.add_var("x", {}, VarKind::Integer, 0, kInf, 1.0);
  LinExpr e;
  e.add(x, 1.0);
  m.add_row("lo", {}, e, RowSense::GreaterEqual, 3.0);
  return m;
}

MilpModel contradiction() {
  MilpModel m;
  const auto x = m.add_var("x", {}, VarKind::Continuous, -kInf, kInf, 1.0);
  LinExpr e;
  e.add(x, 1.0);
  m.add_row("lo", {}, e, RowSense::GreaterEqual, 1.0);
  m.add_row("hi", {}, e, RowSense::LessEqual, 0.0);
  return m;
}

fs::path fake_highs_dir() {
  const fs::path dir = fs::temp_directory_path() / "evfleet-fake-highs";
  fs::create_directories(dir);
  const fs::path exe = dir / "highs";
  std::ofstream f(exe);
  f << "#!/bin/sh\nexec \"" << EVFLEET_TEST_PYTHON << "\" \"" << EVFLEET_TEST_SOURCE
    << "/fake_highs.py\" \"$@\"\n";
  f.close();
  fs::permissions(exe, fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec);
  return dir;
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.time_limit_s = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.mip_rel_gap = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.solver = "cplex";
  CHECK_THROWS_AS(resolve_backend(c), Error);
}

TEST_CASE("trivial integer model") {
  for (const std::string engine : {"highspy", "scipy"}) {
    CAPTURE(engine);
    SolverConfig c;
    c.solver = engine;
    const SolveResult r = solve(at_least_three(), c);
    REQUIRE(r.status == SolveStatus::Optimal);
    REQUIRE(r.values.size() == 1);
    CHECK(r.values[0] == doctest::Approx(3.0));
    CHECK(r.objective == doctest::Approx(3.0));
    CHECK(r.engine.find(engine) != std::string::npos);
  }
}

TEST_CASE("infeasible model") {
  const SolveResult r = solve(contradiction(), {});
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.has_incumbent());
  CHECK(solve_feasibility(contradiction(), {}).status == Feasibility::Infeasible);
}

TEST_CASE("zero-constraint model is feasible") {
  MilpModel m;
  const auto f = solve_feasibility(m, {});
  CHECK(f.status == Feasibility::Feasible);
  CHECK(f.values.empty());

  MilpModel free_box;
  free_box.add_var("x", {}, VarKind::Integer, 2, 5, 1.0);
  const SolveResult r = solve(free_box, {});
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.values[0] == doctest::Approx(2.0));
}

TEST_CASE("feasibility ignores the objective") {
  MilpModel m;
  m.add_var("x", {}, VarKind::Continuous, -kInf, kInf, -1.0);  // unbounded when minimized
  CHECK(solve_feasibility(m, {}).status == Feasibility::Feasible);
}

TEST_CASE("batch keeps input order and the working directory on request") {
  const MilpModel a = at_least_three(), b = contradiction();
  SolverConfig c;
  c.work_dir = fs::temp_directory_path() / "evfleet-batch-test";
  fs::remove_all(c.work_dir);
  const auto rs = solve_batch({&a, &b, &a}, c);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].status == SolveStatus::Optimal);
  CHECK(rs[1].status == SolveStatus::Infeasible);
  CHECK(rs[2].objective == doctest::Approx(3.0));
  CHECK(fs::exists(c.work_dir));
  CHECK(fs::exists(rs[0].log_path));
  fs::remove_all(c.work_dir);
}

TEST_CASE("repeat solves with a fixed seed agree") {
  SyntheticConfig sc;
  sc.blocks = 5;
  sc.seed = 8;
  const MilpModel p2 = build_p2(generate_synthetic(sc));
  SolverConfig c;
  c.seed = 17;
  const SolveResult a = solve(p2, c), b = solve(p2, c);
  REQUIRE(a.has_incumbent());
  CHECK(a.objective == b.objective);
  CHECK(check_solution(p2, a.values).feasible());
}

TEST_CASE("missing solver programs") {
  SolverConfig c;
  c.solver = "highs";
  testutil::ScopedEnv env("EVFLEET_HIGHS", "/nonexistent/highs");
  try {
    solve(at_least_three(), c);
    FAIL("expected SolverNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverNotFound);
    CHECK(is_environment_error(e.code()));
  }
  testutil::ScopedEnv py("EVFLEET_PYTHON", "/nonexistent/python");
  c.solver = "highspy";
  CHECK_THROWS_AS(solve(at_least_three(), c), Error);
}

TEST_CASE("shim solution parsing") {
  const MilpModel m = at_least_three();
  const std::string ok =
      "engine highspy 1.7\nstatus Optimal\nobjective 3\nbound 3\ngap 0\nwall_time 0.01\n"
      "values 1\nx 3\n";
  const SolveResult r = parse_shim_solution(ok, m);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.values == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_shim_solution("engine x\nstatus Optimal\nvalues 1\ny 3\n", m), Error);
  CHECK_THROWS_AS(parse_shim_solution("engine x\nstatus Weird\n", m), Error);
  CHECK(parse_shim_solution("engine x\nstatus Infeasible\n", m).status == SolveStatus::Infeasible);
}

TEST_CASE("HiGHS raw solution parsing") {
  const MilpModel m = at_least_three();
  const std::string text =
      "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 3\n# Columns 1\n"
      "x 3\n# Rows 1\nlo 3\n\n# Dual solution values\nNone\n";
  const SolveResult r = parse_highs_solution(text, m);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.values == std::vector<double>{3.0});
  CHECK(r.objective == 3.0);
  const SolveResult inf = parse_highs_solution("Model status\nInfeasible\n\n# Primal solution values\nNone\n", m);
  CHECK(inf.status == SolveStatus::Infeasible);
  CHECK_THROWS_AS(parse_highs_solution("garbage", m), Error);
}

TEST_CASE("highs command line backend through a stand-in binary") {
  const fs::path dir = fake_highs_dir();
  testutil::ScopedEnv env("EVFLEET_HIGHS", (dir / "highs").string());
  SolverConfig c;
  c.solver = "highs";
  const SolveResult r = solve(at_least_three(), c);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.values[0] == doctest::Approx(3.0));
  CHECK(r.bound == doctest::Approx(3.0));
  CHECK(solve(contradiction(), c).status == SolveStatus::Infeasible);

  SyntheticConfig sc;
  sc.blocks = 3;
  sc.seed = 2;
  const MilpModel p1 = build_p1(generate_synthetic(sc));
  SolverConfig shim;
  shim.mip_rel_gap = 1e-9;
  c.mip_rel_gap = 1e-9;
  CHECK(objectives_match(solve(p1, c).objective, solve(p1, shim).objective));
}
