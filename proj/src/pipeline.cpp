#include "evfleet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "evfleet/instance_io.hpp"
#include "evfleet/verify.hpp"

namespace evfleet {

using ojson = nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void fill_stage(StageResult& st, const SolveResult& r) {
  st.ran = true;
  st.status = r.status;
  st.objective = r.has_incumbent() ? r.objective : kNaN;
  st.bound = std::isfinite(r.bound) ? r.bound : kNaN;
  if (st.status == SolveStatus::Optimal && std::isnan(st.bound)) st.bound = st.objective;
  st.solve_s = r.wall_time_s;
}

/// The solver's objective must agree with an independent recomputation.
void recheck_objective(const Instance& inst, const MilpModel& model, const SolveResult& r,
                       const char* stage) {
  if (!r.has_incumbent()) return;
  const double again = eval_objective(inst, to_value_map(model, r.values));
  if (!objectives_match(again, r.objective)) {
    std::ostringstream os;
    os.precision(12);
    os << stage << " objective " << r.objective << " disagrees with recomputed " << again;
    throw Error(ErrorCode::IncumbentRejected, "pipeline.run_cluster_disaggregate", os.str());
  }
}

ojson num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ojson stage_json(const StageResult& st) {
  ojson j;
  j["ran"] = st.ran;
  if (!st.ran) return j;
  j["status"] = std::string(to_string(st.status));
  j["objective"] = num(st.objective);
  j["bound"] = num(st.bound);
  j["proven"] = st.proven();
  j["build_s"] = st.build_s;
  j["solve_s"] = st.solve_s;
  return j;
}

ojson variant_json(const VariantReport& v) {
  ojson j;
  j["variant"] = std::string(to_string(v.variant));
  j["P1"] = stage_json(v.p1);
  if (v.agg) {
    j["N_v"] = v.agg->Nv;
    j["N_c"] = v.agg->Nc;
  }
  ojson p3;
  p3["status"] = std::string(to_string(v.p3));
  ojson by_type = ojson::array();
  for (auto f : v.p3_by_type) by_type.push_back(std::string(to_string(f)));
  p3["by_type"] = by_type;
  p3["build_s"] = v.p3_build_s;
  p3["solve_s"] = v.p3_solve_s;
  j["P3"] = p3;
  j["P4"] = stage_json(v.p4);
  j["P4_slack0"] = stage_json(v.p4_no_slack);
  j["slack_limit_used"] = v.slack_limit_used;
  j["extra_chargers"] = v.extra_chargers;
  j["P2"] = stage_json(v.p2);
  j["gap41"] = num(v.gap41);
  j["gap21"] = num(v.gap21);
  j["gap21_from_p4"] = v.gap21_from_p4;
  j["notes"] = v.notes;
  return j;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Solver time of every P4 attempt, slack retries included.
double p4_time(const VariantReport& v) {
  return v.slack_limit_used > 0 ? v.p4.solve_s + v.p4_no_slack.solve_s : v.p4.solve_s;
}

Instance with_variant(const Instance& inst, Variant v) {
  Instance copy = inst;
  copy.variant = v;
  return copy;
}

}  // namespace

double bound_tolerance(double a, double b) {
  double m = 0.0;
  if (std::isfinite(a)) m = std::max(m, std::fabs(a));
  if (std::isfinite(b)) m = std::max(m, std::fabs(b));
  return std::max(1e-6 * m, 1e-3);
}

double relative_gap(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return kNaN;
  if (std::fabs(b) < 1e-12) return std::fabs(a) < 1e-12 ? 0.0 : kInf;
  return a / b - 1.0;
}

double StageResult::lower() const noexcept {
  if (!ran) return -kInf;
  if (status == SolveStatus::Infeasible) return kInf;
  if (!std::isnan(bound)) return bound;
  return status == SolveStatus::Optimal ? objective : -kInf;
}

double StageResult::upper() const noexcept {
  if (!ran || status == SolveStatus::Infeasible) return kInf;
  return std::isnan(objective) ? kInf : objective;
}

VariantReport run_variant(const Instance& inst, const SolverConfig& cfg,
                          const PipelineOptions& opt) {
  constexpr const char* where = "pipeline.run_cluster_disaggregate";
  VariantReport rep;
  rep.variant = inst.variant;

  Stopwatch b1;
  const MilpModel p1 = build_p1(inst, opt.build);
  rep.p1.build_s = b1.seconds();
  const SolveResult r1 = solve(p1, cfg);
  fill_stage(rep.p1, r1);
  if (r1.status == SolveStatus::Infeasible) {
    throw Error(ErrorCode::P1Infeasible, where,
                "the clustered planning model has no feasible plan; check the range and charging "
                "assumptions of the instance");
  }
  if (!r1.has_incumbent()) {
    throw Error(ErrorCode::InconclusiveDueToTimeLimit, where,
                "planning model returned no incumbent (status " + std::string(to_string(r1.status)) +
                    ")");
  }
  recheck_objective(inst, p1, r1, "P1");
  rep.agg = extract_agg(inst, p1, r1.values);

  Stopwatch b3;
  const auto p3 = build_p3(inst, *rep.agg, opt.build);
  rep.p3_build_s = b3.seconds();
  std::vector<const MilpModel*> p3_ptrs;
  for (const auto& m : p3) p3_ptrs.push_back(&m);
  const auto f3 = solve_feasibility_batch(p3_ptrs, cfg);
  rep.p3 = Feasibility::Feasible;
  for (const auto& f : f3) {
    rep.p3_by_type.push_back(f.status);
    rep.p3_solve_s += f.wall_time_s;
    if (f.status == Feasibility::Infeasible) rep.p3 = Feasibility::Infeasible;
    else if (f.status == Feasibility::Unknown && rep.p3 != Feasibility::Infeasible)
      rep.p3 = Feasibility::Unknown;
  }

  Stopwatch b4;
  const MilpModel p4 = build_p4(inst, *rep.agg, 0, opt.build);
  rep.p4_no_slack.build_s = b4.seconds();
  const SolveResult r4 = solve(p4, cfg);
  fill_stage(rep.p4_no_slack, r4);
  recheck_objective(inst, p4, r4, "P4");
  rep.p4 = rep.p4_no_slack;
  if (r4.status == SolveStatus::Infeasible && opt.slack_limit > 0) {
    Stopwatch bs;
    const MilpModel p4s = build_p4(inst, *rep.agg, opt.slack_limit, opt.build);
    const double build_s = bs.seconds();
    const SolveResult rs = solve(p4s, cfg);
    rep.p4 = StageResult{};
    fill_stage(rep.p4, rs);
    rep.p4.build_s = build_s;
    recheck_objective(inst, p4s, rs, "P4 with slack");
    rep.slack_limit_used = opt.slack_limit;
    if (rs.has_incumbent()) {
      for (std::size_t j = 0; j < inst.J(); ++j)
        rep.extra_chargers += std::round(rs.values[p4s.col("slack_Nc", {{'j', static_cast<int>(j) + 1}})]);
    }
  }
  if (rep.p3 == Feasibility::Feasible && rep.p4_no_slack.infeasible()) {
    rep.notes.push_back("P3 feasible but P4 at slack 0 infeasible: contradicts region containment");
  }

  if (opt.with_p2) {
    Stopwatch b2;
    const MilpModel p2 = build_p2(inst, opt.build);
    rep.p2.build_s = b2.seconds();
    const SolveResult r2 = solve(p2, cfg);
    fill_stage(rep.p2, r2);
    recheck_objective(inst, p2, r2, "P2");
  }

  rep.gap41 = relative_gap(rep.p4.objective, rep.p1.objective);
  if (rep.p2.proven()) {
    rep.gap21 = relative_gap(rep.p2.objective, rep.p1.objective);
  } else {
    rep.gap21 = rep.gap41;
    rep.gap21_from_p4 = true;
  }
  return rep;
}

PipelineReport run_cluster_disaggregate(const Instance& inst, const SolverConfig& cfg,
                                        const PipelineOptions& opt) {
  PipelineReport rep;
  rep.instance_hash = instance_fingerprint(inst);
  rep.K = inst.K();
  rep.I = inst.I();
  rep.J = inst.J();
  rep.T = inst.T();
  rep.variants.push_back(run_variant(inst, cfg, opt));
  return rep;
}

std::string pipeline_csv_header() {
  return "instance,K,omega,I,J,T,variant,J1,J1_bound,J1_status,T_P1,build_P1,P3,T_P3,J4,J4_status,"
         "slack,extra_chargers,T_P4,build_P4,J2,J2_status,T_P2,build_P2,gap41,gap21,gap21_from_p4";
}

std::vector<std::string> PipelineReport::csv_rows() const {
  std::vector<std::string> rows;
  for (const auto& v : variants) {
    std::ostringstream os;
    auto status = [](const StageResult& s) {
      return s.ran ? std::string(to_string(s.status)) : std::string();
    };
    os << instance_hash << ',' << K << ',' << omega << ',' << I << ',' << J << ',' << T << ','
       << to_string(v.variant) << ',' << csv_num(v.p1.objective) << ',' << csv_num(v.p1.bound)
       << ',' << status(v.p1) << ',' << csv_num(v.p1.solve_s) << ',' << csv_num(v.p1.build_s)
       << ',' << to_string(v.p3) << ',' << csv_num(v.p3_solve_s) << ','
       << csv_num(v.p4.objective) << ',' << status(v.p4) << ',' << v.slack_limit_used << ','
       << csv_num(v.extra_chargers) << ',' << csv_num(p4_time(v))
       << ',' << csv_num(v.p4.build_s) << ',' << csv_num(v.p2.objective) << ',' << status(v.p2)
       << ',' << (v.p2.ran ? csv_num(v.p2.solve_s) : "") << ','
       << (v.p2.ran ? csv_num(v.p2.build_s) : "") << ',' << csv_num(v.gap41) << ','
       << csv_num(v.gap21) << ',' << (v.gap21_from_p4 ? 1 : 0);
    rows.push_back(os.str());
  }
  return rows;
}

std::string PipelineReport::to_json() const {
  ojson j;
  j["schema"] = "evfleet.pipeline/1";
  j["instance"] = instance_hash;
  j["K"] = K;
  j["omega"] = omega;
  j["I"] = I;
  j["J"] = J;
  j["T"] = T;
  ojson vs = ojson::array();
  for (const auto& v : variants) vs.push_back(variant_json(v));
  j["variants"] = vs;
  return j.dump(2) + "\n";
}

std::string_view to_string(VerdictStatus v) noexcept {
  switch (v) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

Verdict check_le(std::string claim, const StageResult& a, const StageResult& b) {
  Verdict v;
  v.claim = std::move(claim);
  v.lhs = a.upper();
  v.rhs = b.lower();
  v.tolerance = bound_tolerance(v.lhs, v.rhs);
  v.residual = (std::isinf(v.lhs) && std::isinf(v.rhs) && v.lhs == v.rhs) ? 0.0 : v.lhs - v.rhs;
  if (b.infeasible() || v.lhs <= v.rhs + v.tolerance) {
    v.status = VerdictStatus::Pass;
  } else if (a.lower() > b.upper() + bound_tolerance(a.lower(), b.upper())) {
    v.status = VerdictStatus::Fail;
  } else {
    v.status = VerdictStatus::Inconclusive;
  }
  return v;
}

bool BoundsCheck::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) {
    return v.informational || v.status == VerdictStatus::Pass;
  });
}

bool BoundsCheck::any_fail() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) {
    return !v.informational && v.status == VerdictStatus::Fail;
  });
}

std::string BoundsCheck::to_json() const {
  ojson j;
  j["schema"] = "evfleet.bounds/1";
  j["lower"] = variant_json(lower);
  j["upper"] = variant_json(upper);
  j["P4_lower_common_projection"] = stage_json(p4_lower_common);
  ojson vs = ojson::array();
  for (const auto& v : verdicts) {
    ojson e;
    e["claim"] = v.claim;
    e["status"] = std::string(to_string(v.status));
    e["lhs_upper"] = num(v.lhs);
    e["rhs_lower"] = num(v.rhs);
    e["residual"] = num(v.residual);
    e["tolerance"] = v.tolerance;
    e["informational"] = v.informational;
    vs.push_back(e);
  }
  j["verdicts"] = vs;
  j["all_pass"] = all_pass();
  return j.dump(2) + "\n";
}

BoundsCheck verify_bounds(const Instance& inst, const SolverConfig& cfg, bool with_p2, bool strict,
                          const BuildOptions& build) {
  PipelineOptions opt;
  opt.slack_limit = 0;
  opt.with_p2 = with_p2;
  opt.build = build;
  BoundsCheck bc;
  const Instance lo = with_variant(inst, Variant::SurplusAllowed);
  const Instance up = with_variant(inst, Variant::ExactEnergy);
  bc.lower = run_variant(lo, cfg, opt);
  bc.upper = run_variant(up, cfg, opt);

  for (const VariantReport* v : {&bc.lower, &bc.upper}) {
    const std::string tag = v->variant == Variant::SurplusAllowed ? " (lower)" : " (upper)";
    if (with_p2) {
      bc.verdicts.push_back(check_le("J1 <= J2" + tag, v->p1, v->p2));
      bc.verdicts.push_back(check_le("J2 <= J4" + tag, v->p2, v->p4));
    }
    bc.verdicts.push_back(check_le("J1 <= J4" + tag, v->p1, v->p4));
    if (v->p3 == Feasibility::Feasible) {
      bc.verdicts.push_back(check_le("J4 <= J1 given P3 feasible" + tag, v->p4, v->p1));
      if (with_p2) bc.verdicts.push_back(check_le("J2 <= J1 given P3 feasible" + tag, v->p2, v->p1));
    }
  }
  bc.verdicts.push_back(check_le("J1 lower <= J1 upper", bc.lower.p1, bc.upper.p1));
  if (with_p2) bc.verdicts.push_back(check_le("J2 lower <= J2 upper", bc.lower.p2, bc.upper.p2));

  const MilpModel common = build_p4(lo, *bc.upper.agg, 0, build);
  {
    Stopwatch w;
    const SolveResult r = solve(common, cfg);
    fill_stage(bc.p4_lower_common, r);
    bc.p4_lower_common.build_s = 0.0;
    recheck_objective(lo, common, r, "P4 common projection");
  }
  bc.verdicts.push_back(
      check_le("J4 lower <= J4 upper (common projection)", bc.p4_lower_common, bc.upper.p4));
  Verdict direct = check_le("J4 lower <= J4 upper (own projections)", bc.lower.p4, bc.upper.p4);
  direct.informational = true;
  bc.verdicts.push_back(direct);

  if (strict) {
    for (const auto& v : bc.verdicts) {
      if (!v.informational && v.status == VerdictStatus::Inconclusive) {
        throw Error(ErrorCode::InconclusiveDueToTimeLimit, "pipeline.verify_bounds",
                    v.claim + " cannot be certified from the returned bounds");
      }
    }
  }
  return bc;
}

// ---------------------------------------------------------------- oracle

namespace {

/// Every restricted growth string of length K, i.e. every set partition.
void for_each_partition(std::size_t K, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(K, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int max_used) {
    if (k == K) {
      fn(a);
      return;
    }
    for (int g = 0; g <= max_used + 1; ++g) {
      a[k] = g;
      rec(k + 1, std::max(max_used, g));
    }
  };
  if (K == 0) {
    fn(a);
    return;
  }
  a[0] = 0;
  rec(1, 0);
}

struct OracleCase {
  std::vector<int> group;
  std::vector<std::size_t> type;
  double constant = 0.0;  // maintenance, fixed by the assignment
  MilpModel model;
};

/// Fixed grouping and types: the remaining sizing, charging and energy problem.
MilpModel grouping_model(const Instance& inst, const std::vector<int>& group,
                         const std::vector<std::size_t>& type) {
  const std::size_t G = type.size(), I = inst.I(), J = inst.J(), K = inst.K();
  const int T = inst.T();
  const auto& S = inst.schedule;
  const auto& grid = inst.time_grid;
  const bool exact = inst.variant == Variant::ExactEnergy;
  MilpModel m;

  std::vector<int> used(I, 0);
  for (std::size_t g = 0; g < G; ++g) used[type[g]]++;
  std::vector<std::size_t> Nv(I), Nc(J), pg(T), ppk(inst.L()), dd(K);
  for (std::size_t i = 0; i < I; ++i)
    Nv[i] = m.add_var("Nv", {{'i', int(i)}}, VarKind::Integer, used[i], kInf,
                      inst.vehicles[i].capital_cost);
  for (std::size_t j = 0; j < J; ++j)
    Nc[j] = m.add_var("Nc", {{'j', int(j)}}, VarKind::Integer, 0, kInf,
                      inst.chargers[j].capital_cost);
  for (int t = 1; t <= T; ++t)
    pg[t - 1] = m.add_var("pg", {{'t', t}}, VarKind::Continuous, 0, inst.tariff.grid_cap_kw,
                          inst.tariff.energy_price[t - 1] * grid.delta_t *
                              grid.day_weight[grid.day_of(t)]);
  for (std::size_t l = 0; l < inst.L(); ++l)
    ppk[l] = m.add_var("ppk", {{'l', int(l)}}, VarKind::Continuous, 0, kInf,
                       inst.tariff.demand_groups[l].rate);
  for (std::size_t k = 0; k < K; ++k)
    dd[k] = m.add_var("dd", {{'k', int(k)}}, VarKind::Continuous, 0,
                      inst.vehicles[type[group[k]]].energy_capacity_kwh);

  std::vector<std::vector<std::vector<std::size_t>>> x(G), pp(G);
  std::vector<std::vector<std::size_t>> soev(G);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& veh = inst.vehicles[type[g]];
    x[g].assign(J, std::vector<std::size_t>(T));
    pp[g].assign(J, std::vector<std::size_t>(T));
    for (std::size_t j = 0; j < J; ++j)
      for (int t = 1; t <= T; ++t) {
        x[g][j][t - 1] = m.add_var("x", {{'g', int(g)}, {'j', int(j)}, {'t', t}}, VarKind::Continuous, 0, 1);
        pp[g][j][t - 1] = m.add_var("pp", {{'g', int(g)}, {'j', int(j)}, {'t', t}}, VarKind::Continuous, 0, kInf);
      }
    for (int t = 1; t <= T; ++t)
      soev[g].push_back(m.add_var("soev", {{'g', int(g)}, {'t', t}}, VarKind::Continuous, 0,
                                  veh.energy_capacity_kwh));
  }

  auto members = [&](std::size_t g) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < K; ++k)
      if (static_cast<std::size_t>(group[k]) == g) out.push_back(k);
    return out;
  };

  for (std::size_t g = 0; g < G; ++g) {
    const auto ks = members(g);
    const std::size_t i = type[g];
    const double eta = inst.vehicles[i].drive_efficiency_kwh_per_km;
    for (int t = 1; t <= T; ++t) {
      int busy = 0;
      for (auto k : ks) busy += S.A(k, t);
      LinExpr plug;
      for (std::size_t j = 0; j < J; ++j) plug.add(x[g][j][t - 1], 1.0);
      m.add_row("plug", {{'g', int(g)}, {'t', t}}, plug, RowSense::LessEqual, 1.0 - busy);
      for (std::size_t j = 0; j < J; ++j) {
        LinExpr e;
        e.add(pp[g][j][t - 1], 1.0).add(x[g][j][t - 1], -inst.pairing(i, j));
        m.add_row("rate", {{'g', int(g)}, {'j', int(j)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
      LinExpr soe;
      soe.add(soev[g][grid.next_in_day(t) - 1], 1.0).add(soev[g][t - 1], -1.0);
      for (std::size_t j = 0; j < J; ++j) soe.add(pp[g][j][t - 1], -grid.delta_t);
      double rhs = 0.0;
      for (auto k : ks) {
        if (S.U(k, t)) soe.add(dd[k], 1.0);
        if (S.V(k, t)) {
          soe.add(dd[k], -1.0);
          rhs -= inst.blocks[k].distance_km * eta;
        }
      }
      m.add_row("soe", {{'g', int(g)}, {'t', t}}, soe, RowSense::Equal, rhs);
    }
    for (auto k : ks) {
      LinExpr e;
      e.add(dd[k], 1.0);
      m.add_row("need", {{'k', int(k)}}, e, exact ? RowSense::Equal : RowSense::GreaterEqual,
                inst.block_energy(k, i));
    }
  }
  for (std::size_t j = 0; j < J; ++j)
    for (int t = 1; t <= T; ++t) {
      LinExpr e;
      for (std::size_t g = 0; g < G; ++g) e.add(x[g][j][t - 1], 1.0);
      e.add(Nc[j], -1.0);
      m.add_row("chargers", {{'j', int(j)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
    }
  for (int t = 1; t <= T; ++t) {
    LinExpr e;
    e.add(pg[t - 1], 1.0);
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t j = 0; j < J; ++j) e.add(pp[g][j][t - 1], -1.0);
    m.add_row("grid", {{'t', t}}, e, RowSense::Equal, 0.0);
  }
  for (std::size_t l = 0; l < inst.L(); ++l)
    for (int t : inst.tariff.demand_groups[l].intervals) {
      LinExpr e;
      e.add(ppk[l], 1.0).add(pg[t - 1], -1.0);
      m.add_row("peak", {{'l', int(l)}, {'t', t}}, e, RowSense::GreaterEqual, 0.0);
    }
  // Pooled energy of a type never exceeds the batteries at the depot at the
  // start of t (parked plus departing vehicles, idle purchases included).
  for (std::size_t i = 0; i < I; ++i) {
    const double R = inst.vehicles[i].energy_capacity_kwh;
    for (int t = 1; t <= T; ++t) {
      LinExpr e;
      int away = 0;
      for (std::size_t g = 0; g < G; ++g) {
        if (type[g] != i) continue;
        e.add(soev[g][t - 1], 1.0);
        for (auto k : members(g)) away += S.A(k, t) - S.U(k, t);
      }
      e.add(Nv[i], -R);
      m.add_row("pool", {{'i', int(i)}, {'t', t}}, e, RowSense::LessEqual, -R * away);
    }
  }
  return m;
}

}  // namespace

OracleResult brute_force_oracle(const Instance& inst, const SolverConfig& cfg) {
  if (inst.K() > 6 || inst.I() > 2 || inst.J() > 2) {
    throw Error(ErrorCode::GuardExceeded, "pipeline.brute_force_oracle",
                "enumeration is limited to K <= 6, I <= 2, J <= 2");
  }
  OracleResult res;
  if (inst.K() == 0) {
    res.objective = 0.0;
    res.groupings = 1;
    return res;
  }
  const std::size_t K = inst.K(), I = inst.I();
  std::vector<OracleCase> cases;
  for_each_partition(K, [&](const std::vector<int>& group) {
    const std::size_t G = static_cast<std::size_t>(*std::max_element(group.begin(), group.end())) + 1;
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = a + 1; b < K; ++b)
        if (group[a] == group[b] && !block_compatibility(inst.blocks[a], inst.blocks[b])) return;
    std::size_t labelings = 1;
    for (std::size_t g = 0; g < G; ++g) labelings *= I;
    for (std::size_t code = 0; code < labelings; ++code) {
      std::vector<std::size_t> type(G);
      std::size_t c = code;
      for (std::size_t g = 0; g < G; ++g) {
        type[g] = c % I;
        c /= I;
      }
      bool fits = true;
      double constant = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t i = type[group[k]];
        fits = fits && inst.block_energy(k, i) <= inst.vehicles[i].energy_capacity_kwh;
        constant += inst.blocks[k].distance_km * inst.vehicles[i].maintenance_cost_per_km;
      }
      if (!fits) continue;
      cases.push_back({group, type, constant, grouping_model(inst, group, type)});
    }
  });
  std::vector<const MilpModel*> ptrs;
  for (const auto& c : cases) ptrs.push_back(&c.model);
  const auto results = solve_batch(ptrs, cfg);
  res.groupings = cases.size();
  for (std::size_t n = 0; n < cases.size(); ++n) {
    const auto& r = results[n];
    if (r.status == SolveStatus::Infeasible) continue;
    if (r.status != SolveStatus::Optimal) {
      throw Error(ErrorCode::InconclusiveDueToTimeLimit, "pipeline.brute_force_oracle",
                  "a grouping subproblem was not solved to optimality");
    }
    const double total = r.objective + cases[n].constant;
    if (total < res.objective) {
      res.objective = total;
      res.best_group = cases[n].group;
      res.best_type = cases[n].type;
    }
  }
  return res;
}

}  // namespace evfleet
