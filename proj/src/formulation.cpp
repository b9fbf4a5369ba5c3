#include "evfleet/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "evfleet/instance_io.hpp"

namespace evfleet {

namespace {

using Cols = std::vector<std::size_t>;
using Cols2 = std::vector<Cols>;
using Cols3 = std::vector<Cols2>;

int one(std::size_t x) { return static_cast<int>(x) + 1; }

double clean(double v) { return std::fabs(v) < 1e-9 ? 0.0 : v; }

/// Block ranks (1-based) in chronological order, restricted to `members`.
std::vector<int> chronological_rank(const Instance& inst, const std::vector<bool>& members) {
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < inst.K(); ++k)
    if (members[k]) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inst.blocks[a].start_interval < inst.blocks[b].start_interval;
  });
  std::vector<int> rank(inst.K(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r) + 1;
  return rank;
}

struct FleetCols {
  Cols2 b, d;               // [k][i]
  Cols2 n, p_v, soe;        // [i][t-1]
  Cols3 m;                  // [i][j][t-1]
  Cols Nv, Nc, p_g, p_pk;
  Cols slack;               // [j], empty without slack
};

struct VehicleCols {
  int count = 0;
  Cols y;          // [v], empty when the fleet size is fixed
  Cols2 bb, dd;    // [k][v]
  Cols3 x, pp;     // [v][j][t-1]
  Cols2 soev;      // [v][t-1]
};

class Builder {
 public:
  Builder(const Instance& inst, MilpModel& model) : inst_(inst), m_(model) {}

  /// All P1 families. With `proj`, N_v, N_c and b are fixed to its values.
  FleetCols add_fleet_vars(const AggSolution* proj, int slack_limit) {
    FleetCols f;
    const std::size_t K = inst_.K(), I = inst_.I(), J = inst_.J();
    const int T = inst_.T();
    f.b.assign(K, Cols(I));
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < I; ++i) {
        f.b[k][i] = m_.add_var("b", {{'k', one(k)}, {'i', one(i)}}, VarKind::Binary, 0, 1);
        if (proj) fix(f.b[k][i], proj->b[k][i]);
      }
    f.n.assign(I, Cols(T));
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t)
        f.n[i][t - 1] = m_.add_var("n", {{'i', one(i)}, {'t', t}}, VarKind::Integer, 0, kInf);
    f.m.assign(I, Cols2(J, Cols(T)));
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        for (int t = 1; t <= T; ++t)
          f.m[i][j][t - 1] = m_.add_var("m", {{'i', one(i)}, {'j', one(j)}, {'t', t}},
                                        VarKind::Continuous, 0, kInf);
    for (std::size_t i = 0; i < I; ++i) {
      f.Nv.push_back(m_.add_var("N_v", {{'i', one(i)}}, VarKind::Integer, 0, kInf));
      if (proj) fix(f.Nv[i], proj->Nv[i]);
    }
    for (std::size_t j = 0; j < J; ++j) {
      f.Nc.push_back(m_.add_var("N_c", {{'j', one(j)}}, VarKind::Integer, 0, kInf));
      if (proj) fix(f.Nc[j], proj->Nc[j]);
    }
    f.p_v.assign(I, Cols(T));
    f.soe.assign(I, Cols(T));
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t)
        f.p_v[i][t - 1] =
            m_.add_var("p_v", {{'i', one(i)}, {'t', t}}, VarKind::Continuous, 0, kInf);
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t)
        f.soe[i][t - 1] =
            m_.add_var("soe", {{'i', one(i)}, {'t', t}}, VarKind::Continuous, 0, kInf);
    f.d.assign(K, Cols(I));
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < I; ++i)
        f.d[k][i] = m_.add_var("d", {{'k', one(k)}, {'i', one(i)}}, VarKind::Continuous, 0, kInf);
    for (int t = 1; t <= T; ++t)
      f.p_g.push_back(
          m_.add_var("p_g", {{'t', t}}, VarKind::Continuous, 0, inst_.tariff.grid_cap_kw));
    for (std::size_t l = 0; l < inst_.L(); ++l)
      f.p_pk.push_back(m_.add_var("p_pk", {{'l', one(l)}}, VarKind::Continuous, 0, kInf));
    if (slack_limit > 0) {
      for (std::size_t j = 0; j < J; ++j)
        f.slack.push_back(m_.add_var("slack_Nc", {{'j', one(j)}}, VarKind::Integer, 0,
                                     static_cast<double>(slack_limit)));
    }
    return f;
  }

  /// Block cover, depot counts, chargers and energy rows for every vehicle type.
  void add_fleet_rows(const FleetCols& f) {
    const std::size_t K = inst_.K(), I = inst_.I(), J = inst_.J();
    const int T = inst_.T();
    const auto& S = inst_.schedule;
    const auto& g = inst_.time_grid;

    for (std::size_t k = 0; k < K; ++k) {
      LinExpr e;
      for (std::size_t i = 0; i < I; ++i) e.add(f.b[k][i], 1.0);
      m_.add_row("eq01_block", {{'k', one(k)}}, e, RowSense::Equal, 1.0);
    }
    // n_i(t) = N_v_i - sum_k A_k(t) b_ki
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        e.add(f.n[i][t - 1], 1.0).add(f.Nv[i], -1.0);
        for (std::size_t k = 0; k < K; ++k)
          if (S.A(k, t)) e.add(f.b[k][i], 1.0);
        m_.add_row("eq02_depot", {{'i', one(i)}, {'t', t}}, e, RowSense::Equal, 0.0);
      }
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        for (std::size_t j = 0; j < J; ++j) e.add(f.m[i][j][t - 1], 1.0);
        e.add(f.n[i][t - 1], -1.0);
        m_.add_row("eq03_vdepot", {{'i', one(i)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
    for (std::size_t j = 0; j < J; ++j)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        for (std::size_t i = 0; i < I; ++i) e.add(f.m[i][j][t - 1], 1.0);
        e.add(f.Nc[j], -1.0);
        if (!f.slack.empty()) e.add(f.slack[j], -1.0);
        m_.add_row("eq04_charger", {{'j', one(j)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
    // SOE recursion; the last interval of each day wraps to the first.
    for (std::size_t i = 0; i < I; ++i) {
      const double eta = inst_.vehicles[i].drive_efficiency_kwh_per_km;
      for (int t = 1; t <= T; ++t) {
        const int s = g.day_of(t);
        const int next = g.next_in_day(t);
        LinExpr e;
        e.add(f.soe[i][next - 1], 1.0).add(f.soe[i][t - 1], -1.0).add(f.p_v[i][t - 1], -g.delta_t);
        for (std::size_t k = 0; k < K; ++k) {
          if (S.U(k, t)) e.add(f.d[k][i], 1.0);
          if (S.V(k, t)) {
            e.add(f.d[k][i], -1.0);
            e.add(f.b[k][i], inst_.blocks[k].distance_km * eta);
          }
        }
        if (t == g.tau_hi(s)) {
          m_.add_row("eq11_wrap", {{'i', one(i)}, {'s', s + 1}}, e, RowSense::Equal, 0.0);
        } else {
          m_.add_row("eq09_soe", {{'i', one(i)}, {'s', s + 1}, {'t', t}}, e, RowSense::Equal, 0.0);
        }
      }
    }
    for (std::size_t i = 0; i < I; ++i)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        e.add(f.p_v[i][t - 1], 1.0);
        for (std::size_t j = 0; j < J; ++j) e.add(f.m[i][j][t - 1], -inst_.pairing(i, j));
        m_.add_row("eq10_power", {{'i', one(i)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
    // Depot energy is capped by the vehicles parked at the start of t, which
    // includes those departing during t.
    for (std::size_t i = 0; i < I; ++i) {
      const double R = inst_.vehicles[i].energy_capacity_kwh;
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        e.add(f.soe[i][t - 1], 1.0).add(f.n[i][t - 1], -R);
        for (std::size_t k = 0; k < K; ++k)
          if (S.U(k, t)) e.add(f.b[k][i], -R);
        m_.add_row("eq12_soecap", {{'i', one(i)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
    }
    const bool exact = inst_.variant == Variant::ExactEnergy;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < I; ++i) {
        const IndexTuple idx{{'k', one(k)}, {'i', one(i)}};
        LinExpr lo;
        lo.add(f.d[k][i], 1.0).add(f.b[k][i], -inst_.block_energy(k, i));
        m_.add_row(exact ? "eq14_exact" : "eq13_lo", idx, lo,
                   exact ? RowSense::Equal : RowSense::GreaterEqual, 0.0);
        LinExpr hi;
        hi.add(f.d[k][i], 1.0).add(f.b[k][i], -inst_.vehicles[i].energy_capacity_kwh);
        m_.add_row(exact ? "eq14_hi" : "eq13_hi", idx, hi, RowSense::LessEqual, 0.0);
      }
  }

  /// Grid balance against fleet charging, and peak tracking per demand group.
  void add_energy_rows(const FleetCols& f) {
    for (int t = 1; t <= inst_.T(); ++t) {
      LinExpr e;
      e.add(f.p_g[t - 1], 1.0);
      for (std::size_t i = 0; i < inst_.I(); ++i) e.add(f.p_v[i][t - 1], -1.0);
      m_.add_row("pbal", {{'t', t}}, e, RowSense::Equal, 0.0);
    }
    for (std::size_t l = 0; l < inst_.L(); ++l)
      for (int t : inst_.tariff.demand_groups[l].intervals) {
        LinExpr e;
        e.add(f.p_pk[l], 1.0).add(f.p_g[t - 1], -1.0);
        m_.add_row("peak", {{'l', one(l)}, {'t', t}}, e, RowSense::GreaterEqual, 0.0);
      }
  }

  void add_objective(const FleetCols& f) {
    for (std::size_t i = 0; i < inst_.I(); ++i)
      m_.add_objective(f.Nv[i], inst_.vehicles[i].capital_cost);
    for (std::size_t j = 0; j < inst_.J(); ++j) {
      m_.add_objective(f.Nc[j], inst_.chargers[j].capital_cost);
      if (!f.slack.empty()) m_.add_objective(f.slack[j], inst_.chargers[j].capital_cost);
    }
    for (std::size_t l = 0; l < inst_.L(); ++l)
      m_.add_objective(f.p_pk[l], inst_.tariff.demand_groups[l].rate);
    const auto& g = inst_.time_grid;
    for (int t = 1; t <= inst_.T(); ++t) {
      m_.add_objective(f.p_g[t - 1],
                       inst_.tariff.energy_price[t - 1] * g.delta_t * g.day_weight[g.day_of(t)]);
    }
    for (std::size_t k = 0; k < inst_.K(); ++k)
      for (std::size_t i = 0; i < inst_.I(); ++i)
        m_.add_objective(f.b[k][i],
                         inst_.blocks[k].distance_km * inst_.vehicles[i].maintenance_cost_per_km);
  }

  /// Per-vehicle variables and rows; charger sharing is added separately.
  /// `rank` bounds the vehicle label a block may use; blocks with rank 0 are
  /// barred from type i altogether.
  VehicleCols add_vehicles(std::size_t i, int count, bool with_purchase,
                           const std::vector<int>& rank, bool symmetry) {
    VehicleCols vc;
    vc.count = count;
    const std::size_t K = inst_.K(), J = inst_.J();
    const int T = inst_.T();
    const auto& S = inst_.schedule;
    const auto& g = inst_.time_grid;
    const double R = inst_.vehicles[i].energy_capacity_kwh;
    const double eta = inst_.vehicles[i].drive_efficiency_kwh_per_km;
    const int I1 = one(i);

    if (with_purchase) {
      for (int v = 1; v <= count; ++v)
        vc.y.push_back(m_.add_var("y", {{'i', I1}, {'v', v}}, VarKind::Binary, 0, 1));
    }
    vc.bb.assign(K, Cols(count));
    for (std::size_t k = 0; k < K; ++k)
      for (int v = 1; v <= count; ++v) {
        const bool allowed = rank[k] > 0 && (!symmetry || v <= rank[k]);
        vc.bb[k][v - 1] = m_.add_var("bb", {{'i', I1}, {'k', one(k)}, {'v', v}}, VarKind::Binary,
                                     0, allowed ? 1.0 : 0.0);
      }
    vc.x.assign(count, Cols2(J, Cols(T)));
    vc.pp.assign(count, Cols2(J, Cols(T)));
    for (int v = 1; v <= count; ++v)
      for (std::size_t j = 0; j < J; ++j)
        for (int t = 1; t <= T; ++t)
          vc.x[v - 1][j][t - 1] = m_.add_var("x", {{'i', I1}, {'v', v}, {'j', one(j)}, {'t', t}},
                                             VarKind::Continuous, 0, kInf);
    for (int v = 1; v <= count; ++v)
      for (std::size_t j = 0; j < J; ++j)
        for (int t = 1; t <= T; ++t)
          vc.pp[v - 1][j][t - 1] = m_.add_var(
              "pp", {{'i', I1}, {'v', v}, {'j', one(j)}, {'t', t}}, VarKind::Continuous, 0, kInf);
    vc.soev.assign(count, Cols(T));
    for (int v = 1; v <= count; ++v)
      for (int t = 1; t <= T; ++t)
        vc.soev[v - 1][t - 1] =
            m_.add_var("soev", {{'i', I1}, {'v', v}, {'t', t}}, VarKind::Continuous, 0, R);
    vc.dd.assign(K, Cols(count));
    for (std::size_t k = 0; k < K; ++k)
      for (int v = 1; v <= count; ++v)
        vc.dd[k][v - 1] = m_.add_var("dd", {{'i', I1}, {'k', one(k)}, {'v', v}},
                                     VarKind::Continuous, 0, kInf);

    if (with_purchase) {
      for (std::size_t k = 0; k < K; ++k)
        for (int v = 1; v <= count; ++v) {
          LinExpr e;
          e.add(vc.bb[k][v - 1], 1.0).add(vc.y[v - 1], -1.0);
          m_.add_row("eq15_assign", {{'i', I1}, {'k', one(k)}, {'v', v}}, e, RowSense::LessEqual,
                     0.0);
        }
    }
    // The purchase link and the y ordering are emitted by the caller once N_v exists.
    for (int v = 1; v <= count; ++v)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        for (std::size_t k = 0; k < K; ++k)
          if (S.A(k, t)) e.add(vc.bb[k][v - 1], 1.0);
        m_.add_row("eq17_compat", {{'i', I1}, {'v', v}, {'t', t}}, e, RowSense::LessEqual, 1.0);
      }
    for (int v = 1; v <= count; ++v)
      for (int t = 1; t <= T; ++t) {
        LinExpr e;
        for (std::size_t j = 0; j < J; ++j) e.add(vc.x[v - 1][j][t - 1], 1.0);
        for (std::size_t k = 0; k < K; ++k)
          if (S.A(k, t)) e.add(vc.bb[k][v - 1], 1.0);
        m_.add_row("eq18_enroute", {{'i', I1}, {'v', v}, {'t', t}}, e, RowSense::LessEqual, 1.0);
      }
    for (int v = 1; v <= count; ++v)
      for (int t = 1; t <= T; ++t) {
        const int s = g.day_of(t);
        const int next = g.next_in_day(t);
        LinExpr e;
        e.add(vc.soev[v - 1][next - 1], 1.0).add(vc.soev[v - 1][t - 1], -1.0);
        for (std::size_t j = 0; j < J; ++j) e.add(vc.pp[v - 1][j][t - 1], -g.delta_t);
        for (std::size_t k = 0; k < K; ++k) {
          if (S.U(k, t)) e.add(vc.dd[k][v - 1], 1.0);
          if (S.V(k, t)) {
            e.add(vc.dd[k][v - 1], -1.0);
            e.add(vc.bb[k][v - 1], inst_.blocks[k].distance_km * eta);
          }
        }
        if (t == g.tau_hi(s)) {
          m_.add_row("eq23_wrap", {{'i', I1}, {'v', v}, {'s', s + 1}}, e, RowSense::Equal, 0.0);
        } else {
          m_.add_row("eq20_soev", {{'i', I1}, {'v', v}, {'s', s + 1}, {'t', t}}, e,
                     RowSense::Equal, 0.0);
        }
      }
    for (int v = 1; v <= count; ++v)
      for (std::size_t j = 0; j < J; ++j)
        for (int t = 1; t <= T; ++t) {
          LinExpr e;
          e.add(vc.pp[v - 1][j][t - 1], 1.0).add(vc.x[v - 1][j][t - 1], -inst_.pairing(i, j));
          m_.add_row("eq21_pp", {{'i', I1}, {'v', v}, {'j', one(j)}, {'t', t}}, e,
                     RowSense::LessEqual, 0.0);
        }
    const bool exact = inst_.variant == Variant::ExactEnergy;
    for (std::size_t k = 0; k < K; ++k)
      for (int v = 1; v <= count; ++v) {
        const IndexTuple idx{{'i', I1}, {'k', one(k)}, {'v', v}};
        LinExpr lo;
        lo.add(vc.dd[k][v - 1], 1.0).add(vc.bb[k][v - 1], -inst_.block_energy(k, i));
        m_.add_row(exact ? "eq25_exact" : "eq24_lo", idx, lo,
                   exact ? RowSense::Equal : RowSense::GreaterEqual, 0.0);
        LinExpr hi;
        hi.add(vc.dd[k][v - 1], 1.0).add(vc.bb[k][v - 1], -R);
        m_.add_row(exact ? "eq25_hi" : "eq24_hi", idx, hi, RowSense::LessEqual, 0.0);
      }
    return vc;
  }

  void add_purchase_rows(std::size_t i, const VehicleCols& vc, std::size_t nv_col, bool symmetry) {
    LinExpr e;
    for (std::size_t y : vc.y) e.add(y, 1.0);
    e.add(nv_col, -1.0);
    m_.add_row("eq16_fleet", {{'i', one(i)}}, e, RowSense::LessEqual, 0.0);
    if (!symmetry) return;
    for (int v = 1; v < vc.count; ++v) {
      LinExpr s;
      s.add(vc.y[v - 1], 1.0).add(vc.y[v], -1.0);
      m_.add_row("sym_y", {{'i', one(i)}, {'v', v}}, s, RowSense::GreaterEqual, 0.0);
    }
  }

  /// Charging fractions across all vehicles share the chargers.
  void add_charger_sharing(const std::vector<VehicleCols>& fleet, const FleetCols& f) {
    for (std::size_t j = 0; j < inst_.J(); ++j)
      for (int t = 1; t <= inst_.T(); ++t) {
        LinExpr e;
        for (const auto& vc : fleet)
          for (int v = 0; v < vc.count; ++v) e.add(vc.x[v][j][t - 1], 1.0);
        e.add(f.Nc[j], -1.0);
        if (!f.slack.empty()) e.add(f.slack[j], -1.0);
        m_.add_row("eq19_chargers", {{'j', one(j)}, {'t', t}}, e, RowSense::LessEqual, 0.0);
      }
  }

  /// Ties type-i individual sums to the fleet variables.
  void add_matching(std::size_t i, const VehicleCols& vc, const Cols& b_col, const Cols& d_col,
                    const Cols2& m_col, const Cols& pv_col, const Cols& soe_col) {
    const int I1 = one(i);
    for (std::size_t k = 0; k < inst_.K(); ++k) {
      LinExpr e;
      for (int v = 0; v < vc.count; ++v) e.add(vc.bb[k][v], 1.0);
      e.add(b_col[k], -1.0);
      m_.add_row("eq26_bb", {{'i', I1}, {'k', one(k)}}, e, RowSense::Equal, 0.0);
    }
    for (std::size_t k = 0; k < inst_.K(); ++k) {
      LinExpr e;
      for (int v = 0; v < vc.count; ++v) e.add(vc.dd[k][v], 1.0);
      e.add(d_col[k], -1.0);
      m_.add_row("eq27_dd", {{'i', I1}, {'k', one(k)}}, e, RowSense::Equal, 0.0);
    }
    for (std::size_t j = 0; j < inst_.J(); ++j)
      for (int t = 1; t <= inst_.T(); ++t) {
        LinExpr e;
        for (int v = 0; v < vc.count; ++v) e.add(vc.x[v][j][t - 1], 1.0);
        e.add(m_col[j][t - 1], -1.0);
        m_.add_row("eq28_x", {{'i', I1}, {'j', one(j)}, {'t', t}}, e, RowSense::Equal, 0.0);
      }
    for (int t = 1; t <= inst_.T(); ++t) {
      LinExpr e;
      for (int v = 0; v < vc.count; ++v)
        for (std::size_t j = 0; j < inst_.J(); ++j) e.add(vc.pp[v][j][t - 1], 1.0);
      e.add(pv_col[t - 1], -1.0);
      m_.add_row("eq29_pp", {{'i', I1}, {'t', t}}, e, RowSense::Equal, 0.0);
    }
    for (int t = 1; t <= inst_.T(); ++t) {
      LinExpr e;
      for (int v = 0; v < vc.count; ++v) e.add(vc.soev[v][t - 1], 1.0);
      e.add(soe_col[t - 1], -1.0);
      m_.add_row("eq30_soev", {{'i', I1}, {'t', t}}, e, RowSense::Equal, 0.0);
    }
  }

  void fix(std::size_t col, double value) { m_.set_bounds(col, value, value); }

 private:
  const Instance& inst_;
  MilpModel& m_;
};

Cols column_of(const Cols2& by_k, std::size_t i) {
  Cols out;
  for (const auto& row : by_k) out.push_back(row[i]);
  return out;
}

ModelMetadata meta_for(const Instance& inst, ProblemId p, std::string label = {}) {
  return {p, inst.variant, instance_fingerprint(inst), std::move(label)};
}

void assert_counts(const MilpModel& model, const ModelCounts& want) {
  const ModelCounts got{model.num_vars(), model.num_rows()};
  if (!(got == want)) {
    throw std::logic_error("milp_core: " + std::string(to_string(model.metadata().problem)) +
                           " built " + std::to_string(got.variables) + " vars / " +
                           std::to_string(got.constraints) + " rows, expected " +
                           std::to_string(want.variables) + " / " +
                           std::to_string(want.constraints));
  }
}

void guard_size(std::size_t estimate, const BuildOptions& opt, const char* where) {
  if (estimate > opt.max_variables) {
    throw Error(ErrorCode::ModelTooLarge, where,
                std::to_string(estimate) + " variables exceeds the limit of " +
                    std::to_string(opt.max_variables));
  }
}

std::size_t peak_rows(const Instance& inst) {
  std::size_t n = 0;
  for (const auto& g : inst.tariff.demand_groups) n += g.intervals.size();
  return n;
}

std::vector<int> fleet_of(const AggSolution& agg) {
  std::vector<int> out;
  for (std::size_t i = 0; i < agg.Nv.size(); ++i) out.push_back(agg.fleet_size(i));
  return out;
}

void check_agg_shape(const Instance& inst, const AggSolution& agg, const char* where) {
  if (agg.b.size() != inst.K() || agg.Nv.size() != inst.I() || agg.Nc.size() != inst.J() ||
      agg.soe.size() != inst.I() || agg.p_g.size() != static_cast<std::size_t>(inst.T())) {
    throw Error(ErrorCode::InvalidArgument, where, "aggregate solution does not match the instance");
  }
}

}  // namespace

int AggSolution::fleet_size(std::size_t i) const { return static_cast<int>(std::lround(Nv.at(i))); }

int AggSolution::charger_count(std::size_t j) const {
  return static_cast<int>(std::lround(Nc.at(j)));
}

std::size_t AggSolution::type_of(std::size_t k) const {
  const auto& row = b.at(k);
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

AggSolution extract_agg(const Instance& inst, const MilpModel& model,
                        const std::vector<double>& values) {
  if (values.size() != model.num_vars()) {
    throw Error(ErrorCode::MissingValue, "milp_core.extract_agg",
                "value vector does not cover the model");
  }
  auto get = [&](const std::string& fam, const IndexTuple& idx) {
    return values[model.col(fam, idx)];
  };
  const std::size_t K = inst.K(), I = inst.I(), J = inst.J();
  const int T = inst.T();
  AggSolution a;
  a.b.assign(K, std::vector<double>(I));
  a.d.assign(K, std::vector<double>(I));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < I; ++i) {
      a.b[k][i] = std::round(get("b", {{'k', one(k)}, {'i', one(i)}}));
      a.d[k][i] = clean(get("d", {{'k', one(k)}, {'i', one(i)}}));
    }
  a.n.assign(I, std::vector<double>(T));
  a.p_v.assign(I, std::vector<double>(T));
  a.soe.assign(I, std::vector<double>(T));
  a.m.assign(I, std::vector<std::vector<double>>(J, std::vector<double>(T)));
  for (std::size_t i = 0; i < I; ++i) {
    a.Nv.push_back(std::round(get("N_v", {{'i', one(i)}})));
    for (int t = 1; t <= T; ++t) {
      a.n[i][t - 1] = std::round(get("n", {{'i', one(i)}, {'t', t}}));
      a.p_v[i][t - 1] = clean(get("p_v", {{'i', one(i)}, {'t', t}}));
      a.soe[i][t - 1] = clean(get("soe", {{'i', one(i)}, {'t', t}}));
      for (std::size_t j = 0; j < J; ++j)
        a.m[i][j][t - 1] = clean(get("m", {{'i', one(i)}, {'j', one(j)}, {'t', t}}));
    }
  }
  for (std::size_t j = 0; j < J; ++j) a.Nc.push_back(std::round(get("N_c", {{'j', one(j)}})));
  for (int t = 1; t <= T; ++t) a.p_g.push_back(clean(get("p_g", {{'t', t}})));
  for (std::size_t l = 0; l < inst.L(); ++l) a.p_pk.push_back(clean(get("p_pk", {{'l', one(l)}})));
  a.objective = model.objective_value(values);
  return a;
}

ModelCounts expected_counts(const Instance& inst, ProblemId problem, const std::vector<int>& fleet,
                            bool with_slack, std::size_t p3_type) {
  const std::size_t K = inst.K(), I = inst.I(), J = inst.J(), L = inst.L();
  const std::size_t T = static_cast<std::size_t>(inst.T());
  const std::size_t S = static_cast<std::size_t>(inst.time_grid.days);
  const std::size_t p1_vars = K * I + I * T + I * J * T + I + J + I * T + I * T + K * I + T + L;
  const std::size_t p1_rows = K + I * T + I * T + J * T + I * (T - S) + I * T + I * S + I * T +
                              2 * K * I + T + peak_rows(inst);
  // Per-vehicle variables (bb, x, pp, soev, dd) and rows (17, 18, 20, 21, 23, 24/25).
  const auto veh_vars = [&](std::size_t V) { return K * V + 2 * V * J * T + V * T + K * V; };
  const auto veh_rows = [&](std::size_t V) {
    return 2 * V * T + V * (T - S) + V * S + V * J * T + 2 * K * V;
  };
  const std::size_t match_rows = 2 * K + J * T + 2 * T;

  switch (problem) {
    case ProblemId::P1:
      return {p1_vars, p1_rows};
    case ProblemId::P2: {
      const std::size_t V = K;
      ModelCounts c{p1_vars, p1_rows};
      for (std::size_t i = 0; i < I; ++i) {
        c.variables += V + veh_vars(V);
        c.constraints += K * V + 1 + (V > 0 ? V - 1 : 0) + veh_rows(V) + match_rows;
      }
      c.constraints += J * T;
      return c;
    }
    case ProblemId::P3: {
      const std::size_t V = static_cast<std::size_t>(fleet.at(p3_type));
      ModelCounts c;
      c.variables = K /* b */ + K /* d */ + J * T /* m */ + T /* p_v */ + T /* soe */ + veh_vars(V);
      c.constraints = veh_rows(V) + match_rows;
      return c;
    }
    case ProblemId::P4: {
      ModelCounts c{p1_vars + (with_slack ? J : 0), p1_rows};
      for (std::size_t i = 0; i < I; ++i) {
        const std::size_t V = static_cast<std::size_t>(fleet.at(i));
        c.variables += veh_vars(V);
        c.constraints += veh_rows(V) + match_rows;
      }
      c.constraints += J * T;
      return c;
    }
    case ProblemId::Custom:
      break;
  }
  return {};
}

MilpModel build_p1(const Instance& inst, const BuildOptions& opt) {
  const auto want = expected_counts(inst, ProblemId::P1);
  guard_size(want.variables, opt, "milp_core.build_p1");
  MilpModel model(meta_for(inst, ProblemId::P1));
  Builder b(inst, model);
  const FleetCols f = b.add_fleet_vars(nullptr, 0);
  b.add_fleet_rows(f);
  b.add_energy_rows(f);
  b.add_objective(f);
  assert_counts(model, want);
  return model;
}

MilpModel build_p2(const Instance& inst, const BuildOptions& opt) {
  const auto want = expected_counts(inst, ProblemId::P2);
  guard_size(want.variables, opt, "milp_core.build_p2");
  MilpModel model(meta_for(inst, ProblemId::P2));
  Builder b(inst, model);
  const FleetCols f = b.add_fleet_vars(nullptr, 0);
  b.add_fleet_rows(f);
  b.add_energy_rows(f);

  const std::vector<int> rank = chronological_rank(inst, std::vector<bool>(inst.K(), true));
  const int V = static_cast<int>(inst.K());
  std::vector<VehicleCols> fleet;
  for (std::size_t i = 0; i < inst.I(); ++i) {
    fleet.push_back(b.add_vehicles(i, V, true, rank, opt.symmetry_breaking));
    b.add_purchase_rows(i, fleet.back(), f.Nv[i], opt.symmetry_breaking);
  }
  b.add_charger_sharing(fleet, f);
  for (std::size_t i = 0; i < inst.I(); ++i) {
    b.add_matching(i, fleet[i], column_of(f.b, i), column_of(f.d, i), f.m[i], f.p_v[i], f.soe[i]);
  }
  b.add_objective(f);
  auto count_want = want;
  if (!opt.symmetry_breaking) count_want.constraints -= inst.I() * (V > 0 ? V - 1 : 0);
  assert_counts(model, count_want);
  return model;
}

std::vector<MilpModel> build_p3(const Instance& inst, const AggSolution& agg,
                                const BuildOptions& opt) {
  check_agg_shape(inst, agg, "milp_core.build_p3");
  const std::vector<int> fleet = fleet_of(agg);
  std::vector<MilpModel> out;
  for (std::size_t i = 0; i < inst.I(); ++i) {
    const auto want = expected_counts(inst, ProblemId::P3, fleet, false, i);
    guard_size(want.variables, opt, "milp_core.build_p3");
    MilpModel model(meta_for(inst, ProblemId::P3, "i" + std::to_string(i + 1)));
    Builder b(inst, model);
    const int I1 = one(i);
    const int T = inst.T();
    auto fixed = [&](const char* fam, IndexTuple idx, VarKind kind, double value) {
      return model.add_var(fam, std::move(idx), kind, value, value);
    };
    Cols b_col, d_col, pv_col, soe_col;
    Cols2 m_col(inst.J(), Cols(T));
    for (std::size_t k = 0; k < inst.K(); ++k)
      b_col.push_back(fixed("b", {{'k', one(k)}, {'i', I1}}, VarKind::Binary, agg.b[k][i]));
    for (std::size_t k = 0; k < inst.K(); ++k)
      d_col.push_back(fixed("d", {{'k', one(k)}, {'i', I1}}, VarKind::Continuous, agg.d[k][i]));
    for (std::size_t j = 0; j < inst.J(); ++j)
      for (int t = 1; t <= T; ++t)
        m_col[j][t - 1] = fixed("m", {{'i', I1}, {'j', one(j)}, {'t', t}}, VarKind::Continuous,
                                agg.m[i][j][t - 1]);
    for (int t = 1; t <= T; ++t)
      pv_col.push_back(fixed("p_v", {{'i', I1}, {'t', t}}, VarKind::Continuous, agg.p_v[i][t - 1]));
    for (int t = 1; t <= T; ++t)
      soe_col.push_back(fixed("soe", {{'i', I1}, {'t', t}}, VarKind::Continuous, agg.soe[i][t - 1]));

    std::vector<bool> members(inst.K());
    for (std::size_t k = 0; k < inst.K(); ++k) members[k] = agg.b[k][i] > 0.5;
    const auto rank = chronological_rank(inst, members);
    const VehicleCols vc = b.add_vehicles(i, fleet[i], false, rank, opt.symmetry_breaking);
    b.add_matching(i, vc, b_col, d_col, m_col, pv_col, soe_col);
    assert_counts(model, want);
    out.push_back(std::move(model));
  }
  return out;
}

MilpModel build_p4(const Instance& inst, const AggSolution& agg, int charger_slack_limit,
                   const BuildOptions& opt) {
  check_agg_shape(inst, agg, "milp_core.build_p4");
  if (charger_slack_limit < 0) {
    throw Error(ErrorCode::InvalidArgument, "milp_core.build_p4", "slack limit must be >= 0");
  }
  const std::vector<int> fleet = fleet_of(agg);
  const bool slack = charger_slack_limit > 0;
  const auto want = expected_counts(inst, ProblemId::P4, fleet, slack);
  guard_size(want.variables, opt, "milp_core.build_p4");
  MilpModel model(meta_for(inst, ProblemId::P4, slack ? "slack" + std::to_string(charger_slack_limit) : ""));
  Builder b(inst, model);
  const FleetCols f = b.add_fleet_vars(&agg, charger_slack_limit);
  b.add_fleet_rows(f);
  b.add_energy_rows(f);

  std::vector<VehicleCols> vehicles;
  for (std::size_t i = 0; i < inst.I(); ++i) {
    std::vector<bool> members(inst.K());
    for (std::size_t k = 0; k < inst.K(); ++k) members[k] = agg.b[k][i] > 0.5;
    const auto rank = chronological_rank(inst, members);
    vehicles.push_back(b.add_vehicles(i, fleet[i], false, rank, opt.symmetry_breaking));
  }
  b.add_charger_sharing(vehicles, f);
  for (std::size_t i = 0; i < inst.I(); ++i) {
    b.add_matching(i, vehicles[i], column_of(f.b, i), column_of(f.d, i), f.m[i], f.p_v[i],
                   f.soe[i]);
  }
  b.add_objective(f);
  assert_counts(model, want);
  return model;
}

}  // namespace evfleet
