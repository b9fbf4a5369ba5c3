#include "evfleet/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evfleet/gtfs.hpp"

namespace evfleet {

namespace fs = std::filesystem;

std::vector<int> default_omegas() { return {500, 250, 120, 76, 50, 35, 21, 15, 10, 7, 5, 3}; }

void SweepConfig::validate() const {
  constexpr const char* where = "bench_harness.run_sweep";
  if (omegas.empty()) throw Error(ErrorCode::InvalidArgument, where, "omega list is empty");
  std::set<int> seen;
  for (int w : omegas) {
    if (w < 1) throw Error(ErrorCode::InvalidArgument, where, "omegas must be >= 1");
    if (!seen.insert(w).second) {
      throw Error(ErrorCode::InvalidArgument, where, "omega " + std::to_string(w) + " repeated");
    }
  }
  if (variants.empty()) throw Error(ErrorCode::InvalidArgument, where, "no variant selected");
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, where, "repetitions must be >= 1");
  if (slack_limit < 0) throw Error(ErrorCode::InvalidArgument, where, "slack limit must be >= 0");
  solver.validate();
}

namespace {

bool same_num(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s.empty()) return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string status_of(const StageResult& s) {
  return s.ran ? std::string(to_string(s.status)) : std::string();
}

const std::vector<std::string> kColumns = {
    "omega", "K",      "variant",  "J1",      "J1_status", "P3",       "J4",       "J4_status",
    "slack", "J2",     "J2_status", "gap41",  "gap21",     "gap21_from_p4", "T_P1", "T_P3",
    "T_P4",  "T_P2",   "build_P1", "build_P3", "build_P4", "build_P2", "speedup",  "error"};

}  // namespace

bool SweepRow::operator==(const SweepRow& o) const {
  return omega == o.omega && K == o.K && variant == o.variant && same_num(J1, o.J1) &&
         J1_status == o.J1_status && P3 == o.P3 && same_num(J4, o.J4) &&
         J4_status == o.J4_status && slack == o.slack && same_num(J2, o.J2) &&
         J2_status == o.J2_status && same_num(gap41, o.gap41) && same_num(gap21, o.gap21) &&
         gap21_from_p4 == o.gap21_from_p4 && same_num(T_P1, o.T_P1) && same_num(T_P3, o.T_P3) &&
         same_num(T_P4, o.T_P4) && same_num(T_P2, o.T_P2) && same_num(build_P1, o.build_P1) &&
         same_num(build_P3, o.build_P3) && same_num(build_P4, o.build_P4) &&
         same_num(build_P2, o.build_P2) && same_num(speedup, o.speedup) && error == o.error;
}

std::string sweep_csv_header() {
  std::string out;
  for (std::size_t c = 0; c < kColumns.size(); ++c) out += (c ? "," : "") + kColumns[c];
  return out;
}

std::string sweep_csv_row(const SweepRow& r) {
  const std::vector<std::string> f = {std::to_string(r.omega),
                                      std::to_string(r.K),
                                      std::string(to_string(r.variant)),
                                      num(r.J1),
                                      r.J1_status,
                                      r.P3,
                                      num(r.J4),
                                      r.J4_status,
                                      std::to_string(r.slack),
                                      num(r.J2),
                                      r.J2_status,
                                      num(r.gap41),
                                      num(r.gap21),
                                      r.gap21_from_p4 ? "1" : "0",
                                      num(r.T_P1),
                                      num(r.T_P3),
                                      num(r.T_P4),
                                      num(r.T_P2),
                                      num(r.build_P1),
                                      num(r.build_P3),
                                      num(r.build_P4),
                                      num(r.build_P2),
                                      num(r.speedup),
                                      r.error};
  std::string out;
  for (std::size_t c = 0; c < f.size(); ++c) out += (c ? "," : "") + quote(f[c]);
  return out;
}

std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = sweep_csv_header() + "\n";
  for (const auto& r : rows) out += sweep_csv_row(r) + "\n";
  return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  constexpr const char* where = "bench_harness.parse_sweep_csv";
  const CsvTable t = parse_csv(text, "sweep csv");
  if (t.header != kColumns) throw Error(ErrorCode::SchemaError, where, "unexpected sweep CSV header");
  std::vector<SweepRow> rows;
  for (std::size_t n = 0; n < t.rows.size(); ++n) {
    const auto& f = t.rows[n];
    SweepRow r;
    try {
      r.omega = std::stoi(f[0]);
      r.K = static_cast<std::size_t>(std::stoul(f[1]));
      r.variant = parse_variant(f[2]);
      r.J1 = parse_num(f[3]);
      r.J1_status = f[4];
      r.P3 = f[5];
      r.J4 = parse_num(f[6]);
      r.J4_status = f[7];
      r.slack = std::stoi(f[8]);
      r.J2 = parse_num(f[9]);
      r.J2_status = f[10];
      r.gap41 = parse_num(f[11]);
      r.gap21 = parse_num(f[12]);
      r.gap21_from_p4 = f[13] == "1";
      r.T_P1 = parse_num(f[14]);
      r.T_P3 = parse_num(f[15]);
      r.T_P4 = parse_num(f[16]);
      r.T_P2 = parse_num(f[17]);
      r.build_P1 = parse_num(f[18]);
      r.build_P3 = parse_num(f[19]);
      r.build_P4 = parse_num(f[20]);
      r.build_P2 = parse_num(f[21]);
      r.speedup = parse_num(f[22]);
      r.error = f[23];
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedRow, where, "line " + std::to_string(t.line[n]));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "bench_harness.read_sweep_csv", path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_sweep_csv(os.str());
}

SweepRow make_sweep_row(int omega, std::size_t K, const VariantReport& v, bool report_speedup) {
  SweepRow r;
  r.omega = omega;
  r.K = K;
  r.variant = v.variant;
  r.J1 = v.p1.objective;
  r.J1_status = status_of(v.p1);
  r.P3 = std::string(to_string(v.p3));
  r.J4 = v.p4.objective;
  r.J4_status = status_of(v.p4);
  r.slack = v.slack_limit_used;
  r.J2 = v.p2.objective;
  r.J2_status = status_of(v.p2);
  r.gap41 = v.gap41;
  r.gap21 = v.gap21;
  r.gap21_from_p4 = v.gap21_from_p4;
  r.T_P1 = v.p1.solve_s;
  r.T_P3 = v.p3_solve_s;
  r.T_P4 = v.slack_limit_used > 0 ? v.p4.solve_s + v.p4_no_slack.solve_s : v.p4.solve_s;
  r.build_P1 = v.p1.build_s;
  r.build_P3 = v.p3_build_s;
  r.build_P4 = v.p4_no_slack.build_s + (v.slack_limit_used > 0 ? v.p4.build_s : 0.0);
  if (v.p2.ran) {
    r.T_P2 = v.p2.solve_s;
    r.build_P2 = v.p2.build_s;
  }
  if (report_speedup && v.p2.proven() && r.T_P1 + r.T_P4 > 0.0) {
    r.speedup = r.T_P2 / (r.T_P1 + r.T_P4);
  }
  return r;
}

std::vector<SweepRow> run_sweep(const Instance& base, const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> done;
  if (!cfg.output.empty() && fs::exists(cfg.output)) done = read_sweep_csv(cfg.output);
  std::set<std::pair<int, Variant>> have;
  for (const auto& r : done) have.insert({r.omega, r.variant});

  std::ofstream out;
  if (!cfg.output.empty()) {
    const bool fresh = !fs::exists(cfg.output) || fs::file_size(cfg.output) == 0;
    out.open(cfg.output, std::ios::app);
    if (!out) throw Error(ErrorCode::MissingFile, "bench_harness.run_sweep", cfg.output.string());
    if (fresh) out << sweep_csv_header() << "\n" << std::flush;
  }

  struct Case {
    int omega;
    Variant variant;
  };
  std::vector<Case> todo;
  for (int w : cfg.omegas)
    for (Variant v : cfg.variants)
      if (!have.count({w, v})) todo.push_back({w, v});

  PipelineOptions popt;
  popt.slack_limit = cfg.slack_limit;
  popt.with_p2 = cfg.with_p2;
  popt.build = cfg.build;

  auto run_case = [&](const Case& c) {
    Instance inst = make_instance(base.time_grid, subsample(base.blocks, c.omega), base.vehicles,
                                  base.chargers, base.tariff, c.variant);
    SweepRow row;
    try {
      validate_instance(inst).raise_if_failed();
      std::vector<VariantReport> reps;
      for (int n = 0; n < cfg.repetitions; ++n) reps.push_back(run_variant(inst, cfg.solver, popt));
      VariantReport v = reps.front();
      if (cfg.repetitions > 1) {
        auto med = [&](auto get) {
          std::vector<double> xs;
          for (const auto& r : reps) xs.push_back(get(r));
          return median(xs);
        };
        v.p1.solve_s = med([](const VariantReport& r) { return r.p1.solve_s; });
        v.p3_solve_s = med([](const VariantReport& r) { return r.p3_solve_s; });
        v.p4.solve_s = med([](const VariantReport& r) { return r.p4.solve_s; });
        v.p4_no_slack.solve_s = med([](const VariantReport& r) { return r.p4_no_slack.solve_s; });
        v.p2.solve_s = med([](const VariantReport& r) { return r.p2.solve_s; });
      }
      row = make_sweep_row(c.omega, inst.K(), v, !cfg.parallel);
    } catch (const Error& e) {
      row.omega = c.omega;
      row.K = inst.K();
      row.variant = c.variant;
      row.error = e.what();
    }
    return row;
  };

  std::mutex mu;
  std::vector<SweepRow> fresh_rows;
  auto record = [&](SweepRow row) {
    std::lock_guard<std::mutex> lock(mu);
    if (out.is_open()) out << sweep_csv_row(row) << "\n" << std::flush;
    fresh_rows.push_back(std::move(row));
  };

  if (cfg.parallel) {
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t n;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= todo.size()) return;
            n = next++;
          }
          record(run_case(todo[n]));
        }
      });
    }
    for (auto& t : pool) t.join();
  } else {
    for (const auto& c : todo) record(run_case(c));
  }

  std::vector<SweepRow> all = done;
  all.insert(all.end(), fresh_rows.begin(), fresh_rows.end());
  // Stable order: configuration order of (omega, variant).
  std::vector<SweepRow> ordered;
  for (int w : cfg.omegas)
    for (Variant v : cfg.variants)
      for (const auto& r : all)
        if (r.omega == w && r.variant == v) ordered.push_back(r);
  for (const auto& r : all) {
    const bool in_cfg = std::find(cfg.omegas.begin(), cfg.omegas.end(), r.omega) != cfg.omegas.end() &&
                        std::find(cfg.variants.begin(), cfg.variants.end(), r.variant) != cfg.variants.end();
    if (!in_cfg) ordered.push_back(r);
  }
  return ordered;
}

SummaryStats summarize(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "bench_harness.summarize", "no sweep rows");
  SummaryStats s;
  s.rows = rows.size();
  std::vector<double> gaps;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++s.failed;
      continue;
    }
    if (!std::isnan(r.gap41)) gaps.push_back(r.gap41);
    if (!std::isnan(r.speedup) && (std::isnan(s.max_speedup) || r.speedup > s.max_speedup))
      s.max_speedup = r.speedup;
    if (r.P3 == "Feasible") ++s.p3_feasible;
    if (r.J2_status == "TimeLimit") ++s.p2_time_limit;
  }
  if (!gaps.empty()) {
    s.max_gap41 = *std::max_element(gaps.begin(), gaps.end());
    s.median_gap41 = median(gaps);
  }
  return s;
}

void emit_plot_data(const std::vector<SweepRow>& rows, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream gap(dir / "gap_vs_K.dat");
  std::ofstream time(dir / "time_vs_K.dat");
  if (!gap || !time) throw Error(ErrorCode::MissingFile, "bench_harness.emit_plot_data", dir.string());
  gap << "# K omega variant gap41 gap21 gap21_from_p4\n";
  time << "# K omega variant T_P1 T_P3 T_P4 T_P2 speedup\n";
  auto field = [](double v) { return std::isnan(v) ? std::string("nan") : num(v); };
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    gap << r.K << ' ' << r.omega << ' ' << to_string(r.variant) << ' ' << field(r.gap41) << ' '
        << field(r.gap21) << ' ' << (r.gap21_from_p4 ? 1 : 0) << '\n';
    time << r.K << ' ' << r.omega << ' ' << to_string(r.variant) << ' ' << field(r.T_P1) << ' '
         << field(r.T_P3) << ' ' << field(r.T_P4) << ' ' << field(r.T_P2) << ' '
         << field(r.speedup) << '\n';
  }
}

}  // namespace evfleet
