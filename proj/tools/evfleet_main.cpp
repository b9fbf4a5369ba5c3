// evfleet command line: ingest, synth, validate, emit-model, run,
// verify-bounds, sweep, oracle.
//
// Exit codes: 0 ok, 1 domain error, 2 usage error, 3 solver/environment error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "evfleet/bench.hpp"
#include "evfleet/formulation.hpp"
#include "evfleet/gtfs.hpp"
#include "evfleet/instance_io.hpp"
#include "evfleet/model_io.hpp"
#include "evfleet/pipeline.hpp"
#include "evfleet/solver.hpp"
#include "evfleet/synthetic.hpp"

namespace fs = std::filesystem;
using namespace evfleet;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string instance;
  std::string variant;
  std::string solver = "auto";
  double time_limit = 3600.0;
  double gap = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
};

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::MissingFile, "cli.main", "cannot write " + p.string());
  f << text;
}

Instance load_instance(const Globals& g) {
  if (g.instance.empty()) throw UsageError("--instance is required");
  if (!fs::exists(g.instance)) throw UsageError("instance file not found: " + g.instance);
  Instance inst = read_instance(g.instance);
  if (!g.variant.empty()) inst.variant = parse_variant(g.variant);
  validate_instance(inst).raise_if_failed();
  return inst;
}

SolverConfig solver_config(const Globals& g) {
  SolverConfig c;
  c.solver = g.solver;
  c.time_limit_s = g.time_limit;
  c.mip_rel_gap = g.gap;
  c.seed = g.seed;
  return c;
}

std::string money(double v) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return "infeasible";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pct(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f%%", 100.0 * v);
  return buf;
}

void print_variant(const VariantReport& v) {
  std::cout << "variant " << to_string(v.variant) << "\n"
            << "  J1 " << money(v.p1.objective) << " (" << to_string(v.p1.status) << ", "
            << v.p1.solve_s << " s)\n"
            << "  P3 " << to_string(v.p3) << "\n"
            << "  J4 " << money(v.p4.objective) << " (" << to_string(v.p4.status)
            << (v.slack_limit_used ? ", charger slack " + std::to_string(v.slack_limit_used) : "")
            << ")\n";
  if (v.p2.ran) std::cout << "  J2 " << money(v.p2.objective) << " (" << to_string(v.p2.status) << ")\n";
  std::cout << "  gap41 " << pct(v.gap41) << "  gap21 " << pct(v.gap21)
            << (v.gap21_from_p4 ? " (bound from P4)" : "") << "\n";
  for (const auto& n : v.notes) std::cout << "  note: " << n << "\n";
}

std::vector<Variant> parse_variants(const std::string& text) {
  std::vector<Variant> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_variant(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integer-clustering fleet and charger planning toolchain"};
  app.require_subcommand(1, 1);
  Globals g;
  auto global = [&](CLI::App* sub) {
    sub->add_option("--instance", g.instance, "Instance file (evfleet.instance/1)");
    sub->add_option("--variant", g.variant, "surplus or exact")
        ->check(CLI::IsMember({"surplus", "exact", "SurplusAllowed", "ExactEnergy"}));
    sub->add_option("--solver", g.solver, "auto, highspy, scipy or highs");
    sub->add_option("--time-limit", g.time_limit, "Seconds per solve")->check(CLI::PositiveNumber);
    sub->add_option("--gap", g.gap, "Relative MIP gap")->check(CLI::Range(0.0, 0.999999));
    sub->add_option("--seed", g.seed, "Random seed");
    sub->add_option("--out", g.out, "Output path");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build an instance from a GTFS feed");
  global(ingest);
  std::string gtfs_dir;
  std::vector<std::string> dates, services, depots;
  bool strict_depot = false;
  int omega = 1, td = 24, vtypes = 2, ctypes = 3;
  double delta_t = 1.0;
  ingest->add_option("--gtfs", gtfs_dir, "GTFS directory")->required();
  ingest->add_option("--date", dates, "Service date YYYYMMDD, one per representative day");
  ingest->add_option("--service-id", services, "Service ids for a single representative day");
  ingest->add_option("--depot-stop", depots, "Depot stop id(s)");
  ingest->add_flag("--strict-depot", strict_depot, "Drop blocks not starting and ending at the depot");
  ingest->add_option("--omega", omega, "Keep every omega-th block")->check(CLI::PositiveNumber);
  ingest->add_option("--intervals-per-day", td, "Intervals per day")->check(CLI::PositiveNumber);
  ingest->add_option("--delta-t", delta_t, "Hours per interval")->check(CLI::PositiveNumber);
  ingest->add_option("--vehicle-types", vtypes, "Default vehicle catalog entries")->check(CLI::Range(1, 2));
  ingest->add_option("--charger-types", ctypes, "Default charger catalog entries")->check(CLI::Range(1, 3));

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic instance");
  global(synth);
  std::string synth_config;
  SyntheticConfig sc;
  synth->add_option("--config", synth_config, "Synthetic config file (evfleet.synthetic/1)");
  auto* k_opt = synth->add_option("-K,--blocks", sc.blocks, "Number of blocks");
  synth->add_option("--days", sc.days, "Representative days");
  synth->add_option("--vehicle-types", sc.vehicle_types, "Vehicle types")->check(CLI::Range(1, 2));
  synth->add_option("--charger-types", sc.charger_types, "Charger types")->check(CLI::Range(1, 3));
  synth->add_option("--max-block-intervals", sc.max_block_intervals, "Longest block");

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  global(validate);

  auto* emit = app.add_subcommand("emit-model", "Write P1, P2, P3 or P4 as MPS or LP");
  global(emit);
  std::string problem, format = "mps";
  int emit_slack = 0;
  emit->add_option("problem", problem, "p1, p2, p3 or p4")
      ->required()
      ->check(CLI::IsMember({"p1", "p2", "p3", "p4"}));
  emit->add_option("--format", format, "mps or lp")->check(CLI::IsMember({"mps", "lp"}));
  emit->add_option("--slack", emit_slack, "P4 charger slack limit")->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "Cluster, check disaggregation, re-optimize");
  global(run);
  int slack_limit = 1;
  bool with_p2 = false;
  run->add_option("--slack-limit", slack_limit, "Charger slack when P4 is infeasible")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--with-p2", with_p2, "Also solve the individual-vehicle benchmark");

  auto* verify = app.add_subcommand("verify-bounds", "Check the bound chain on both variants");
  global(verify);
  bool verify_p2 = true;
  verify->add_flag("!--no-p2", verify_p2, "Skip the individual-vehicle model");

  auto* sweep = app.add_subcommand("sweep", "Omega sweep over an instance's blocks");
  global(sweep);
  std::vector<int> omegas;
  std::string variants = "surplus", plot_dir;
  int reps = 1;
  bool parallel = false, sweep_p2 = true;
  sweep->add_option("--omegas", omegas, "Subsample windows")->delimiter(',');
  sweep->add_option("--variants", variants, "Comma-separated variants");
  sweep->add_option("--repetitions", reps, "Timing repetitions")->check(CLI::PositiveNumber);
  sweep->add_flag("--parallel", parallel, "Run cases concurrently (no speedup column)");
  sweep->add_flag("!--no-p2", sweep_p2, "Skip the individual-vehicle model");
  sweep->add_option("--plot-dir", plot_dir, "Directory for plot series");

  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum for tiny instances");
  global(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) {
      if (g.out.empty()) throw UsageError("--out is required");
      if (dates.empty() == services.empty()) throw UsageError("give either --date or --service-id");
      ServiceDaySelection sel;
      sel.intervals_per_day = td;
      sel.delta_t = delta_t;
      sel.strict_depot = strict_depot;
      sel.depot_stop_ids.insert(depots.begin(), depots.end());
      if (!services.empty()) {
        ServiceDay d;
        d.service_ids.insert(services.begin(), services.end());
        d.weight = 365.0;
        sel.days.push_back(d);
      } else {
        const auto weights = default_day_weights(static_cast<int>(dates.size()));
        for (std::size_t n = 0; n < dates.size(); ++n) {
          ServiceDay d;
          try {
            d.date = std::stoi(dates[n]);
          } catch (const std::exception&) {
            throw UsageError("bad --date " + dates[n]);
          }
          d.weight = weights[n];
          sel.days.push_back(d);
        }
      }
      const RawGtfsFeed feed = parse_gtfs(gtfs_dir);
      const auto ex = extract_blocks_detailed(feed, sel);
      const BlockSet blocks = subsample(ex.blocks, omega);
      const Variant v = g.variant.empty() ? Variant::SurplusAllowed : parse_variant(g.variant);
      Instance inst = default_instance(blocks, sel.grid(), vtypes, ctypes, v);
      validate_instance(inst).raise_if_failed();
      write_instance(g.out, inst);
      std::cout << "blocks " << ex.blocks.size() << ", kept " << blocks.size() << " (omega "
                << omega << "), rejected " << ex.rejected.size() << "\n";
      for (const auto& r : ex.rejected) std::cout << "  " << r << "\n";
      return 0;
    }

    if (synth->parsed()) {
      if (g.out.empty()) throw UsageError("--out is required");
      SyntheticConfig cfg = sc;
      if (!synth_config.empty()) {
        if (!fs::exists(synth_config)) throw UsageError("config not found: " + synth_config);
        cfg = read_synthetic_config(synth_config);
        if (k_opt->count()) cfg.blocks = sc.blocks;
      }
      if (synth->get_option("--seed")->count()) cfg.seed = g.seed;
      if (!g.variant.empty()) cfg.variant = parse_variant(g.variant);
      const Instance inst = generate_synthetic(cfg);
      write_instance(g.out, inst);
      std::cout << "wrote " << inst.K() << " blocks to " << g.out << "\n";
      return 0;
    }

    if (validate->parsed()) {
      if (g.instance.empty()) throw UsageError("--instance is required");
      if (!fs::exists(g.instance)) throw UsageError("instance file not found: " + g.instance);
      const Instance inst = read_instance(g.instance);
      const auto rep = validate_instance(inst);
      if (rep.passed()) {
        std::cout << "ok: K=" << inst.K() << " I=" << inst.I() << " J=" << inst.J()
                  << " T=" << inst.T() << "\n";
        return 0;
      }
      for (const auto& issue : rep.issues) {
        std::cout << to_string(issue.code) << ": " << issue.message
                  << (issue.block_id.empty() ? "" : " [block " + issue.block_id + "]") << "\n";
      }
      return 1;
    }

    if (emit->parsed()) {
      if (g.out.empty()) throw UsageError("--out is required");
      const Instance inst = load_instance(g);
      auto write = [&](const fs::path& p, const MilpModel& m) {
        if (format == "lp") write_lp(p, m);
        else write_mps(p, m);
        std::cout << "wrote " << p.string() << " (" << m.num_vars() << " vars, " << m.num_rows()
                  << " rows)\n";
      };
      if (problem == "p1") {
        write(g.out, build_p1(inst));
      } else if (problem == "p2") {
        write(g.out, build_p2(inst));
      } else {
        const MilpModel p1 = build_p1(inst);
        const SolveResult r1 = solve(p1, solver_config(g));
        if (!r1.has_incumbent()) {
          throw Error(ErrorCode::P1Infeasible, "cli.emit-model",
                      "P1 gave no solution to fix (" + std::string(to_string(r1.status)) + ")");
        }
        const AggSolution agg = extract_agg(inst, p1, r1.values);
        if (problem == "p4") {
          write(g.out, build_p4(inst, agg, emit_slack));
        } else {
          const auto models = build_p3(inst, agg);
          const fs::path base(g.out);
          for (std::size_t i = 0; i < models.size(); ++i) {
            fs::path p = base;
            p.replace_filename(base.stem().string() + ".i" + std::to_string(i + 1) +
                               base.extension().string());
            write(p, models[i]);
          }
        }
      }
      return 0;
    }

    if (run->parsed()) {
      const Instance inst = load_instance(g);
      PipelineOptions opt;
      opt.slack_limit = slack_limit;
      opt.with_p2 = with_p2;
      const PipelineReport rep = run_cluster_disaggregate(inst, solver_config(g), opt);
      std::cout << "instance " << rep.instance_hash << " K=" << rep.K << "\n";
      for (const auto& v : rep.variants) print_variant(v);
      if (!g.out.empty()) {
        write_file(g.out, rep.to_json());
        fs::path csv(g.out);
        csv.replace_extension(".csv");
        std::string text = pipeline_csv_header() + "\n";
        for (const auto& row : rep.csv_rows()) text += row + "\n";
        write_file(csv, text);
      }
      return 0;
    }

    if (verify->parsed()) {
      const Instance inst = load_instance(g);
      const BoundsCheck bc = verify_bounds(inst, solver_config(g), verify_p2);
      for (const auto& v : bc.verdicts) {
        std::cout << to_string(v.status) << "  " << v.claim << "  " << money(v.lhs) << " vs "
                  << money(v.rhs) << (v.informational ? "  (informational)" : "") << "\n";
      }
      if (!g.out.empty()) write_file(g.out, bc.to_json());
      return bc.any_fail() ? 1 : 0;
    }

    if (sweep->parsed()) {
      const Instance inst = load_instance(g);
      SweepConfig cfg;
      if (!omegas.empty()) cfg.omegas = omegas;
      cfg.variants = parse_variants(variants);
      cfg.solver = solver_config(g);
      cfg.output = g.out;
      cfg.repetitions = reps;
      cfg.parallel = parallel;
      cfg.with_p2 = sweep_p2;
      const auto rows = run_sweep(inst, cfg);
      const auto s = summarize(rows);
      std::cout << "rows " << s.rows << " (failed " << s.failed << "), max gap41 "
                << pct(s.max_gap41) << ", median gap41 " << pct(s.median_gap41)
                << ", max speedup " << (std::isnan(s.max_speedup) ? std::string("n/a") : std::to_string(s.max_speedup))
                << ", P3 feasible " << s.p3_feasible << ", P2 time limits " << s.p2_time_limit
                << "\n";
      if (!plot_dir.empty()) emit_plot_data(rows, plot_dir);
      return 0;
    }

    if (oracle->parsed()) {
      const Instance inst = load_instance(g);
      const OracleResult o = brute_force_oracle(inst, solver_config(g));
      std::cout << "oracle optimum " << money(o.objective) << " over " << o.groupings
                << " groupings\n";
      if (!g.out.empty()) {
        nlohmann::ordered_json j;
        j["schema"] = "evfleet.oracle/1";
        j["instance"] = instance_fingerprint(inst);
        j["variant"] = std::string(to_string(inst.variant));
        j["objective"] = std::isfinite(o.objective) ? nlohmann::ordered_json(o.objective) : nullptr;
        j["groupings"] = o.groupings;
        j["group"] = o.best_group;
        j["type"] = o.best_type;
        write_file(g.out, j.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "cli.main: usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_environment_error(e.code()) ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "cli.main: internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
