#include "evfleet/solver.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <cerrno>
#include <fcntl.h>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "evfleet/model_io.hpp"
#include "evfleet/verify.hpp"

extern char** environ;

#ifndef EVFLEET_DEFAULT_SHIM
#define EVFLEET_DEFAULT_SHIM "tools/milp_shim.py"
#endif
#ifndef EVFLEET_DEFAULT_PYTHON
#define EVFLEET_DEFAULT_PYTHON "python3"
#endif

namespace fs = std::filesystem;

namespace evfleet {

void SolverConfig::validate() const {
  if (!(time_limit_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver_backend.SolverConfig", "time limit must be > 0");
  }
  if (!(mip_rel_gap >= 0.0 && mip_rel_gap < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver_backend.SolverConfig",
                "mip_rel_gap must be in [0, 1)");
  }
  if (threads < 1) {
    throw Error(ErrorCode::InvalidArgument, "solver_backend.SolverConfig", "threads must be >= 1");
  }
}

std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::TimeLimit: return "TimeLimit";
    case SolveStatus::Error: return "Error";
  }
  return "Error";
}

std::string_view to_string(Feasibility f) noexcept {
  switch (f) {
    case Feasibility::Feasible: return "Feasible";
    case Feasibility::Infeasible: return "Infeasible";
    case Feasibility::Unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string tail(const std::string& text, std::size_t max_chars = 2000) {
  return text.size() <= max_chars ? text : "..." + text.substr(text.size() - max_chars);
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf" || s == "+inf" || s == "Inf") return kInf;
  if (s == "-inf" || s == "-Inf") return -kInf;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

bool on_path(const std::string& exe) {
  if (exe.find('/') != std::string::npos) return ::access(exe.c_str(), X_OK) == 0;
  const std::string path = env_or("PATH", "");
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (!dir.empty() && ::access((fs::path(dir) / exe).c_str(), X_OK) == 0) return true;
  }
  return false;
}

struct ChildOutcome {
  int exit_code = -1;
  bool killed = false;
};

/// Runs argv with stdout and stderr sent to `log`. Kills it after `deadline_s`.
ChildOutcome run_child(const std::vector<std::string>& argv, const fs::path& log,
                       double deadline_s) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::SolverNotFound, "solver_backend.solve",
                "cannot start " + argv[0] + ": " + std::strerror(rc));
  }

  ChildOutcome out;
  const auto start = std::chrono::steady_clock::now();
  auto pause = std::chrono::milliseconds(1);
  int status = 0;
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      throw Error(ErrorCode::SolverCrashed, "solver_backend.solve", "waitpid failed");
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > deadline_s && !out.killed) {
      ::kill(pid, SIGKILL);
      out.killed = true;
    }
    std::this_thread::sleep_for(pause);
    if (pause < std::chrono::milliseconds(20)) pause *= 2;
  }
  if (WIFEXITED(status)) out.exit_code = WEXITSTATUS(status);
  else out.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  return out;
}

/// A private working directory, removed on destruction unless user-supplied.
class WorkDir {
 public:
  explicit WorkDir(const fs::path& requested) {
    if (!requested.empty()) {
      fs::create_directories(requested);
      static std::atomic<unsigned> counter{0};
      path_ = requested / ("solve-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter++));
      fs::create_directories(path_);
      keep_ = true;
      return;
    }
    std::string tmpl = (fs::temp_directory_path() / "evfleet-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) {
      throw Error(ErrorCode::SolverCrashed, "solver_backend.solve", "cannot create temp dir");
    }
    path_ = tmpl;
  }
  ~WorkDir() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  WorkDir(const WorkDir&) = delete;
  WorkDir& operator=(const WorkDir&) = delete;

  const fs::path& path() const { return path_; }
  bool kept() const { return keep_; }

 private:
  fs::path path_;
  bool keep_ = false;
};

/// Rows of a model with no columns are constants; decide them here.
SolveResult trivial_solve(const MilpModel& model) {
  SolveResult r;
  r.engine = "none";
  r.status = SolveStatus::Optimal;
  for (const auto& row : model.constraints()) {
    const bool ok = row.sense == RowSense::LessEqual  ? 0.0 <= row.rhs + kFeasTol
                    : row.sense == RowSense::Equal    ? std::fabs(row.rhs) <= kFeasTol
                                                      : 0.0 >= row.rhs - kFeasTol;
    if (!ok) {
      r.status = SolveStatus::Infeasible;
      r.message = "constant row " + row.name + " is violated";
      break;
    }
  }
  return r;
}

void map_values(SolveResult& r, const MilpModel& model,
                const std::vector<std::pair<std::string, double>>& named, const char* where) {
  if (named.empty()) return;
  r.values.assign(model.num_vars(), std::nan(""));
  for (const auto& [name, v] : named) {
    const auto c = model.find(name);
    if (c == MilpModel::npos) continue;  // e.g. row activity lines
    r.values[c] = v;
  }
  for (std::size_t c = 0; c < r.values.size(); ++c) {
    if (std::isnan(r.values[c])) {
      throw Error(ErrorCode::ParseError, where, "no value for " + model.variables()[c].name);
    }
  }
}

void check_incumbent(SolveResult& r, const MilpModel& model) {
  if (!r.has_incumbent()) return;
  const auto rep = check_solution(model, r.values);
  if (!rep.feasible()) {
    throw Error(ErrorCode::IncumbentRejected, "solver_backend.solve",
                "incumbent from " + r.engine + " fails verification: " + rep.summary(3));
  }
}

std::string job_stem(std::size_t n) { return "m" + std::to_string(n); }

std::vector<SolveResult> run_shim(const std::vector<const MilpModel*>& models,
                                  const std::vector<std::size_t>& todo, const SolverConfig& cfg,
                                  const std::string& engine, WorkDir& dir) {
  std::vector<SolveResult> out(todo.size());
  const fs::path jobs = dir.path() / "jobs.txt";
  {
    std::ofstream jf(jobs);
    for (std::size_t n = 0; n < todo.size(); ++n) {
      const fs::path mps = dir.path() / (job_stem(n) + ".mps");
      write_mps(mps, *models[todo[n]]);
      jf << mps.string() << '\t' << (dir.path() / (job_stem(n) + ".sol")).string() << '\n';
    }
  }
  const std::string python = env_or("EVFLEET_PYTHON", EVFLEET_DEFAULT_PYTHON);
  const std::string shim = env_or("EVFLEET_SHIM", EVFLEET_DEFAULT_SHIM);
  if (!fs::exists(shim)) {
    throw Error(ErrorCode::SolverNotFound, "solver_backend.solve", "solver shim not found at " + shim);
  }
  std::ostringstream gap, tl;
  gap.precision(17);
  tl.precision(17);
  gap << cfg.mip_rel_gap;
  tl << cfg.time_limit_s;
  const fs::path log = dir.path() / "solver.log";
  const double deadline = (cfg.time_limit_s * 1.5 + 60.0) * static_cast<double>(todo.size());
  const auto child = run_child({python, shim, "--engine", engine, "--jobs", jobs.string(),
                                "--time-limit", tl.str(), "--gap", gap.str(), "--threads",
                                std::to_string(cfg.threads), "--seed", std::to_string(cfg.seed)},
                               log, deadline);
  const std::string log_text = read_text(log);
  if (child.exit_code == 3 || child.exit_code == 127) {
    throw Error(ErrorCode::SolverNotFound, "solver_backend.solve", tail(log_text, 400));
  }
  if (child.killed || child.exit_code != 0) {
    throw Error(ErrorCode::SolverCrashed, "solver_backend.solve",
                "solver process exited with code " + std::to_string(child.exit_code) +
                    (child.killed ? " after being killed" : "") + "\n" + tail(log_text));
  }
  for (std::size_t n = 0; n < todo.size(); ++n) {
    const fs::path sol = dir.path() / (job_stem(n) + ".sol");
    if (!fs::exists(sol)) {
      throw Error(ErrorCode::SolverCrashed, "solver_backend.solve",
                  "no solution file for job " + std::to_string(n) + "\n" + tail(log_text));
    }
    out[n] = parse_shim_solution(read_text(sol), *models[todo[n]]);
    if (dir.kept()) out[n].log_path = log;
  }
  return out;
}

std::string find_highs() {
  const std::string exe = env_or("EVFLEET_HIGHS", "highs");
  return on_path(exe) ? exe : std::string();
}

SolveResult run_highs_cli(const MilpModel& model, const SolverConfig& cfg, WorkDir& dir,
                          std::size_t n) {
  const std::string exe = find_highs();
  if (exe.empty()) {
    throw Error(ErrorCode::SolverNotFound, "solver_backend.solve", "no highs binary found");
  }
  const fs::path mps = dir.path() / (job_stem(n) + ".mps");
  const fs::path sol = dir.path() / (job_stem(n) + ".sol");
  const fs::path opts = dir.path() / (job_stem(n) + ".opt");
  const fs::path log = dir.path() / (job_stem(n) + ".log");
  write_mps(mps, model);
  {
    std::ofstream of(opts);
    of.precision(17);
    of << "mip_rel_gap = " << cfg.mip_rel_gap << "\nthreads = " << cfg.threads
       << "\nrandom_seed = " << (cfg.seed % 2147483647ULL)
       << "\nprimal_feasibility_tolerance = 1e-9\nmip_feasibility_tolerance = 1e-7"
       << "\nwrite_solution_style = 0\n";
  }
  std::ostringstream tl;
  tl.precision(17);
  tl << cfg.time_limit_s;
  const auto t0 = std::chrono::steady_clock::now();
  const auto child = run_child({exe, "--model_file", mps.string(), "--options_file", opts.string(),
                                "--solution_file", sol.string(), "--time_limit", tl.str()},
                               log, cfg.time_limit_s * 1.5 + 60.0);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string log_text = read_text(log);
  if (child.killed || child.exit_code > 1 || !fs::exists(sol)) {
    throw Error(ErrorCode::SolverCrashed, "solver_backend.solve",
                "highs exited with code " + std::to_string(child.exit_code) + "\n" + tail(log_text));
  }
  SolveResult r = parse_highs_solution(read_text(sol), model);
  r.wall_time_s = wall;
  // The solution file carries no dual bound; the log summary does.
  std::istringstream ls(log_text);
  std::string line;
  while (std::getline(ls, line)) {
    std::istringstream ws(line);
    std::string a, b, v;
    ws >> a >> b >> v;
    if (a == "Dual" && b == "bound") {
      try {
        r.bound = parse_num(v);
      } catch (const std::exception&) {
      }
    }
  }
  if (r.has_incumbent() && r.bound != 0.0 && std::isfinite(r.bound)) {
    r.gap = std::fabs(r.objective - r.bound) / std::max(std::fabs(r.objective), 1e-10);
  }
  if (dir.kept()) r.log_path = log;
  return r;
}

std::once_flag g_auto_once;
std::string g_auto_backend;

}  // namespace

std::string resolve_backend(const SolverConfig& cfg) {
  std::string id = cfg.solver;
  if (id.empty() || id == "auto") id = env_or("EVFLEET_SOLVER", "auto");
  if (id == "highspy" || id == "scipy" || id == "highs") return id;
  if (id != "auto") {
    throw Error(ErrorCode::InvalidArgument, "solver_backend.resolve_backend",
                "unknown solver '" + id + "' (expected auto, highspy, scipy or highs)");
  }
  std::call_once(g_auto_once, [] {
    // The shim picks highspy or scipy itself; fall back to a highs binary only
    // when Python is unusable.
    const std::string python = env_or("EVFLEET_PYTHON", EVFLEET_DEFAULT_PYTHON);
    const std::string shim = env_or("EVFLEET_SHIM", EVFLEET_DEFAULT_SHIM);
    if (on_path(python) && fs::exists(shim)) g_auto_backend = "auto";
    else if (!find_highs().empty()) g_auto_backend = "highs";
    else g_auto_backend = "auto";
  });
  return g_auto_backend;
}

SolveResult parse_shim_solution(const std::string& text, const MilpModel& model) {
  constexpr const char* where = "solver_backend.parse_solution";
  SolveResult r;
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, double>> named;
  bool saw_status = false;
  std::size_t expect = 0;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto sp = line.find(' ');
      const std::string key = line.substr(0, sp);
      const std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (key == "engine") r.engine = val;
      else if (key == "message") r.message = val;
      else if (key == "status") {
        saw_status = true;
        if (val == "Optimal") r.status = SolveStatus::Optimal;
        else if (val == "Feasible") r.status = SolveStatus::Feasible;
        else if (val == "Infeasible") r.status = SolveStatus::Infeasible;
        else if (val == "TimeLimit") r.status = SolveStatus::TimeLimit;
        else if (val == "Error") r.status = SolveStatus::Error;
        else throw Error(ErrorCode::ParseError, where, "unknown status '" + val + "'");
      } else if (key == "objective") r.objective = parse_num(val);
      else if (key == "bound") r.bound = parse_num(val);
      else if (key == "gap") r.gap = parse_num(val);
      else if (key == "wall_time") r.wall_time_s = parse_num(val);
      else if (key == "values") {
        expect = static_cast<std::size_t>(std::stoul(val));
        for (std::size_t n = 0; n < expect; ++n) {
          if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, where, "truncated values");
          const auto s2 = line.rfind(' ');
          if (s2 == std::string::npos) throw Error(ErrorCode::ParseError, where, "bad value line");
          named.emplace_back(line.substr(0, s2), parse_num(line.substr(s2 + 1)));
        }
      } else {
        throw Error(ErrorCode::ParseError, where, "unexpected line '" + line + "'");
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, where, "bad number in '" + line + "'");
  }
  if (!saw_status) throw Error(ErrorCode::ParseError, where, "missing status line");
  map_values(r, model, named, where);
  if (r.status == SolveStatus::Optimal && !r.has_incumbent() && model.num_vars() > 0) {
    throw Error(ErrorCode::ParseError, where, "optimal status without values");
  }
  if (!r.has_incumbent()) {
    r.objective = std::nan("");
  }
  return r;
}

SolveResult parse_highs_solution(const std::string& text, const MilpModel& model) {
  constexpr const char* where = "solver_backend.parse_solution";
  SolveResult r;
  r.engine = "highs";
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, double>> named;
  bool saw_status = false;
  try {
    while (std::getline(in, line)) {
      if (line == "Model status") {
        std::getline(in, line);
        saw_status = true;
        if (line == "Optimal") r.status = SolveStatus::Optimal;
        else if (line == "Infeasible" || line == "Primal infeasible or unbounded")
          r.status = SolveStatus::Infeasible;
        else if (line == "Time limit reached") r.status = SolveStatus::TimeLimit;
        else r.status = SolveStatus::Feasible;  // refined below once values are known
        r.message = line;
      } else if (line.rfind("Objective ", 0) == 0) {
        r.objective = parse_num(line.substr(10));
      } else if (line.rfind("# Columns ", 0) == 0) {
        const auto n = static_cast<std::size_t>(std::stoul(line.substr(10)));
        for (std::size_t c = 0; c < n; ++c) {
          if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, where, "truncated columns");
          const auto sp = line.rfind(' ');
          named.emplace_back(line.substr(0, sp), parse_num(line.substr(sp + 1)));
        }
      } else if (line == "# Dual solution values") {
        break;
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, where, "bad number in '" + line + "'");
  }
  if (!saw_status) throw Error(ErrorCode::ParseError, where, "missing model status");
  map_values(r, model, named, where);
  if (r.status == SolveStatus::Feasible && !r.has_incumbent()) r.status = SolveStatus::Error;
  if (r.status == SolveStatus::Optimal) r.bound = r.objective;
  if (!r.has_incumbent()) r.objective = std::nan("");
  return r;
}

std::vector<SolveResult> solve_batch(const std::vector<const MilpModel*>& models,
                                     const SolverConfig& cfg) {
  cfg.validate();
  std::vector<SolveResult> out(models.size());
  std::vector<std::size_t> todo;
  for (std::size_t n = 0; n < models.size(); ++n) {
    if (models[n]->num_vars() == 0) out[n] = trivial_solve(*models[n]);
    else todo.push_back(n);
  }
  if (todo.empty()) return out;

  const std::string backend = resolve_backend(cfg);
  WorkDir dir(cfg.work_dir);
  std::vector<SolveResult> solved;
  if (backend == "highs") {
    for (std::size_t n = 0; n < todo.size(); ++n)
      solved.push_back(run_highs_cli(*models[todo[n]], cfg, dir, n));
  } else {
    solved = run_shim(models, todo, cfg, backend, dir);
  }
  for (std::size_t n = 0; n < todo.size(); ++n) {
    if (cfg.check_incumbents) check_incumbent(solved[n], *models[todo[n]]);
    out[todo[n]] = std::move(solved[n]);
  }
  return out;
}

SolveResult solve(const MilpModel& model, const SolverConfig& cfg) {
  return std::move(solve_batch({&model}, cfg).front());
}

namespace {

FeasibilityResult to_feasibility(SolveResult r) {
  FeasibilityResult f;
  f.wall_time_s = r.wall_time_s;
  if (r.status == SolveStatus::Infeasible) {
    f.status = Feasibility::Infeasible;
  } else if (r.has_incumbent() || (r.status == SolveStatus::Optimal)) {
    f.status = Feasibility::Feasible;
    f.values = std::move(r.values);
  } else if (r.status == SolveStatus::Error) {
    throw Error(ErrorCode::SolverCrashed, "solver_backend.solve_feasibility",
                "solver reported an error: " + r.message);
  }
  return f;
}

MilpModel without_objective(const MilpModel& model) {
  MilpModel copy = model;
  for (std::size_t c = 0; c < copy.num_vars(); ++c) copy.set_objective(c, 0.0);
  return copy;
}

}  // namespace

std::vector<FeasibilityResult> solve_feasibility_batch(const std::vector<const MilpModel*>& models,
                                                        const SolverConfig& cfg) {
  std::vector<MilpModel> stripped;
  stripped.reserve(models.size());
  for (const auto* m : models) stripped.push_back(without_objective(*m));
  std::vector<const MilpModel*> ptrs;
  for (const auto& m : stripped) ptrs.push_back(&m);
  std::vector<FeasibilityResult> out;
  for (auto& r : solve_batch(ptrs, cfg)) out.push_back(to_feasibility(std::move(r)));
  return out;
}

FeasibilityResult solve_feasibility(const MilpModel& model, const SolverConfig& cfg) {
  return std::move(solve_feasibility_batch({&model}, cfg).front());
}

}  // namespace evfleet
