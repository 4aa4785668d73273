#include "gradsat/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gradsat/bench.hpp"
#include "gradsat/bool_abs.hpp"
#include "gradsat/engine.hpp"
#include "gradsat/ir.hpp"
#include "gradsat/sat.hpp"

namespace gradsat {
namespace {

using json = nlohmann::json;

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::vector<double> parse_schedule(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::runtime_error("bad sharpness schedule entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("empty sharpness schedule");
  return out;
}

struct BenchOpts {
  std::string bench;
  int steps = 25;
  double dt = 1.0;
  double dwell = 20.0;
  std::string task = "landing";
  std::string physics;
};

void add_bench_opts(CLI::App* cmd, BenchOpts& o) {
  cmd->add_option("--bench", o.bench, "Generate a built-in benchmark instead of reading a file")
      ->check(CLI::IsMember({"staircase", "thermostat", "pointcar", "quad"}));
  cmd->add_option("--steps", o.steps, "Unrolling horizon in steps")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", o.dt, "Step length in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--dwell", o.dwell, "Minimum mode dwell time (thermostat)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--task", o.task, "Task variant (quad)")
      ->check(CLI::IsMember({"landing", "obstacle"}));
  cmd->add_option("--physics", o.physics, "Physics constants JSON (partial overrides)");
}

BenchInfo build_bench(const BenchOpts& o) {
  PhysicsConfig phys = o.physics.empty() ? PhysicsConfig{} : PhysicsConfig::load(o.physics);
  return make_bench(o.bench, o.steps, o.dt, o.dwell, o.task, phys);
}

const char* status_name(EngineResult::Status s) {
  switch (s) {
    case EngineResult::Status::Sat: return "sat";
    case EngineResult::Status::Unsat: return "unsat";
    default: return "unknown";
  }
}

json report_json(const Program& p, const EngineResult& res) {
  json rep;
  rep["status"] = status_name(res.status);
  rep["verified"] = res.verified;
  if (res.status == EngineResult::Status::Sat) {
    json reals = json::object();
    for (std::size_t i = 0; i < p.reals.size(); ++i) reals[p.reals[i].name] = res.assignment.reals[i];
    json bools = json::object();
    for (std::size_t i = 0; i < p.bools.size(); ++i)
      bools[p.bools[i]] = res.assignment.bools[i] != 0;
    rep["assignment"] = {{"reals", reals}, {"bools", bools}};
  }
  const EngineStats& st = res.stats;
  rep["stats"] = {{"numeric_calls", st.numeric_calls},
                  {"restarts", st.restarts},
                  {"wall_ms", st.wall_ms},
                  {"soft_conflicts", st.soft_conflicts},
                  {"suggestion_rounds", st.suggestion_rounds},
                  {"merit_evals", st.merit_evals},
                  {"final_residual", st.final_residual},
                  {"sat", {{"decisions", st.sat.decisions},
                           {"propagations", st.sat.propagations},
                           {"conflicts", st.sat.conflicts},
                           {"soft_conflicts_added", st.sat.soft_conflicts_added},
                           {"learnt_hard", st.sat.learnt_hard},
                           {"learnt_soft", st.sat.learnt_soft},
                           {"reductions", st.sat.reductions},
                           {"restarts", st.sat.restarts}}}};
  return rep;
}

int cmd_solve(const BenchOpts& bo, const std::string& input, const EngineConfig& cfg_in,
              const std::string& schedule, const std::string& report_path,
              const std::string& traj_path) {
  BenchInfo bench;
  const Program* prog = nullptr;
  Program parsed;
  if (!bo.bench.empty()) {
    bench = build_bench(bo);
    prog = &bench.program;
  } else {
    parsed = parse_program(slurp(input.empty() ? "-" : input));
    prog = &parsed;
  }

  EngineConfig cfg = cfg_in;
  if (!schedule.empty()) cfg.opt.beta_schedule = parse_schedule(schedule);

  Engine eng(*prog, cfg);
  EngineResult res = eng.run();

  std::cout << "status: " << status_name(res.status)
            << (res.status == EngineResult::Status::Sat
                    ? (res.verified ? " (verified)" : " (unverified)")
                    : "")
            << "\n";
  if (res.status == EngineResult::Status::Sat) {
    for (std::size_t i = 0; i < prog->reals.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.9g", res.assignment.reals[i]);
      std::cout << "  " << prog->reals[i].name << " = " << buf << "\n";
    }
    for (std::size_t i = 0; i < prog->bools.size(); ++i)
      std::cout << "  " << prog->bools[i] << " = "
                << (res.assignment.bools[i] ? "true" : "false") << "\n";
  }
  std::cout << "stats: numeric_calls=" << res.stats.numeric_calls
            << " restarts=" << res.stats.restarts
            << " soft_conflicts=" << res.stats.soft_conflicts
            << " wall_ms=" << res.stats.wall_ms << "\n";

  if (!report_path.empty()) spill(report_path, report_json(*prog, res).dump(2) + "\n");
  if (!traj_path.empty()) {
    if (bo.bench.empty()) throw std::runtime_error("--traj needs --bench");
    if (res.status != EngineResult::Status::Sat)
      throw std::runtime_error("--traj needs a sat result");
    spill(traj_path, trajectory_csv(bench, res.assignment));
  }

  switch (res.status) {
    case EngineResult::Status::Sat: return kExitSat;
    case EngineResult::Status::Unsat: return kExitUnsat;
    default: return kExitUnknown;
  }
}

int cmd_emit(const BenchOpts& bo, const std::string& input, const std::string& out,
             bool as_cnf, bool dump_physics) {
  if (dump_physics) {
    PhysicsConfig phys = bo.physics.empty() ? PhysicsConfig{} : PhysicsConfig::load(bo.physics);
    spill(out, phys.dump());
    return kExitSat;
  }
  Program prog;
  if (!bo.bench.empty()) {
    prog = build_bench(bo).program;
  } else {
    prog = parse_program(slurp(input.empty() ? "-" : input));
  }
  if (as_cnf)
    spill(out, abstract_bool(prog).to_dimacs());
  else
    spill(out, prog.print());
  return kExitSat;
}

int cmd_sat(const std::string& input) {
  CnfProblem cnf = parse_dimacs(slurp(input));
  sat::Solver solver;
  solver.init(cnf);
  sat::SolveResult r = solver.solve_incremental();
  const auto& st = solver.stats();
  std::cout << "c decisions " << st.decisions << "\n"
            << "c propagations " << st.propagations << "\n"
            << "c conflicts " << st.conflicts << "\n";
  if (r.status == sat::SolveStatus::Unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return kExitUnsat;
  }
  std::cout << "s SATISFIABLE\n";
  std::string line = "v";
  for (PropVar v = 1; v <= cnf.num_vars; ++v) {
    line += ' ';
    if (solver.value_dimacs(v) == sat::LBool::False) line += '-';
    line += std::to_string(v);
    if (line.size() > 72) {
      std::cout << line << "\n";
      line = "v";
    }
  }
  std::cout << line << " 0\n";
  return kExitSat;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Constraint-coupled program synthesizer: gradient search over a "
               "smoothed program semantics steered by an incremental SAT core"};
  app.require_subcommand(1);

  BenchOpts bo;
  std::string input, schedule, report_path, traj_path;
  EngineConfig cfg;
  // Command-line posture: keep restarting on dead ends until the wall clock
  // runs out. Library embedders pick their own bounds via EngineConfig.
  cfg.restart_limit = 1000000000;
  cfg.timeout_sec = 1800.0;

  CLI::App* solve = app.add_subcommand("solve", "Search for a satisfying assignment");
  solve->add_option("input", input, "Program file in s-expression form ('-' = stdin)");
  add_bench_opts(solve, bo);
  solve->add_option("--eta", cfg.eta,
                    "Record a pruning conflict only when more than eta interface entries are pinned");
  solve->add_option("--restart-limit", cfg.restart_limit,
                    "Full restarts after a soft-conflict dead end");
  solve->add_option("--timeout", cfg.timeout_sec, "Wall-clock limit in seconds (0 = unlimited)");
  solve->add_option("--seed", cfg.opt.seed, "Base seed for the numerical phase");
  solve->add_option("--beta-schedule", schedule,
                    "Comma-separated sharpness continuation stages, e.g. 1,5,25,125");
  solve->add_option("--eps", cfg.opt.eps, "Feasibility slack: constraints mean expr >= -eps");
  solve->add_flag("--baseline-smoothing", cfg.baseline,
                  "Disable the SAT coupling; run independent smoothing trials only");
  solve->add_option("--restarts", cfg.baseline_restarts,
                    "Number of baseline smoothing trials (with --baseline-smoothing)");
  solve->add_flag("--atoms-only", cfg.interface_atoms_only,
                  "Restrict the numeric/SAT interface to predicate atoms and unknowns");
  solve->add_option("--report", report_path, "Write a JSON result report");
  solve->add_option("--traj", traj_path, "Write the solution trajectory CSV (benchmarks only)");
  solve->add_option("--trace", cfg.trace_path, "Write a JSON-lines engine event log");

  std::string emit_out = "-";
  bool as_cnf = false, dump_physics = false;
  CLI::App* emit = app.add_subcommand("emit", "Print a program or its propositional skeleton");
  emit->add_option("input", input, "Program file in s-expression form ('-' = stdin)");
  add_bench_opts(emit, bo);
  emit->add_option("--out", emit_out, "Output file ('-' = stdout)");
  emit->add_flag("--cnf", as_cnf, "Emit the Boolean skeleton as DIMACS CNF");
  emit->add_flag("--dump-physics", dump_physics, "Emit the physics constants as JSON");

  std::string cnf_input;
  CLI::App* satc = app.add_subcommand("sat", "Run the plain CDCL core on a DIMACS file");
  satc->add_option("input", cnf_input, "DIMACS CNF file ('-' = stdin)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(bo, input, cfg, schedule, report_path, traj_path);
    if (emit->parsed()) return cmd_emit(bo, input, emit_out, as_cnf, dump_physics);
    return cmd_sat(cnf_input);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace gradsat
