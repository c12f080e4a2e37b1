#include "weftsched/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "weftsched/codegen.hpp"
#include "weftsched/costnorm.hpp"
#include "weftsched/modsched.hpp"
#include "weftsched/sim.hpp"
#include "weftsched/solverio.hpp"
#include "weftsched/straightline.hpp"
#include "weftsched/viz.hpp"

namespace weftsched {

namespace {

using json = nlohmann::json;

// flag-combination errors that CLI11 cannot catch; mapped to exit 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Problem load_problem(const std::string& path) {
  Problem p = parse_problem(slurp(path));
  auto diags = validate_graph(p.graph, p.machine);
  if (!diags.empty()) {
    std::string msg = "invalid problem " + path + ":";
    for (const Diagnostic& d : diags) msg += "\n  " + d.code + ": " + d.message;
    throw std::runtime_error(msg);
  }
  return p;
}

// precedence: --solver flag, then WEFTSCHED_SOLVER, then the internal search
std::string resolve_solver(const std::string& flag) {
  std::string sel = flag.empty() ? external_solver_from_env() : flag;
  if (sel.empty() || sel == "internal") return "";
  if (sel.rfind("external:", 0) == 0) {
    std::string cmd = sel.substr(9);
    if (cmd.empty()) throw UsageError("--solver external: needs a command");
    return cmd;
  }
  if (!flag.empty())
    throw UsageError("--solver must be internal or external:<command>");
  return sel;  // env var carries a bare command
}

std::int64_t eff_cycles(const Node& n) {
  return std::max<std::int64_t>(1, n.rrt.cycles);
}

}  // namespace

std::string solution_to_json(const JointSolution& sol, const DepGraph& g,
                             const std::vector<SearchAttempt>& attempts) {
  json j;
  j["I"] = sol.schedule.initiation_interval;
  j["L"] = sol.schedule.length;
  json m = json::object(), a = json::object();
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    m[g.nodes[v].id] = sol.schedule.assignments[v];
    a[g.nodes[v].id] = v < sol.warp_start.size() ? sol.warp_start[v] : 0;
  }
  j["M"] = std::move(m);
  j["A"] = std::move(a);
  j["streaming_depths"] = sol.streaming_depths;
  json report = json::array();
  for (const SearchAttempt& at : attempts) {
    json r;
    r["I"] = at.ii;
    if (at.length)
      r["L"] = *at.length;
    else
      r["L"] = nullptr;
    r["outcome"] = at.outcome;
    report.push_back(std::move(r));
  }
  j["search_report"] = std::move(report);
  return j.dump(2) + "\n";
}

ParsedSolution solution_from_json(const std::string& text, const DepGraph& g) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid solution JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("solution JSON must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "I" && k != "L" && k != "M" && k != "A" &&
        k != "streaming_depths" && k != "search_report")
      throw std::invalid_argument("unknown solution key: " + k);
  }
  if (!j.contains("I") || !j["I"].is_number_integer() || j["I"].get<std::int64_t>() < 1)
    throw std::invalid_argument("solution needs a positive integer I");
  if (!j.contains("L") || !j["L"].is_number_integer() || j["L"].get<std::int64_t>() < 1)
    throw std::invalid_argument("solution needs a positive integer L");
  if (!j.contains("M") || !j["M"].is_object())
    throw std::invalid_argument("solution needs an M object");

  ParsedSolution ps;
  ps.schedule.initiation_interval = j["I"].get<std::int64_t>();
  ps.schedule.length = j["L"].get<std::int64_t>();
  ps.schedule.assignments.assign(g.nodes.size(), 0);
  ps.warp_start.assign(g.nodes.size(), 0);

  for (auto it = j["M"].begin(); it != j["M"].end(); ++it) {
    int v = g.node_index(it.key());
    if (v < 0) throw std::invalid_argument("M names unknown node " + it.key());
    if (!it.value().is_number_integer())
      throw std::invalid_argument("M[" + it.key() + "] must be an integer");
    ps.schedule.assignments[static_cast<std::size_t>(v)] = it.value().get<std::int64_t>();
  }
  if (j["M"].size() != g.nodes.size())
    throw std::invalid_argument("M must cover every node exactly once");
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    std::int64_t t = ps.schedule.assignments[v];
    if (t < 0 || t > ps.schedule.length - eff_cycles(g.nodes[v]))
      throw std::invalid_argument("M[" + g.nodes[v].id + "] = " + std::to_string(t) +
                                  " does not fit in L");
  }
  if (j.contains("A")) {
    if (!j["A"].is_object()) throw std::invalid_argument("A must be an object");
    for (auto it = j["A"].begin(); it != j["A"].end(); ++it) {
      int v = g.node_index(it.key());
      if (v < 0) throw std::invalid_argument("A names unknown node " + it.key());
      if (!it.value().is_number_integer())
        throw std::invalid_argument("A[" + it.key() + "] must be an integer");
      ps.warp_start[static_cast<std::size_t>(v)] = it.value().get<int>();
    }
  }
  if (j.contains("streaming_depths")) {
    if (!j["streaming_depths"].is_object())
      throw std::invalid_argument("streaming_depths must be an object");
    for (auto it = j["streaming_depths"].begin(); it != j["streaming_depths"].end(); ++it)
      ps.streaming_depths[it.key()] = it.value().get<std::int64_t>();
  }
  return ps;
}

namespace {

// solution files carry only (M, A); the graph the tables expand against is
// the streamed one whenever streaming depths were recorded
std::pair<DepGraph, JointSolution> reconstruct(const Problem& p,
                                               const ParsedSolution& ps) {
  DepGraph g = p.graph;
  if (!ps.streaming_depths.empty()) g = apply_streaming_opt(p.graph).first;
  JointSolution sol = expand_solution(g, ps.schedule, ps.warp_start);
  sol.streaming_depths = ps.streaming_depths;
  return {std::move(g), std::move(sol)};
}

struct Output {
  std::string path;      // --output; empty writes to `fallback`
  std::ostream* fallback = nullptr;
  void write(const std::string& text) const {
    if (path.empty()) {
      (*fallback) << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
  }
};

json schedule_json(const ModuloSchedule& s, const DepGraph& g,
                   const MachineDesc& m) {
  json j;
  j["I"] = s.initiation_interval;
  j["L"] = s.length;
  json mm = json::object();
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    mm[g.nodes[v].id] = s.assignments[v];
  j["M"] = std::move(mm);
  auto rrt = modular_rrt(s, g, m);
  json rr = json::object();
  for (std::size_t f = 0; f < m.units.size(); ++f) rr[m.units[f].name] = rrt[f];
  j["modular_rrt"] = std::move(rr);
  StraightLineProgram q = build_straightline(s);
  json sl;
  sl["copies"] = q.copies;
  sl["horizon"] = q.horizon;
  sl["prologue_end"] = q.prologue_end;
  sl["steady_end"] = q.steady_end;
  json pl = json::object();
  for (std::size_t v = 0; v < g.nodes.size(); ++v) pl[g.nodes[v].id] = q.placements[v];
  sl["placements"] = std::move(pl);
  j["straightline"] = std::move(sl);
  return j;
}

int cmd_normalize(const std::string& file, std::int64_t resolution,
                  const Output& sink) {
  Problem p = load_problem(file);
  CostVector raw = collect_costs(p.graph);
  CostVector norm = normalize_costs(raw, resolution);
  Problem q{apply_normalization(p.graph, norm), p.machine};
  json j;
  j["problem"] = json::parse(serialize_problem(q));
  json map = json::object();
  for (std::size_t i = 0; i < raw.values.size(); ++i)
    map[std::to_string(raw.values[i])] = norm.values[i];
  j["cost_map"] = std::move(map);
  j["F"] = norm.achieved_distortion;
  sink.write(j.dump(2) + "\n");
  return 0;
}

int cmd_schedule(const std::string& file, std::int64_t ii, std::int64_t lmax,
                 const Output& sink, std::ostream& err) {
  Problem p = load_problem(file);
  ScheduleResult r;
  if (ii > 0) {
    r = modulo_schedule(p.graph, p.machine, ii, lmax);
  } else {
    std::int64_t lb = std::max(res_mii(p.graph, p.machine), rec_mii(p.graph));
    std::int64_t ceiling = 8 * lb;
    for (std::int64_t i = lb; i <= ceiling; ++i) {
      r = modulo_schedule(p.graph, p.machine, i, lmax);
      if (r.status == ScheduleStatus::feasible || r.status == ScheduleStatus::error)
        break;
    }
  }
  if (r.status == ScheduleStatus::error)
    throw std::runtime_error("scheduling failed: " + r.message);
  if (r.status != ScheduleStatus::feasible) {
    json j;
    j["status"] = "infeasible";
    if (ii > 0) j["I"] = ii;
    if (!r.message.empty()) j["message"] = r.message;
    sink.write(j.dump(2) + "\n");
    err << "no schedule" << (ii > 0 ? " at I=" + std::to_string(ii) : "") << "\n";
    return 1;
  }
  sink.write(schedule_json(r.schedule, p.graph, p.machine).dump(2) + "\n");
  return 0;
}

int cmd_joint(const std::string& file, std::int64_t max_ii, std::int64_t depth,
              const std::string& solver, const Output& sink, std::ostream& err) {
  Problem p = load_problem(file);
  SolveOptions opts;
  opts.external_command = resolve_solver(solver);
  JointSearchResult r = joint_search(p.graph, p.machine, max_ii, depth, opts);
  json report = json::array();
  for (const SearchAttempt& at : r.attempts) {
    json a;
    a["I"] = at.ii;
    if (at.length)
      a["L"] = *at.length;
    else
      a["L"] = nullptr;
    a["outcome"] = at.outcome;
    report.push_back(std::move(a));
  }
  if (r.status != JointStatus::sat) {
    json j;
    j["status"] = r.status == JointStatus::unsat ? "unsat" : "error";
    j["message"] = r.message;
    j["search_report"] = std::move(report);
    sink.write(j.dump(2) + "\n");
    err << r.message << "\n";
    return 1;
  }
  DepGraph scheduled = apply_streaming_opt(p.graph).first;
  sink.write(solution_to_json(r.solution, scheduled, r.attempts));
  return 0;
}

int cmd_codegen(const std::string& sol_file, const std::string& prob_file,
                const std::string& format, const Output& sink) {
  Problem p = load_problem(prob_file);
  ParsedSolution ps = solution_from_json(slurp(sol_file), p.graph);
  auto [g, sol] = reconstruct(p, ps);
  PipelinedProgram prog = synthesize(sol, g);
  if (format == "json")
    sink.write(program_to_json(prog));
  else
    sink.write(emit_listing(prog));
  return 0;
}

std::string trace_lines(const ExecutionTrace& tr, const DepGraph& g) {
  std::string s;
  for (const IssueRecord& rec : tr.issues)
    s += "@cycle " + std::to_string(rec.cycle) + "  " + g.nodes[rec.node].id +
         " iter " + std::to_string(rec.iteration) + "  warps [" +
         std::to_string(rec.warp_start) + ".." +
         std::to_string(rec.warp_start + rec.warp_count - 1) + "]\n";
  return s;
}

int cmd_sim(const std::string& prob_file, const std::string& sol_file,
            std::int64_t iters, bool trace, const Output& sink) {
  Problem p = load_problem(prob_file);
  ExecutionTrace tr;
  DepGraph g = p.graph;
  if (sol_file.empty()) {
    tr = simulate_inorder(p.graph, p.machine, iters);
  } else {
    ParsedSolution ps = solution_from_json(slurp(sol_file), p.graph);
    auto [g2, sol] = reconstruct(p, ps);
    g = g2;
    PipelinedProgram prog = synthesize(sol, g2);
    tr = simulate_pipeline(prog, g2, p.machine, iters);
  }
  std::string s;
  s += "iterations " + std::to_string(tr.iterations) + "\n";
  s += "cycles " + std::to_string(tr.cycles_elapsed) + "\n";
  s += "throughput " + std::to_string(tr.throughput_num) + "/" +
       std::to_string(tr.throughput_den) + "\n";
  s += "steady " + std::to_string(tr.steady_num) + "/" +
       std::to_string(tr.steady_den) + "\n";
  if (trace) s += trace_lines(tr, g);
  sink.write(s);
  return 0;
}

int cmd_validate(const std::string& sol_file, const std::string& prob_file,
                 const Output& sink) {
  Problem p = load_problem(prob_file);
  ParsedSolution ps = solution_from_json(slurp(sol_file), p.graph);
  auto [g, sol] = reconstruct(p, ps);
  auto vs = validate_program(sol, g, p.machine);
  if (vs.empty()) {
    sink.write("valid\n");
    return 0;
  }
  std::string s;
  for (const Violation& v : vs) s += v.family + ": " + v.message + "\n";
  sink.write(s);
  return 1;
}

int cmd_viz(const std::string& prob_file, const std::string& sol_file,
            const std::string& format, const Output& sink) {
  Problem p = load_problem(prob_file);
  if (format == "svg") {
    if (sol_file.empty())
      throw UsageError("viz --format svg needs --solution <file>");
    ParsedSolution ps = solution_from_json(slurp(sol_file), p.graph);
    auto [g, sol] = reconstruct(p, ps);
    sink.write(emit_gantt(sol, g, p.machine));
    return 0;
  }
  if (!sol_file.empty()) {
    ParsedSolution ps = solution_from_json(slurp(sol_file), p.graph);
    auto [g, sol] = reconstruct(p, ps);
    sink.write(emit_dot(g, &sol));
    return 0;
  }
  sink.write(emit_dot(p.graph));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"optimal modulo scheduling with joint warp specialization"};
  app.require_subcommand(1);

  std::string problem_file, solution_file, output_path, format = "text";
  std::string solver_flag;
  std::int64_t resolution = 300, ii = 0, lmax = 0, max_ii = 0, depth = 2,
               iters = 8;
  bool trace = false;

  auto add_output = [&](CLI::App* c) {
    c->add_option("--output", output_path, "write to a file instead of stdout");
  };

  CLI::App* normalize = app.add_subcommand("normalize", "normalize raw costs");
  normalize->add_option("problem", problem_file, "problem JSON")->required();
  normalize->add_option("--resolution", resolution, "resolution bound U");
  add_output(normalize);

  CLI::App* schedule = app.add_subcommand("schedule", "optimal modulo schedule");
  schedule->add_option("problem", problem_file, "problem JSON")->required();
  schedule->add_option("--ii", ii, "initiation interval (default: search)");
  schedule->add_option("--lmax", lmax, "schedule length bound");
  add_output(schedule);

  CLI::App* joint = app.add_subcommand("joint", "joint schedule and warp assignment");
  joint->add_option("problem", problem_file, "problem JSON")->required();
  joint->add_option("--max-ii", max_ii, "interval search ceiling");
  joint->add_option("--stream-depth", depth, "buffer depth for streamed loads");
  joint->add_option("--solver", solver_flag, "internal or external:<command>");
  add_output(joint);

  CLI::App* codegen = app.add_subcommand("codegen", "synthesize the pipelined program");
  codegen->add_option("solution", solution_file, "solution JSON")->required();
  codegen->add_option("problem", problem_file, "problem JSON")->required();
  codegen->add_option("--format", format, "text | json");
  add_output(codegen);

  CLI::App* sim = app.add_subcommand("sim", "simulate the loop");
  sim->add_option("problem", problem_file, "problem JSON")->required();
  sim->add_option("--solution", solution_file, "replay this solution");
  sim->add_option("--iters", iters, "iterations to run");
  sim->add_flag("--trace", trace, "print per-issue trace lines");
  add_output(sim);

  CLI::App* validate = app.add_subcommand("validate", "check a solution");
  validate->add_option("solution", solution_file, "solution JSON")->required();
  validate->add_option("problem", problem_file, "problem JSON")->required();
  add_output(validate);

  CLI::App* viz = app.add_subcommand("viz", "emit DOT or SVG visualizations");
  viz->add_option("problem", problem_file, "problem JSON")->required();
  viz->add_option("--solution", solution_file, "solution JSON for coloring");
  viz->add_option("--format", format, "dot | svg");
  add_output(viz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  Output sink{output_path, &out};
  try {
    if (app.got_subcommand(normalize))
      return cmd_normalize(problem_file, resolution, sink);
    if (app.got_subcommand(schedule))
      return cmd_schedule(problem_file, ii, lmax, sink, err);
    if (app.got_subcommand(joint))
      return cmd_joint(problem_file, max_ii, depth, solver_flag, sink, err);
    if (app.got_subcommand(codegen)) {
      if (format != "text" && format != "json")
        throw UsageError("codegen --format must be text or json");
      return cmd_codegen(solution_file, problem_file, format, sink);
    }
    if (app.got_subcommand(sim))
      return cmd_sim(problem_file, solution_file, iters, trace, sink);
    if (app.got_subcommand(validate))
      return cmd_validate(solution_file, problem_file, sink);
    if (app.got_subcommand(viz)) {
      std::string f = format == "text" ? "dot" : format;
      if (f != "dot" && f != "svg") throw UsageError("viz --format must be dot or svg");
      return cmd_viz(problem_file, solution_file, f, sink);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace weftsched
