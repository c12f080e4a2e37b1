// Python bindings. Problems and solutions travel as the same JSON documents
// the command line reads and writes; results come back as native dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "weftsched/cli.hpp"
#include "weftsched/codegen.hpp"
#include "weftsched/costnorm.hpp"
#include "weftsched/ir.hpp"
#include "weftsched/jointsolve.hpp"
#include "weftsched/modsched.hpp"
#include "weftsched/sim.hpp"
#include "weftsched/straightline.hpp"
#include "weftsched/viz.hpp"

namespace py = pybind11;
using namespace weftsched;

namespace {

Problem load(const std::string& text) { return parse_problem(text); }

std::pair<DepGraph, JointSolution> rebuild(const Problem& p,
                                           const ParsedSolution& ps) {
  DepGraph g = p.graph;
  if (!ps.streaming_depths.empty()) g = apply_streaming_opt(p.graph).first;
  JointSolution sol = expand_solution(g, ps.schedule, ps.warp_start);
  sol.streaming_depths = ps.streaming_depths;
  return {std::move(g), std::move(sol)};
}

py::dict schedule_to_dict(const ModuloSchedule& s, const DepGraph& g,
                          const MachineDesc& m) {
  py::dict out;
  out["I"] = s.initiation_interval;
  out["L"] = s.length;
  py::dict mm;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    mm[py::str(g.nodes[v].id)] = s.assignments[v];
  out["M"] = std::move(mm);
  py::dict rows;
  auto rrt = modular_rrt(s, g, m);
  for (std::size_t u = 0; u < m.units.size(); ++u)
    rows[py::str(m.units[u].name)] = rrt[u];
  out["modular_rrt"] = std::move(rows);
  StraightLineProgram q = build_straightline(s);
  py::dict sl;
  sl["copies"] = q.copies;
  sl["horizon"] = q.horizon;
  sl["prologue_end"] = q.prologue_end;
  sl["steady_end"] = q.steady_end;
  py::dict pl;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    pl[py::str(g.nodes[v].id)] = q.placements[v];
  sl["placements"] = std::move(pl);
  out["straightline"] = std::move(sl);
  return out;
}

py::dict py_schedule(const std::string& problem, std::int64_t ii,
                     std::int64_t lmax) {
  Problem p = load(problem);
  ScheduleResult r;
  if (ii > 0) {
    r = modulo_schedule(p.graph, p.machine, ii, lmax);
  } else {
    const std::int64_t lb =
        std::max(res_mii(p.graph, p.machine), rec_mii(p.graph));
    for (std::int64_t i = lb; i <= 8 * lb; ++i) {
      r = modulo_schedule(p.graph, p.machine, i, lmax);
      if (r.status == ScheduleStatus::feasible ||
          r.status == ScheduleStatus::error)
        break;
    }
  }
  if (r.status == ScheduleStatus::error)
    throw std::runtime_error("scheduling failed: " + r.message);
  if (r.status != ScheduleStatus::feasible) {
    py::dict out;
    out["status"] = "infeasible";
    if (ii > 0) out["I"] = ii;
    return out;
  }
  py::dict out = schedule_to_dict(r.schedule, p.graph, p.machine);
  out["status"] = "feasible";
  return out;
}

py::dict py_joint(const std::string& problem, std::int64_t max_ii,
                  std::int64_t stream_depth, const std::string& solver) {
  Problem p = load(problem);
  SolveOptions opts;
  if (!solver.empty() && solver != "internal") opts.external_command = solver;
  JointSearchResult r =
      joint_search(p.graph, p.machine, max_ii, stream_depth, opts);
  py::dict out;
  py::list report;
  for (const SearchAttempt& at : r.attempts) {
    py::dict a;
    a["I"] = at.ii;
    a["L"] = at.length ? py::cast(*at.length) : py::none();
    a["outcome"] = at.outcome;
    report.append(std::move(a));
  }
  out["search_report"] = std::move(report);
  if (r.status != JointStatus::sat) {
    out["status"] = r.status == JointStatus::unsat ? "unsat" : "error";
    out["message"] = r.message;
    return out;
  }
  DepGraph g = apply_streaming_opt(p.graph).first;
  out["status"] = "sat";
  out["I"] = r.solution.schedule.initiation_interval;
  out["L"] = r.solution.schedule.length;
  py::dict mm, aa;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    mm[py::str(g.nodes[v].id)] = r.solution.schedule.assignments[v];
    aa[py::str(g.nodes[v].id)] =
        v < r.solution.warp_start.size() ? r.solution.warp_start[v] : 0;
  }
  out["M"] = std::move(mm);
  out["A"] = std::move(aa);
  out["streaming_depths"] = r.solution.streaming_depths;
  out["solution_json"] = solution_to_json(r.solution, g, r.attempts);
  return out;
}

std::string py_codegen(const std::string& problem, const std::string& solution,
                       const std::string& fmt) {
  Problem p = load(problem);
  ParsedSolution ps = solution_from_json(solution, p.graph);
  auto [g, sol] = rebuild(p, ps);
  PipelinedProgram prog = synthesize(sol, g);
  if (fmt == "json") return program_to_json(prog);
  if (fmt != "text") throw std::invalid_argument("format must be text or json");
  return emit_listing(prog);
}

py::dict trace_to_dict(const ExecutionTrace& t) {
  py::dict out;
  out["iterations"] = t.iterations;
  out["cycles"] = t.cycles_elapsed;
  out["throughput"] = py::make_tuple(t.throughput_num, t.throughput_den);
  out["steady"] = py::make_tuple(t.steady_num, t.steady_den);
  py::list issues;
  for (const IssueRecord& r : t.issues) {
    py::dict d;
    d["node"] = r.node;
    d["iteration"] = r.iteration;
    d["cycle"] = r.cycle;
    d["warp_start"] = r.warp_start;
    d["warp_count"] = r.warp_count;
    issues.append(std::move(d));
  }
  out["issues"] = std::move(issues);
  return out;
}

py::dict py_simulate(const std::string& problem,
                     const std::optional<std::string>& solution,
                     std::int64_t iterations) {
  Problem p = load(problem);
  if (!solution) return trace_to_dict(simulate_inorder(p.graph, p.machine, iterations));
  ParsedSolution ps = solution_from_json(*solution, p.graph);
  auto [g, sol] = rebuild(p, ps);
  PipelinedProgram prog = synthesize(sol, g);
  return trace_to_dict(simulate_pipeline(prog, g, p.machine, iterations));
}

py::list py_validate(const std::string& problem, const std::string& solution) {
  Problem p = load(problem);
  ParsedSolution ps = solution_from_json(solution, p.graph);
  auto [g, sol] = rebuild(p, ps);
  py::list out;
  for (const Violation& v : validate_program(sol, g, p.machine))
    out.append(py::make_tuple(v.family, v.message));
  return out;
}

std::string py_dot(const std::string& problem,
                   const std::optional<std::string>& solution) {
  Problem p = load(problem);
  if (!solution) return emit_dot(p.graph);
  ParsedSolution ps = solution_from_json(*solution, p.graph);
  auto [g, sol] = rebuild(p, ps);
  return emit_dot(g, &sol);
}

std::string py_gantt(const std::string& problem, const std::string& solution) {
  Problem p = load(problem);
  ParsedSolution ps = solution_from_json(solution, p.graph);
  auto [g, sol] = rebuild(p, ps);
  return emit_gantt(sol, g, p.machine);
}

py::dict py_normalize(const std::string& problem, std::int64_t resolution) {
  Problem p = load(problem);
  CostVector raw = collect_costs(p.graph);
  CostVector norm = normalize_costs(raw, resolution);
  py::dict out;
  out["problem"] = serialize_problem({apply_normalization(p.graph, norm),
                                      p.machine});
  py::dict map;
  for (std::size_t i = 0; i < raw.values.size(); ++i)
    map[py::cast(raw.values[i])] = norm.values[i];
  out["cost_map"] = std::move(map);
  out["F"] = norm.achieved_distortion;
  return out;
}

}  // namespace

PYBIND11_MODULE(_weftsched, m) {
  m.doc() = "modulo scheduling with joint warp specialization";
  m.def("normalize", &py_normalize, py::arg("problem"),
        py::arg("resolution") = 300,
        "Normalize the problem's durations; returns the rewritten problem "
        "JSON, the cost map, and the achieved distortion F.");
  m.def("schedule", &py_schedule, py::arg("problem"), py::arg("ii") = 0,
        py::arg("lmax") = 0,
        "Optimal modulo schedule at a fixed interval, or at the smallest "
        "feasible interval when ii is 0.");
  m.def("joint", &py_joint, py::arg("problem"), py::arg("max_ii") = 0,
        py::arg("stream_depth") = 2, py::arg("solver") = std::string(),
        "Minimal-interval joint schedule and warp assignment. solver is "
        "empty or \"internal\" for the built-in solver, otherwise an "
        "external solver command.");
  m.def("codegen", &py_codegen, py::arg("problem"), py::arg("solution"),
        py::arg("fmt") = "text",
        "Render the pipelined program for a solution JSON document.");
  m.def("simulate", &py_simulate, py::arg("problem"),
        py::arg("solution") = py::none(), py::arg("iterations") = 8,
        "In-order baseline when no solution is given, otherwise the "
        "pipelined replay.");
  m.def("validate", &py_validate, py::arg("problem"), py::arg("solution"),
        "List of (family, message) violations; empty when the solution is "
        "exact.");
  m.def("dot", &py_dot, py::arg("problem"), py::arg("solution") = py::none(),
        "Graphviz rendering of the dependence graph, warp-colored when a "
        "solution is given.");
  m.def("gantt", &py_gantt, py::arg("problem"), py::arg("solution"),
        "SVG occupancy chart of one kernel of the schedule.");
}
