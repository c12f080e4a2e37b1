#include "weftsched/sim.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace weftsched {

namespace {

std::int64_t eff_cycles(const Node& v) { return std::max<std::int64_t>(1, v.rrt.cycles); }

bool ranges_overlap(int s1, int c1, int s2, int c2) {
  return s1 < s2 + c2 && s2 < s1 + c1;
}

std::string fmt(std::int64_t x) { return std::to_string(x); }

void reduce(std::int64_t& num, std::int64_t& den) {
  if (num <= 0 || den <= 0) return;
  std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
}

}  // namespace

std::vector<std::vector<std::vector<bool>>> compute_live_tables(
    const DepGraph& g, const std::vector<std::vector<std::vector<bool>>>& op,
    std::int64_t copies, std::int64_t horizon) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::vector<bool>>> live(n);
  for (std::size_t v = 0; v < n; ++v) {
    bool carries = false;
    for (const Edge& e : g.edges)
      if (e.src == static_cast<int>(v) && e.delta > 0) carries = true;
    live[v].assign(copies, std::vector<bool>(horizon + 1, false));
    for (std::int64_t c = 0; c < copies; ++c) {
      live[v][c][horizon] = carries && c == copies - 1;
      for (std::int64_t t = horizon; t >= 1; --t) {
        bool op_t = t < horizon && op[v][c][t];
        bool use_t = false;
        if (t < horizon) {
          for (const Edge& e : g.edges) {
            if (e.src != static_cast<int>(v)) continue;
            std::int64_t cc = c + e.delta;
            if (cc >= copies) continue;
            if (op[e.dst][cc][t]) use_t = true;
          }
        }
        live[v][c][t - 1] = live[v][c][t] ? !op_t : use_t;
      }
    }
  }
  return live;
}

JointSolution expand_solution(const DepGraph& g, const ModuloSchedule& s,
                              const std::vector<int>& warp_start) {
  const std::size_t n = g.nodes.size();
  JointSolution sol;
  sol.schedule = s;
  sol.copies = std::max<std::int64_t>(1, (s.length + s.initiation_interval - 1) / s.initiation_interval);
  sol.horizon = (sol.copies - 1) * s.initiation_interval + s.length;
  sol.warp_start = warp_start.empty() ? std::vector<int>(n, 0) : warp_start;
  sol.op.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    sol.op[v].assign(sol.copies, std::vector<bool>(sol.horizon, false));
    for (std::int64_t c = 0; c < sol.copies; ++c) {
      std::int64_t t = s.assignments[v] + c * s.initiation_interval;
      if (t >= 0 && t < sol.horizon) sol.op[v][c][t] = true;
    }
  }
  sol.live = compute_live_tables(g, sol.op, sol.copies, sol.horizon);
  return sol;
}

std::vector<Violation> validate_program(const JointSolution& sol,
                                        const DepGraph& g,
                                        const MachineDesc& m) {
  std::vector<Violation> out;
  const std::size_t n = g.nodes.size();
  const std::int64_t ii = sol.schedule.initiation_interval;
  const std::int64_t len = sol.schedule.length;
  const std::int64_t copies = sol.copies;
  const std::int64_t horizon = sol.horizon;

  // Shape: everything downstream indexes these tables, so bail out early.
  bool shape_ok = ii >= 1 && len >= 1 && copies >= 1 &&
                  horizon >= (copies - 1) * ii + len &&
                  sol.schedule.assignments.size() == n && sol.op.size() == n &&
                  sol.live.size() == n && sol.warp_start.size() == n;
  if (shape_ok) {
    for (std::size_t v = 0; v < n && shape_ok; ++v) {
      if (sol.op[v].size() != static_cast<std::size_t>(copies) ||
          sol.live[v].size() != static_cast<std::size_t>(copies))
        shape_ok = false;
      for (std::int64_t c = 0; shape_ok && c < copies; ++c) {
        if (sol.op[v][c].size() != static_cast<std::size_t>(horizon) ||
            sol.live[v][c].size() != static_cast<std::size_t>(horizon + 1))
          shape_ok = false;
      }
    }
  }
  if (!shape_ok) {
    out.push_back({"shape", "solution tables do not match the graph and interval"});
    return out;
  }

  // issue[v][c]: first set bit; -1 when the row is empty.
  std::vector<std::vector<std::int64_t>> issue(n, std::vector<std::int64_t>(copies, -1));
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t c = 0; c < copies; ++c) {
      int count = 0;
      for (std::int64_t t = 0; t < horizon; ++t) {
        if (!sol.op[v][c][t]) continue;
        if (issue[v][c] < 0) issue[v][c] = t;
        ++count;
      }
      if (count != 1)
        out.push_back({"uniqueness", "node " + g.nodes[v].id + " copy " + fmt(c) +
                                         " issues " + fmt(count) + " times"});
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    std::int64_t eff = eff_cycles(g.nodes[v]);
    for (std::int64_t c = 0; c < copies; ++c) {
      std::int64_t t = issue[v][c];
      if (t < 0) continue;
      std::int64_t lo = c * ii, hi = c * ii + len - eff;
      if (t < lo || t > hi)
        out.push_back({"completion", "node " + g.nodes[v].id + " copy " + fmt(c) +
                                         " issues at " + fmt(t) + " outside [" +
                                         fmt(lo) + ", " + fmt(hi) + "]"});
    }
    if (issue[v][0] >= 0 && issue[v][0] != sol.schedule.assignments[v])
      out.push_back({"completion", "node " + g.nodes[v].id + " issues at " +
                                       fmt(issue[v][0]) + " but the schedule says " +
                                       fmt(sol.schedule.assignments[v])});
    for (std::int64_t c = 1; c < copies; ++c) {
      if (issue[v][c] >= 0 && issue[v][0] >= 0 &&
          issue[v][c] != issue[v][0] + c * ii)
        out.push_back({"consistency", "node " + g.nodes[v].id + " copy " + fmt(c) +
                                          " at " + fmt(issue[v][c]) +
                                          " is not copy 0 shifted by " + fmt(c * ii)});
    }
  }

  for (const Edge& e : g.edges) {
    for (std::int64_t c = 0; c + e.delta < copies; ++c) {
      std::int64_t tu = issue[e.src][c], tv = issue[e.dst][c + e.delta];
      if (tu < 0 || tv < 0) continue;
      if (tv < tu + e.d)
        out.push_back({"dependence", "edge " + g.nodes[e.src].id + "->" +
                                         g.nodes[e.dst].id + ": consumer copy " +
                                         fmt(c + e.delta) + " at " + fmt(tv) +
                                         " before " + fmt(tu) + "+" + fmt(e.d)});
    }
  }

  // Unit capacity over the whole horizon.
  std::vector<std::vector<std::int64_t>> occ(horizon, std::vector<std::int64_t>(m.units.size(), 0));
  for (std::size_t v = 0; v < n; ++v) {
    const Rrt& r = g.nodes[v].rrt;
    for (std::int64_t c = 0; c < copies; ++c) {
      std::int64_t t = issue[v][c];
      if (t < 0) continue;
      for (std::size_t f = 0; f < r.use.size() && f < m.units.size(); ++f)
        for (std::size_t cyc = 0; cyc < r.use[f].size(); ++cyc)
          if (t + static_cast<std::int64_t>(cyc) < horizon)
            occ[t + cyc][f] += r.use[f][cyc];
    }
  }
  for (std::int64_t t = 0; t < horizon; ++t)
    for (std::size_t f = 0; f < m.units.size(); ++f)
      if (occ[t][f] > m.units[f].capacity)
        out.push_back({"capacity", "unit " + m.units[f].name + " oversubscribed at cycle " +
                                       fmt(t) + ": " + fmt(occ[t][f]) + " > " +
                                       fmt(m.units[f].capacity)});

  // Memory footprints of live values.
  for (std::size_t mem = 0; mem < m.memories.size(); ++mem) {
    for (std::int64_t t = 0; t <= horizon; ++t) {
      std::int64_t used = 0;
      for (std::size_t v = 0; v < n; ++v) {
        if (mem >= g.nodes[v].footprint.size()) continue;
        for (std::int64_t c = 0; c < copies; ++c)
          if (sol.live[v][c][t]) used += g.nodes[v].footprint[mem];
      }
      if (used > m.memories[mem].capacity)
        out.push_back({"memory", "memory " + m.memories[mem].name +
                                     " oversubscribed at cycle " + fmt(t) + ": " +
                                     fmt(used) + " > " + fmt(m.memories[mem].capacity)});
    }
  }

  // Liveness must be the exact fixed point implied by the issue table.
  auto expect = compute_live_tables(g, sol.op, copies, horizon);
  for (std::size_t v = 0; v < n; ++v)
    for (std::int64_t c = 0; c < copies; ++c)
      for (std::int64_t t = 0; t <= horizon; ++t)
        if (sol.live[v][c][t] != expect[v][c][t]) {
          out.push_back({"liveness", "node " + g.nodes[v].id + " copy " + fmt(c) +
                                         " live table diverges at cycle " + fmt(t)});
          break;
        }

  bool any_vl = false;
  for (const Node& nd : g.nodes)
    if (nd.variable_latency) any_vl = true;

  for (std::size_t v = 0; v < n; ++v) {
    int s = sol.warp_start[v];
    int wr = std::max(1, g.nodes[v].warps_required);
    if (s < 0 || s % wr != 0 || s + wr > m.num_warps) {
      out.push_back({"warp_uniqueness", "node " + g.nodes[v].id + " warp start " +
                                            fmt(s) + " is not an aligned slot of width " +
                                            fmt(wr)});
      continue;
    }
    if (!any_vl) continue;
    bool covers_vl = s <= m.vl_warp && m.vl_warp < s + wr;
    if (g.nodes[v].variable_latency && s != m.vl_warp)
      out.push_back({"variable_latency", "node " + g.nodes[v].id +
                                             " must issue from warp " + fmt(m.vl_warp)});
    if (!g.nodes[v].variable_latency && covers_vl)
      out.push_back({"variable_latency", "node " + g.nodes[v].id +
                                             " overlaps the reserved warp " + fmt(m.vl_warp)});
  }

  if (m.reg_limit > 0) {
    for (int w = 0; w < m.num_warps; ++w) {
      for (std::int64_t t = 0; t <= horizon; ++t) {
        std::int64_t used = 0;
        for (std::size_t v = 0; v < n; ++v) {
          if (g.nodes[v].regs <= 0) continue;
          int s = sol.warp_start[v];
          int wr = std::max(1, g.nodes[v].warps_required);
          if (!(s <= w && w < s + wr)) continue;
          for (std::int64_t c = 0; c < copies; ++c)
            if (sol.live[v][c][t]) used += g.nodes[v].regs;
        }
        if (used > m.reg_limit)
          out.push_back({"register_limit", "warp " + fmt(w) + " over the register limit at cycle " +
                                               fmt(t) + ": " + fmt(used) + " > " +
                                               fmt(m.reg_limit)});
      }
    }
  }

  // Cross-warp transfers: the consumer may not issue inside the transfer
  // window, and nothing else may occupy its warps at the receive point.
  // Blocking consumers get the same isolation at every cycle they wait on.
  auto isolated = [&](std::size_t v, std::int64_t at, const std::string& family,
                      const std::string& why) {
    int s = sol.warp_start[v];
    int wr = std::max(1, g.nodes[v].warps_required);
    for (std::size_t o = 0; o < n; ++o) {
      if (o == v || g.nodes[o].rrt.cycles <= 0) continue;
      int so = sol.warp_start[o];
      int co = std::max(1, g.nodes[o].warps_required);
      if (!ranges_overlap(s, wr, so, co)) continue;
      std::int64_t lo = std::max<std::int64_t>(0, at - g.nodes[o].rrt.cycles + 1);
      std::int64_t hi = std::min(at, horizon - 1);
      for (std::int64_t c = 0; c < copies; ++c) {
        std::int64_t to = issue[o][c];
        if (to >= lo && to <= hi)
          out.push_back({family, "node " + g.nodes[o].id + " occupies the warps of " +
                                     g.nodes[v].id + " at cycle " + fmt(at) + " " + why});
      }
    }
  };

  for (const Edge& e : g.edges) {
    if (e.src == e.dst) continue;
    int su = sol.warp_start[e.src], wu = std::max(1, g.nodes[e.src].warps_required);
    int sv = sol.warp_start[e.dst], wv = std::max(1, g.nodes[e.dst].warps_required);
    bool cross = su != sv || wu != wv;
    if (cross && g.nodes[e.src].spill_cost > 0) {
      for (std::int64_t c = 0; c + e.delta < copies; ++c) {
        std::int64_t tu = issue[e.src][c], tv = issue[e.dst][c + e.delta];
        if (tu < 0 || tv < 0) continue;
        if (tv >= tu + e.d && tv < tu + e.d + g.nodes[e.src].spill_cost)
          out.push_back({"spill", "edge " + g.nodes[e.src].id + "->" + g.nodes[e.dst].id +
                                      ": consumer copy " + fmt(c + e.delta) + " at " + fmt(tv) +
                                      " inside the transfer window [" + fmt(tu + e.d) + ", " +
                                      fmt(tu + e.d + g.nodes[e.src].spill_cost) + ")"});
      }
    }
    if (cross && g.nodes[e.src].spill_cost > 0) {
      for (std::int64_t c = 0; c + e.delta < copies; ++c) {
        std::int64_t tu = issue[e.src][c];
        if (tu < 0) continue;
        std::int64_t recv = tu + e.d + g.nodes[e.src].spill_cost - 1;
        if (recv >= horizon) continue;
        isolated(e.dst, recv, "spill_sync", "(transfer receive point)");
      }
    }
    if (e.blocking) {
      for (std::int64_t c = 0; c + e.delta < copies; ++c) {
        std::int64_t tv = issue[e.dst][c + e.delta];
        if (tv < 0) continue;
        isolated(e.dst, tv, "concurrency", "(blocked on " + g.nodes[e.src].id + ")");
      }
    }
  }

  return out;
}

ExecutionTrace simulate_inorder(const DepGraph& g, const MachineDesc& m,
                                std::int64_t iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  const std::size_t n = g.nodes.size();
  ExecutionTrace tr;
  tr.iterations = iterations;
  std::vector<std::vector<std::int64_t>> issue(n, std::vector<std::int64_t>(iterations, -1));
  std::vector<std::vector<std::int64_t>> occ;  // [cycle][unit], grown on demand
  auto occ_at = [&](std::int64_t t) -> std::vector<std::int64_t>& {
    while (occ.size() <= static_cast<std::size_t>(t)) occ.emplace_back(m.units.size(), 0);
    return occ[t];
  };
  auto fits = [&](std::size_t v, std::int64_t t) {
    const Rrt& r = g.nodes[v].rrt;
    for (std::size_t f = 0; f < r.use.size() && f < m.units.size(); ++f)
      for (std::size_t c = 0; c < r.use[f].size(); ++c)
        if (occ_at(t + c)[f] + r.use[f][c] > m.units[f].capacity) return false;
    return true;
  };

  std::int64_t prev = -1;
  for (std::int64_t j = 0; j < iterations; ++j) {
    for (std::size_t v = 0; v < n; ++v) {
      std::int64_t ready = 0;
      for (const Edge& e : g.edges) {
        if (e.dst != static_cast<int>(v)) continue;
        std::int64_t jp = j - e.delta;
        if (jp < 0) continue;
        ready = std::max(ready, issue[e.src][jp] + e.d);
      }
      std::int64_t t = std::max(prev + 1, ready);
      while (!fits(v, t)) ++t;
      issue[v][j] = t;
      prev = t;
      const Rrt& r = g.nodes[v].rrt;
      for (std::size_t f = 0; f < r.use.size() && f < m.units.size(); ++f)
        for (std::size_t c = 0; c < r.use[f].size(); ++c)
          occ_at(t + c)[f] += r.use[f][c];
      tr.issues.push_back({v, j, t, 0, std::max(1, g.nodes[v].warps_required)});
      tr.cycles_elapsed = std::max(tr.cycles_elapsed, t + eff_cycles(g.nodes[v]));
    }
  }

  tr.unit_occupancy.assign(tr.cycles_elapsed, std::vector<std::int64_t>(m.units.size(), 0));
  for (std::int64_t t = 0; t < tr.cycles_elapsed && t < static_cast<std::int64_t>(occ.size()); ++t)
    tr.unit_occupancy[t] = occ[t];
  tr.warp_issues.assign(tr.cycles_elapsed, std::vector<int>(m.num_warps, 0));
  for (const IssueRecord& rec : tr.issues)
    for (int w = rec.warp_start; w < rec.warp_start + rec.warp_count && w < m.num_warps; ++w)
      ++tr.warp_issues[rec.cycle][w];
  tr.throughput_num = iterations;
  tr.throughput_den = tr.cycles_elapsed;
  reduce(tr.throughput_num, tr.throughput_den);
  tr.steady_num = tr.throughput_num;
  tr.steady_den = tr.throughput_den;
  return tr;
}

ExecutionTrace simulate_pipeline(const PipelinedProgram& p, const DepGraph& g,
                                 const MachineDesc& m, std::int64_t iterations) {
  if (iterations < p.copies)
    throw std::invalid_argument("iterations must be at least the copy count " +
                                fmt(p.copies));
  const std::size_t n = g.nodes.size();
  const std::int64_t ii = p.initiation_interval;
  const std::int64_t pro_len = (p.copies - 1) * ii;
  const std::int64_t trips = iterations - p.copies + 1;

  struct Planned {
    std::int64_t cycle;
    std::size_t node;
    std::int64_t iter;
    int warp_start;
    int warp_count;
  };
  std::vector<Planned> plan;
  auto add = [&](const PipelinedInstr& in, std::int64_t base, std::int64_t iter) {
    if (in.kind != "op") return;
    int v = g.node_index(in.node);
    if (v < 0) throw std::runtime_error("program references unknown node " + in.node);
    plan.push_back({base + in.cycle, static_cast<std::size_t>(v), iter, in.warp_start,
                    in.warp_count});
  };
  for (const PipelinedInstr& in : p.prologue) add(in, 0, in.copy);
  for (std::int64_t k = 0; k < trips; ++k)
    for (const PipelinedInstr& in : p.steady_state) {
      if (in.kind == "op" && (in.cycle < 0 || in.cycle >= ii))
        throw std::runtime_error("steady-state instruction outside the interval");
      add(in, pro_len + k * ii, k + in.copy);
    }
  for (const PipelinedInstr& in : p.epilogue)
    add(in, pro_len + trips * ii, iterations - p.copies + in.copy);

  std::stable_sort(plan.begin(), plan.end(), [](const Planned& a, const Planned& b) {
    return std::tie(a.cycle, a.node, a.iter) < std::tie(b.cycle, b.node, b.iter);
  });

  ExecutionTrace tr;
  tr.iterations = iterations;
  std::vector<std::vector<std::int64_t>> issue(n, std::vector<std::int64_t>(iterations, -1));
  for (const Planned& pl : plan) {
    if (pl.iter < 0 || pl.iter >= iterations)
      throw std::runtime_error("node " + g.nodes[pl.node].id + " replays iteration " +
                               fmt(pl.iter) + " outside [0, " + fmt(iterations) + ")");
    if (issue[pl.node][pl.iter] >= 0)
      throw std::runtime_error("node " + g.nodes[pl.node].id + " iteration " +
                               fmt(pl.iter) + " issues twice");
    for (const Edge& e : g.edges) {
      if (e.dst != static_cast<int>(pl.node)) continue;
      std::int64_t jp = pl.iter - e.delta;
      if (jp < 0) continue;
      std::int64_t tu = issue[e.src][jp];
      if (tu < 0 || tu + e.d > pl.cycle)
        throw std::runtime_error("dependence " + g.nodes[e.src].id + "->" +
                                 g.nodes[pl.node].id + " unsatisfied at cycle " +
                                 fmt(pl.cycle) + " (iteration " + fmt(pl.iter) + ")");
    }
    issue[pl.node][pl.iter] = pl.cycle;
    tr.issues.push_back({pl.node, pl.iter, pl.cycle, pl.warp_start, pl.warp_count});
    tr.cycles_elapsed =
        std::max(tr.cycles_elapsed, pl.cycle + eff_cycles(g.nodes[pl.node]));
  }
  for (std::size_t v = 0; v < n; ++v)
    for (std::int64_t j = 0; j < iterations; ++j)
      if (issue[v][j] < 0)
        throw std::runtime_error("node " + g.nodes[v].id + " iteration " + fmt(j) +
                                 " never issues");

  tr.unit_occupancy.assign(tr.cycles_elapsed, std::vector<std::int64_t>(m.units.size(), 0));
  for (const IssueRecord& rec : tr.issues) {
    const Rrt& r = g.nodes[rec.node].rrt;
    for (std::size_t f = 0; f < r.use.size() && f < m.units.size(); ++f)
      for (std::size_t c = 0; c < r.use[f].size(); ++c) {
        std::int64_t t = rec.cycle + static_cast<std::int64_t>(c);
        if (t >= tr.cycles_elapsed) continue;
        tr.unit_occupancy[t][f] += r.use[f][c];
        if (tr.unit_occupancy[t][f] > m.units[f].capacity)
          throw std::runtime_error("unit " + m.units[f].name +
                                   " oversubscribed at cycle " + fmt(t) + " during replay");
      }
  }
  tr.warp_issues.assign(tr.cycles_elapsed, std::vector<int>(m.num_warps, 0));
  for (const IssueRecord& rec : tr.issues)
    for (int w = rec.warp_start; w < rec.warp_start + rec.warp_count && w < m.num_warps; ++w)
      ++tr.warp_issues[rec.cycle][w];

  tr.throughput_num = iterations;
  tr.throughput_den = tr.cycles_elapsed;
  reduce(tr.throughput_num, tr.throughput_den);
  tr.steady_num = 1;
  tr.steady_den = ii;
  reduce(tr.steady_num, tr.steady_den);
  return tr;
}

}  // namespace weftsched
