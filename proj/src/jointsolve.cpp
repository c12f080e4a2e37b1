#include "weftsched/jointsolve.hpp"

#include <algorithm>
#include <string>

namespace weftsched {

namespace {

std::int64_t eff_cycles(const Node& n) {
  return std::max<std::int64_t>(1, n.rrt.cycles);
}

std::int64_t ceil_div_pos(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

bool ranges_overlap(int s1, int c1, int s2, int c2) {
  return s1 < s2 + c2 && s2 < s1 + c1;
}

std::string op_name(const Node& n, std::int64_t copy, std::int64_t t) {
  return "op_" + n.id + "_" + std::to_string(copy) + "_" + std::to_string(t);
}

std::string live_name(const Node& n, std::int64_t copy, std::int64_t t) {
  return "live_" + n.id + "_" + std::to_string(copy) + "_" + std::to_string(t);
}

}  // namespace

JointEncoding make_joint_encoding(const DepGraph& g, const MachineDesc& m,
                                  std::int64_t i, std::int64_t l) {
  JointEncoding e;
  e.ii = i;
  e.length = l;
  e.copies = ceil_div_pos(l, i);
  e.horizon = (e.copies - 1) * i + l;
  const std::size_t n = g.nodes.size();

  // op variables: copy c of v can only issue in [c*I, c*I + L - eff(v)];
  // anything outside is folded to false (this absorbs the completion family).
  e.op.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    const std::int64_t t_slack = l - eff_cycles(g.nodes[v]);
    e.op[v].assign(static_cast<std::size_t>(e.copies),
                   std::vector<int>(static_cast<std::size_t>(e.horizon), -1));
    for (std::int64_t c = 0; c < e.copies; ++c)
      for (std::int64_t t = c * i; t <= c * i + t_slack; ++t)
        e.op[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] =
            e.request.add_var(op_name(g.nodes[v], c, t));
  }
  // live variables over the closed horizon [0, T]
  e.live.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    e.live[v].assign(static_cast<std::size_t>(e.copies),
                     std::vector<int>(static_cast<std::size_t>(e.horizon) + 1, -1));
    for (std::int64_t c = 0; c < e.copies; ++c)
      for (std::int64_t t = 0; t <= e.horizon; ++t)
        e.live[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] =
            e.request.add_var(live_name(g.nodes[v], c, t));
  }
  // warp slots: aligned contiguous ranges
  e.opw.assign(n, {});
  e.warp_slots.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    const int wr = std::max(1, g.nodes[v].warps_required);
    for (int s = 0; s + wr <= m.num_warps; s += wr) {
      e.warp_slots[v].push_back(s);
      e.opw[v].push_back(
          e.request.add_var("opw_" + g.nodes[v].id + "_" + std::to_string(s)));
    }
  }
  return e;
}

void emit_modsched_constraints(JointEncoding& e, const DepGraph& g,
                               const MachineDesc& m) {
  const std::size_t n = g.nodes.size();
  // uniqueness: each instance issues exactly once
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t c = 0; c < e.copies; ++c) {
      std::vector<LinTerm> ones;
      for (int var : e.op[v][static_cast<std::size_t>(c)])
        if (var >= 0) ones.push_back({1, var});
      e.request.add_linear(ones, CmpOp::eq, 1);
    }
  }
  // consistency: copy c mirrors copy 0 shifted by c*I
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t c = 1; c < e.copies; ++c) {
      for (std::int64_t t = 0; t < e.horizon; ++t) {
        const int base = e.op[v][0][static_cast<std::size_t>(t)];
        if (base < 0) continue;
        const int shifted =
            e.op[v][static_cast<std::size_t>(c)]
                [static_cast<std::size_t>(t + c * e.ii)];
        e.request.add_clause({{base, true}, {shifted, false}});
      }
    }
  }
  // dependence: no consumer instance before its producer finishes
  for (const Edge& ed : g.edges) {
    const std::size_t u = static_cast<std::size_t>(ed.src);
    const std::size_t v = static_cast<std::size_t>(ed.dst);
    for (std::int64_t c = 0; c + ed.delta < e.copies; ++c) {
      const std::int64_t cc = c + ed.delta;
      for (std::int64_t t = 0; t < e.horizon; ++t) {
        const int pvar = e.op[u][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        if (pvar < 0) continue;
        const std::int64_t cutoff = std::min(t + ed.d, e.horizon);
        for (std::int64_t tp = 0; tp < cutoff; ++tp) {
          const int cvar =
              e.op[v][static_cast<std::size_t>(cc)][static_cast<std::size_t>(tp)];
          if (cvar < 0) continue;
          if (pvar == cvar)  // an op d>0 cycles before itself: never
            e.request.add_clause({{pvar, true}});
          else
            e.request.add_clause({{pvar, true}, {cvar, true}});
        }
      }
    }
  }
  // capacity: per cycle and unit, busy reservations within capacity
  for (std::size_t f = 0; f < m.units.size(); ++f) {
    for (std::int64_t t = 0; t < e.horizon; ++t) {
      std::vector<LinTerm> row;
      for (std::size_t v = 0; v < n; ++v) {
        const Node& nd = g.nodes[v];
        if (f >= nd.rrt.use.size()) continue;
        for (std::size_t c = 0; c < nd.rrt.use[f].size(); ++c) {
          const std::int64_t occ = nd.rrt.use[f][c];
          if (occ == 0 || static_cast<std::int64_t>(c) > t) continue;
          for (std::int64_t cp = 0; cp < e.copies; ++cp) {
            const int var = e.op[v][static_cast<std::size_t>(cp)]
                                [static_cast<std::size_t>(t - static_cast<std::int64_t>(c))];
            if (var >= 0) row.push_back({occ, var});
          }
        }
      }
      if (!row.empty())
        e.request.add_linear(row, CmpOp::le, m.units[f].capacity);
    }
  }
}

void emit_memory_constraints(JointEncoding& e, const DepGraph& g,
                             const MachineDesc& m) {
  const std::size_t n = g.nodes.size();
  // initialization at the horizon: only loop-carried producers of the last
  // copy survive the unrolled window
  for (std::size_t v = 0; v < n; ++v) {
    bool carries = false;
    for (const Edge& ed : g.edges)
      if (static_cast<std::size_t>(ed.src) == v && ed.delta > 0) carries = true;
    for (std::int64_t c = 0; c < e.copies; ++c) {
      const int lv = e.live[v][static_cast<std::size_t>(c)]
                         [static_cast<std::size_t>(e.horizon)];
      const bool want = carries && c == e.copies - 1;
      e.request.add_clause({{lv, !want}});
    }
  }
  // backward propagation: definition point, persistence, and last use
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<const Edge*> users;
    for (const Edge& ed : g.edges)
      if (static_cast<std::size_t>(ed.src) == v) users.push_back(&ed);
    for (std::int64_t c = 0; c < e.copies; ++c) {
      for (std::int64_t t = 1; t <= e.horizon; ++t) {
        const int here = e.live[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        const int prev = e.live[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t - 1)];
        const int opv = t < e.horizon
                            ? e.op[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)]
                            : -1;
        // live and defined here: not live before
        if (opv >= 0)
          e.request.add_clause({{here, true}, {opv, true}, {prev, true}});
        // live and not defined here: live before
        if (opv >= 0)
          e.request.add_clause({{here, true}, {opv, false}, {prev, false}});
        else
          e.request.add_clause({{here, true}, {prev, false}});
        // dead but consumed here: was live through t-1
        std::vector<Lit> any_use;
        for (const Edge* ed : users) {
          const std::int64_t cc = c + ed->delta;
          if (cc >= e.copies || t >= e.horizon) continue;
          const int uvar = e.op[static_cast<std::size_t>(ed->dst)]
                               [static_cast<std::size_t>(cc)][static_cast<std::size_t>(t)];
          if (uvar < 0) continue;
          e.request.add_clause({{here, false}, {uvar, true}, {prev, false}});
          any_use.push_back({uvar, false});
        }
        // dead and unconsumed here: dead before
        std::vector<Lit> d2{{here, false}};
        for (const Lit& l : any_use) d2.push_back(l);
        d2.push_back({prev, true});
        e.request.add_clause(d2);
      }
    }
  }
  // per-cycle memory capacity over live footprints
  for (std::size_t mem = 0; mem < m.memories.size(); ++mem) {
    std::int64_t worst = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (mem < g.nodes[v].footprint.size())
        worst += g.nodes[v].footprint[mem] * e.copies;
    if (worst <= m.memories[mem].capacity) continue;  // can never bind
    for (std::int64_t t = 0; t <= e.horizon; ++t) {
      std::vector<LinTerm> row;
      for (std::size_t v = 0; v < n; ++v) {
        if (mem >= g.nodes[v].footprint.size()) continue;
        const std::int64_t fp = g.nodes[v].footprint[mem];
        if (fp == 0) continue;
        for (std::int64_t c = 0; c < e.copies; ++c)
          row.push_back({fp, e.live[v][static_cast<std::size_t>(c)]
                                 [static_cast<std::size_t>(t)]});
      }
      if (!row.empty())
        e.request.add_linear(row, CmpOp::le, m.memories[mem].capacity);
    }
  }
}

void emit_warp_constraints(JointEncoding& e, const DepGraph& g,
                           const MachineDesc& m) {
  const std::size_t n = g.nodes.size();
  // each op runs on exactly one warp range
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<LinTerm> ones;
    for (int var : e.opw[v]) ones.push_back({1, var});
    e.request.add_linear(ones, CmpOp::eq, 1);
  }
  // the variable-latency warp is reserved exactly when the graph needs it
  bool any_vl = false;
  for (const Node& nd : g.nodes) any_vl = any_vl || nd.variable_latency;
  if (any_vl) {
    for (std::size_t v = 0; v < n; ++v) {
      const int wr = std::max(1, g.nodes[v].warps_required);
      bool placed = false;
      for (std::size_t si = 0; si < e.warp_slots[v].size(); ++si) {
        const int s = e.warp_slots[v][si];
        const bool covers = s <= m.vl_warp && m.vl_warp < s + wr;
        if (g.nodes[v].variable_latency) {
          if (s == m.vl_warp) {
            e.request.add_clause({{e.opw[v][si], false}});
            placed = true;
          }
        } else if (covers) {
          e.request.add_clause({{e.opw[v][si], true}});
        }
      }
      if (g.nodes[v].variable_latency && !placed)
        e.request.add_clause({});  // no legal slot: unsat
    }
  }
  // register pressure per warp and cycle, via live-and-assigned products
  if (m.reg_limit > 0) {
    std::int64_t worst = 0;
    for (const Node& nd : g.nodes) worst += nd.regs * e.copies;
    if (worst > m.reg_limit) {
      // z[v][c][t][slot] <-> live && opw
      std::vector<std::vector<std::vector<std::vector<int>>>> z(n);
      for (std::size_t v = 0; v < n; ++v) {
        if (g.nodes[v].regs <= 0) continue;
        z[v].assign(static_cast<std::size_t>(e.copies),
                    std::vector<std::vector<int>>(
                        static_cast<std::size_t>(e.horizon) + 1,
                        std::vector<int>(e.warp_slots[v].size(), -1)));
        for (std::int64_t c = 0; c < e.copies; ++c)
          for (std::int64_t t = 0; t <= e.horizon; ++t)
            for (std::size_t si = 0; si < e.warp_slots[v].size(); ++si) {
              const int lv = e.live[v][static_cast<std::size_t>(c)]
                                 [static_cast<std::size_t>(t)];
              const int wv = e.opw[v][si];
              const int zv = e.request.add_var(
                  "z_" + g.nodes[v].id + "_" + std::to_string(c) + "_" +
                  std::to_string(t) + "_" +
                  std::to_string(e.warp_slots[v][si]));
              z[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)][si] = zv;
              e.request.add_clause({{zv, true}, {lv, false}});
              e.request.add_clause({{zv, true}, {wv, false}});
              e.request.add_clause({{zv, false}, {lv, true}, {wv, true}});
            }
      }
      for (int w = 0; w < m.num_warps; ++w) {
        for (std::int64_t t = 0; t <= e.horizon; ++t) {
          std::vector<LinTerm> row;
          for (std::size_t v = 0; v < n; ++v) {
            if (g.nodes[v].regs <= 0) continue;
            const int wr = std::max(1, g.nodes[v].warps_required);
            for (std::size_t si = 0; si < e.warp_slots[v].size(); ++si) {
              const int s = e.warp_slots[v][si];
              if (!(s <= w && w < s + wr)) continue;
              for (std::int64_t c = 0; c < e.copies; ++c)
                row.push_back({g.nodes[v].regs,
                               z[v][static_cast<std::size_t>(c)]
                                [static_cast<std::size_t>(t)][si]});
            }
          }
          if (!row.empty()) e.request.add_linear(row, CmpOp::le, m.reg_limit);
        }
      }
    }
  }
  // cross-warp spill latency: a consumer on a different warp range waits out
  // the transfer
  for (const Edge& ed : g.edges) {
    const std::size_t u = static_cast<std::size_t>(ed.src);
    const std::size_t v = static_cast<std::size_t>(ed.dst);
    if (u == v) continue;
    const std::int64_t spill = g.nodes[u].spill_cost;
    if (spill <= 0) continue;
    const int wru = std::max(1, g.nodes[u].warps_required);
    const int wrv = std::max(1, g.nodes[v].warps_required);
    for (std::size_t sui = 0; sui < e.warp_slots[u].size(); ++sui) {
      for (std::size_t svi = 0; svi < e.warp_slots[v].size(); ++svi) {
        const int su = e.warp_slots[u][sui];
        const int sv = e.warp_slots[v][svi];
        if (su == sv && wru == wrv) continue;  // same range: no transfer
        for (std::int64_t c = 0; c + ed.delta < e.copies; ++c) {
          const std::int64_t cc = c + ed.delta;
          for (std::int64_t t = 0; t < e.horizon; ++t) {
            const int pvar =
                e.op[u][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
            if (pvar < 0) continue;
            for (std::int64_t s = 0; s < spill; ++s) {
              const std::int64_t tau = t + ed.d + s;
              if (tau >= e.horizon) break;
              const int cvar = e.op[v][static_cast<std::size_t>(cc)]
                                   [static_cast<std::size_t>(tau)];
              if (cvar < 0) continue;
              e.request.add_clause({{pvar, true},
                                    {e.opw[u][sui], true},
                                    {e.opw[v][svi], true},
                                    {cvar, true}});
            }
          }
        }
      }
    }
  }
  // blocking consumers issue alone on their warps; the synchronization also
  // guards the receive point of any spilled operand
  auto isolate = [&](std::size_t v, std::size_t svi, const std::vector<Lit>& prefix,
                     std::int64_t at) {
    const int sv = e.warp_slots[v][svi];
    const int wrv = std::max(1, g.nodes[v].warps_required);
    for (std::size_t o = 0; o < n; ++o) {
      if (o == v) continue;
      const std::int64_t co = g.nodes[o].rrt.cycles;
      if (co <= 0) continue;
      const int wro = std::max(1, g.nodes[o].warps_required);
      for (std::size_t soi = 0; soi < e.warp_slots[o].size(); ++soi) {
        const int so = e.warp_slots[o][soi];
        if (!ranges_overlap(sv, wrv, so, wro)) continue;
        for (std::int64_t cp = 0; cp < e.copies; ++cp) {
          const std::int64_t lo = std::max<std::int64_t>(0, at - co + 1);
          const std::int64_t hi = std::min(at, e.horizon - 1);
          for (std::int64_t tp = lo; tp <= hi; ++tp) {
            const int ovar = e.op[o][static_cast<std::size_t>(cp)]
                                 [static_cast<std::size_t>(tp)];
            if (ovar < 0) continue;
            std::vector<Lit> cl = prefix;
            cl.push_back({ovar, true});
            cl.push_back({e.opw[o][soi], true});
            e.request.add_clause(cl);
          }
        }
      }
    }
  };
  for (const Edge& ed : g.edges) {
    if (!ed.blocking) continue;
    const std::size_t v = static_cast<std::size_t>(ed.dst);
    for (std::int64_t c = 0; c < e.copies; ++c) {
      for (std::int64_t t = 0; t < e.horizon; ++t) {
        const int cvar = e.op[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        if (cvar < 0) continue;
        for (std::size_t svi = 0; svi < e.warp_slots[v].size(); ++svi)
          isolate(v, svi, {{cvar, true}, {e.opw[v][svi], true}}, t);
      }
    }
  }
  for (const Edge& ed : g.edges) {
    const std::size_t u = static_cast<std::size_t>(ed.src);
    const std::size_t v = static_cast<std::size_t>(ed.dst);
    if (u == v) continue;
    const std::int64_t spill = g.nodes[u].spill_cost;
    if (spill <= 0) continue;
    const int wru = std::max(1, g.nodes[u].warps_required);
    const int wrv = std::max(1, g.nodes[v].warps_required);
    for (std::size_t sui = 0; sui < e.warp_slots[u].size(); ++sui) {
      for (std::size_t svi = 0; svi < e.warp_slots[v].size(); ++svi) {
        if (e.warp_slots[u][sui] == e.warp_slots[v][svi] && wru == wrv)
          continue;
        for (std::int64_t c = 0; c + ed.delta < e.copies; ++c) {
          for (std::int64_t t = 0; t < e.horizon; ++t) {
            const int pvar =
                e.op[u][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
            if (pvar < 0) continue;
            const std::int64_t recv = t + ed.d + spill - 1;
            if (recv >= e.horizon) continue;
            isolate(v, svi,
                    {{pvar, true}, {e.opw[u][sui], true}, {e.opw[v][svi], true}},
                    recv);
          }
        }
      }
    }
  }
}

JointEncoding encode_joint(const DepGraph& g, const MachineDesc& m,
                           std::int64_t i, std::int64_t l) {
  JointEncoding e = make_joint_encoding(g, m, i, l);
  emit_modsched_constraints(e, g, m);
  emit_memory_constraints(e, g, m);
  emit_warp_constraints(e, g, m);
  return e;
}

namespace {

JointSolution decode(const JointEncoding& e, const DepGraph& g,
                     const std::vector<std::int64_t>& model) {
  JointSolution s;
  const std::size_t n = g.nodes.size();
  s.horizon = e.horizon;
  s.copies = e.copies;
  s.op.assign(n, {});
  s.live.assign(n, {});
  s.warp_start.assign(n, 0);
  s.schedule.initiation_interval = e.ii;
  s.schedule.assignments.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    s.op[v].assign(static_cast<std::size_t>(e.copies),
                   std::vector<bool>(static_cast<std::size_t>(e.horizon), false));
    s.live[v].assign(static_cast<std::size_t>(e.copies),
                     std::vector<bool>(static_cast<std::size_t>(e.horizon) + 1, false));
    for (std::int64_t c = 0; c < e.copies; ++c) {
      for (std::int64_t t = 0; t < e.horizon; ++t) {
        const int var = e.op[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        if (var >= 0 && model[static_cast<std::size_t>(var)] != 0) {
          s.op[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] = true;
          if (c == 0) s.schedule.assignments[v] = t;
        }
      }
      for (std::int64_t t = 0; t <= e.horizon; ++t) {
        const int var = e.live[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        if (var >= 0 && model[static_cast<std::size_t>(var)] != 0)
          s.live[v][static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] = true;
      }
    }
    for (std::size_t si = 0; si < e.opw[v].size(); ++si)
      if (model[static_cast<std::size_t>(e.opw[v][si])] != 0)
        s.warp_start[v] = e.warp_slots[v][si];
  }
  std::int64_t len = 1;
  for (std::size_t v = 0; v < n; ++v)
    len = std::max(len, s.schedule.assignments[v] + eff_cycles(g.nodes[v]));
  s.schedule.length = len;
  return s;
}

}  // namespace

JointResult solve_joint_at(const DepGraph& g, const MachineDesc& m,
                           std::int64_t i, std::int64_t l,
                           const std::vector<std::int64_t>& hints,
                           const SolveOptions& opts) {
  JointResult out;
  if (g.nodes.empty() || i < 1 || l < 1) {
    out.message = "empty graph or nonpositive interval/length";
    return out;
  }
  JointEncoding e = encode_joint(g, m, i, l);
  SolveOptions local = opts;
  if (hints.size() == g.nodes.size()) {
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
      const std::int64_t t = hints[v];
      if (t >= 0 && t < e.horizon) {
        const int var = e.op[v][0][static_cast<std::size_t>(t)];
        if (var >= 0) local.prefer_true.push_back(var);
      }
    }
  }
  SolverResponse resp = solve(e.request, local);
  switch (resp.status) {
    case SolveStatus::sat:
      out.status = JointStatus::sat;
      out.solution = decode(e, g, resp.model);
      break;
    case SolveStatus::unsat:
      out.status = JointStatus::unsat;
      break;
    default:
      out.status = JointStatus::error;
      out.message = resp.message.empty() ? "solver failure" : resp.message;
      break;
  }
  return out;
}

JointResult solve_joint(const DepGraph& g, const MachineDesc& m,
                        const ModuloSchedule& seed, const SolveOptions& opts) {
  return solve_joint_at(g, m, seed.initiation_interval, seed.length,
                        seed.assignments, opts);
}

std::pair<DepGraph, std::vector<std::string>> apply_streaming_opt(
    const DepGraph& g) {
  DepGraph out = g;
  std::vector<std::string> ids;
  std::vector<int> indeg(g.nodes.size(), 0);
  for (const Edge& ed : g.edges) ++indeg[static_cast<std::size_t>(ed.dst)];
  for (std::size_t v = 0; v < out.nodes.size(); ++v) {
    if (!out.nodes[v].variable_latency || indeg[v] != 0) continue;
    out.nodes[v].rrt.cycles = 0;
    for (auto& row : out.nodes[v].rrt.use) row.clear();
    ids.push_back(out.nodes[v].id);
  }
  return {out, ids};
}

JointSearchResult joint_search(const DepGraph& g, const MachineDesc& m,
                               std::int64_t max_ii, std::int64_t stream_depth,
                               const SolveOptions& opts) {
  JointSearchResult out;
  auto [g2, streamed] = apply_streaming_opt(g);
  std::int64_t ceiling = max_ii;
  if (ceiling <= 0)
    ceiling = 8 * std::max(res_mii(g2, m), rec_mii(g2));

  for (std::int64_t i = 1; i <= ceiling; ++i) {
    ScheduleResult sr = modulo_schedule(g2, m, i, 0, opts);
    if (sr.status == ScheduleStatus::error) {
      out.status = JointStatus::error;
      out.message = sr.message;
      return out;
    }
    if (sr.status != ScheduleStatus::feasible) {
      out.attempts.push_back({i, std::nullopt, "no_modulo_schedule"});
      continue;
    }
    const std::int64_t copies0 =
        ceil_div_pos(sr.schedule.length, i);
    for (std::int64_t l = sr.schedule.length;
         ceil_div_pos(l, i) == copies0; ++l) {
      JointResult jr = solve_joint_at(g2, m, i, l, sr.schedule.assignments, opts);
      if (jr.status == JointStatus::error) {
        out.status = JointStatus::error;
        out.message = jr.message;
        return out;
      }
      out.attempts.push_back(
          {i, l, jr.status == JointStatus::sat ? "sat" : "unsat"});
      if (jr.status == JointStatus::sat) {
        out.status = JointStatus::sat;
        out.solution = jr.solution;
        for (const std::string& id : streamed)
          out.solution.streaming_depths[id] = stream_depth;
        return out;
      }
    }
  }
  out.status = JointStatus::unsat;
  out.message = "no joint schedule up to initiation interval " +
                std::to_string(ceiling);
  return out;
}

}  // namespace weftsched
