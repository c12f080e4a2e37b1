#include "weftsched/modsched.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace weftsched {

namespace {

std::int64_t ceil_div_pos(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

// Effective span of an op for length accounting: zero-cycle ops still occupy
// their issue slot, so M(v) < L must hold.
std::int64_t eff_cycles(const Node& n) {
  return std::max<std::int64_t>(1, n.rrt.cycles);
}

// Longest-path relaxation under weights d - delta*i. Returns false when a
// positive cycle exists (no schedule at this i); otherwise fills dist with
// per-node lower bounds on start cycles.
bool longest_paths(const DepGraph& g, std::int64_t i,
                   std::vector<std::int64_t>& dist) {
  const std::size_t n = g.nodes.size();
  dist.assign(n, 0);
  for (std::size_t pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (const Edge& e : g.edges) {
      const std::int64_t w = e.d - e.delta * i;
      if (dist[static_cast<std::size_t>(e.src)] + w >
          dist[static_cast<std::size_t>(e.dst)]) {
        dist[static_cast<std::size_t>(e.dst)] =
            dist[static_cast<std::size_t>(e.src)] + w;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  return false;  // still relaxing after n passes
}

}  // namespace

std::int64_t res_mii(const DepGraph& g, const MachineDesc& m) {
  std::int64_t best = 1;
  for (std::size_t f = 0; f < m.units.size(); ++f) {
    std::int64_t total = 0;
    for (const Node& v : g.nodes) {
      if (f < v.rrt.use.size())
        for (std::int64_t u : v.rrt.use[f]) total += u;
    }
    if (total > 0 && m.units[f].capacity > 0)
      best = std::max(best, ceil_div_pos(total, m.units[f].capacity));
  }
  return best;
}

namespace {

// Elementary cycle enumeration: from each root s, walk only nodes >= s so
// every cycle is found exactly once (at its smallest node). The budget guards
// against dense graphs; enumeration past it abandons to the caller.
bool enumerate_cycles(const DepGraph& g,
                      const std::function<void(std::int64_t, std::int64_t)>& on_cycle,
                      std::int64_t budget) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    out[static_cast<std::size_t>(g.edges[e].src)].push_back(static_cast<int>(e));
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::int64_t found = 0;
  bool ok = true;

  std::function<void(int, int, std::int64_t, std::int64_t)> dfs =
      [&](int root, int v, std::int64_t sum_d, std::int64_t sum_delta) {
        if (!ok) return;
        on_path[static_cast<std::size_t>(v)] = 1;
        for (int ei : out[static_cast<std::size_t>(v)]) {
          const Edge& e = g.edges[static_cast<std::size_t>(ei)];
          if (e.dst < root) continue;
          if (e.dst == root) {
            on_cycle(sum_d + e.d, sum_delta + e.delta);
            if (++found > budget) {
              ok = false;
              return;
            }
          } else if (!on_path[static_cast<std::size_t>(e.dst)]) {
            dfs(root, e.dst, sum_d + e.d, sum_delta + e.delta);
            if (!ok) return;
          }
        }
        on_path[static_cast<std::size_t>(v)] = 0;
      };

  for (int root = 0; root < n && ok; ++root) {
    std::fill(on_path.begin(), on_path.end(), 0);
    dfs(root, root, 0, 0);
  }
  return ok;
}

}  // namespace

std::int64_t rec_mii(const DepGraph& g) {
  if (g.nodes.size() <= 12) {
    std::int64_t best = 1;
    bool complete = enumerate_cycles(
        g,
        [&](std::int64_t sum_d, std::int64_t sum_delta) {
          if (sum_delta > 0)
            best = std::max(best, ceil_div_pos(sum_d, sum_delta));
        },
        200000);
    if (complete) return best;
  }
  // Monotone search: i feasible iff no positive cycle under d - delta*i.
  std::int64_t hi = 1;
  for (const Edge& e : g.edges) hi += std::max<std::int64_t>(0, e.d);
  std::int64_t lo = 1;
  std::vector<std::int64_t> dist;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (longest_paths(g, mid, dist))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::int64_t default_length_bound(const DepGraph& g, std::int64_t i) {
  std::int64_t total = 0;
  std::int64_t max_delta = 0;
  for (const Node& v : g.nodes) total += eff_cycles(v);
  for (const Edge& e : g.edges)
    max_delta = std::max<std::int64_t>(max_delta, e.delta);
  return total + i * (1 + max_delta);
}

SolverRequest build_modsched_request(const DepGraph& g, const MachineDesc& m,
                                     std::int64_t i, std::int64_t l_max,
                                     bool with_length_objective) {
  SolverRequest r;
  const std::size_t n = g.nodes.size();
  // a[v][t] + channeled start s_v, one group per node in declaration order
  std::vector<std::vector<int>> a(n);
  std::vector<int> s(n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::int64_t t_max = l_max - eff_cycles(g.nodes[v]);
    if (t_max < 0)
      throw std::invalid_argument("length bound below cycles of node " +
                                  g.nodes[v].id);
    std::vector<LinTerm> ones, chan;
    for (std::int64_t t = 0; t <= t_max; ++t) {
      int var = r.add_var("a_" + g.nodes[v].id + "_" + std::to_string(t));
      a[v].push_back(var);
      ones.push_back({1, var});
      chan.push_back({-t, var});
    }
    s[v] = r.add_var("s_" + g.nodes[v].id, VarSort::integer, 0, t_max);
    r.add_linear(ones, CmpOp::eq, 1);
    chan.push_back({1, s[v]});
    r.add_linear(chan, CmpOp::eq, 0);
  }
  // dependence rows; self-edges collapse to constant feasibility checks
  for (const Edge& e : g.edges) {
    r.add_linear({{1, s[static_cast<std::size_t>(e.dst)]},
                  {-1, s[static_cast<std::size_t>(e.src)]}},
                 CmpOp::ge, e.d - e.delta * i);
  }
  // modular capacity rows per (unit, residue)
  for (std::size_t f = 0; f < m.units.size(); ++f) {
    for (std::int64_t res = 0; res < i; ++res) {
      std::vector<LinTerm> row;
      for (std::size_t v = 0; v < n; ++v) {
        const Node& nd = g.nodes[v];
        if (f >= nd.rrt.use.size()) continue;
        for (std::size_t c = 0; c < nd.rrt.use[f].size(); ++c) {
          const std::int64_t occ = nd.rrt.use[f][c];
          if (occ == 0) continue;
          for (std::size_t t = 0; t < a[v].size(); ++t) {
            if ((static_cast<std::int64_t>(t) + static_cast<std::int64_t>(c)) % i == res)
              row.push_back({occ, a[v][t]});
          }
        }
      }
      if (!row.empty()) r.add_linear(row, CmpOp::le, m.units[f].capacity);
    }
  }
  // anchor: some op starts at cycle 0
  std::vector<LinTerm> anchor;
  for (std::size_t v = 0; v < n; ++v)
    if (!a[v].empty()) anchor.push_back({1, a[v][0]});
  if (!anchor.empty()) r.add_linear(anchor, CmpOp::ge, 1);

  if (with_length_objective) {
    std::int64_t lb = 1;
    for (std::size_t v = 0; v < n; ++v)
      lb = std::max(lb, eff_cycles(g.nodes[v]));
    int lvar = r.add_var("L", VarSort::integer, lb, l_max);
    for (std::size_t v = 0; v < n; ++v)
      r.add_linear({{1, lvar}, {-1, s[v]}}, CmpOp::ge, eff_cycles(g.nodes[v]));
    r.objective = lvar;
  }
  return r;
}

namespace {

std::int64_t realized_length(const DepGraph& g,
                             const std::vector<std::int64_t>& m) {
  std::int64_t len = 1;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    len = std::max(len, m[v] + eff_cycles(g.nodes[v]));
  return len;
}

}  // namespace

ScheduleResult modulo_schedule(const DepGraph& g, const MachineDesc& m,
                               std::int64_t i, std::int64_t l_max,
                               const SolveOptions& opts) {
  ScheduleResult out;
  if (i < 1) {
    out.status = ScheduleStatus::error;
    out.message = "initiation interval must be positive";
    return out;
  }
  if (g.nodes.empty()) {
    out.status = ScheduleStatus::error;
    out.message = "graph has no nodes";
    return out;
  }
  if (l_max <= 0) l_max = default_length_bound(g, i);

  if (i < res_mii(g, m)) {
    out.status = ScheduleStatus::infeasible;
    out.message = "unit reservations exceed capacity at initiation interval " +
                  std::to_string(i);
    return out;
  }
  std::vector<std::int64_t> dist;
  if (!longest_paths(g, i, dist)) {
    out.status = ScheduleStatus::infeasible;
    out.message = "a dependence cycle requires a larger initiation interval";
    return out;
  }
  std::int64_t lb = 1;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    lb = std::max(lb, dist[v] + eff_cycles(g.nodes[v]));
  if (lb > l_max) {
    out.status = ScheduleStatus::length_bound_too_small;
    out.message = "dependences alone need length " + std::to_string(lb) +
                  " which exceeds the bound " + std::to_string(l_max);
    return out;
  }

  // Phase 1: smallest feasible length, scanning up from the dependence bound.
  std::int64_t l_star = -1;
  std::vector<std::int64_t> starts(g.nodes.size(), 0);
  for (std::int64_t l = lb; l <= l_max; ++l) {
    SolverRequest req = build_modsched_request(g, m, i, l, false);
    SolverResponse resp = solve(req, opts);
    if (resp.status == SolveStatus::sat) {
      l_star = l;
      for (std::size_t v = 0; v < g.nodes.size(); ++v)
        starts[v] = resp.model[static_cast<std::size_t>(
            req.find_var("s_" + g.nodes[v].id))];
      break;
    }
    if (resp.status == SolveStatus::error) {
      out.status = ScheduleStatus::error;
      out.message = resp.message;
      return out;
    }
  }
  if (l_star < 0) {
    out.status = ScheduleStatus::infeasible;
    out.message = "no schedule at initiation interval " + std::to_string(i) +
                  " within length " + std::to_string(l_max);
    return out;
  }

  // Phase 2: among length-l_star schedules, push each node as late as
  // possible in declaration order (the documented tie-break).
  std::vector<std::int64_t> pinned;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const std::int64_t t_cap = l_star - eff_cycles(g.nodes[v]);
    const std::int64_t current = starts[v];
    std::int64_t chosen = current;
    for (std::int64_t cand = t_cap; cand > current; --cand) {
      SolverRequest req = build_modsched_request(g, m, i, l_star, false);
      for (std::size_t w = 0; w < pinned.size(); ++w)
        req.add_linear({{1, req.find_var("s_" + g.nodes[w].id)}}, CmpOp::eq,
                       pinned[w]);
      req.add_linear({{1, req.find_var("s_" + g.nodes[v].id)}}, CmpOp::eq,
                     cand);
      SolverResponse resp = solve(req, opts);
      if (resp.status == SolveStatus::error) {
        out.status = ScheduleStatus::error;
        out.message = resp.message;
        return out;
      }
      if (resp.status == SolveStatus::sat) {
        chosen = cand;
        for (std::size_t w = 0; w < g.nodes.size(); ++w)
          starts[w] = resp.model[static_cast<std::size_t>(
              req.find_var("s_" + g.nodes[w].id))];
        break;
      }
    }
    pinned.push_back(chosen);
  }

  out.status = ScheduleStatus::feasible;
  out.schedule.assignments = pinned;
  out.schedule.initiation_interval = i;
  out.schedule.length = realized_length(g, pinned);
  return out;
}

ScheduleResult brute_force_modulo_schedule(const DepGraph& g,
                                           const MachineDesc& m, std::int64_t i,
                                           std::int64_t l_max) {
  ScheduleResult out;
  if (g.nodes.empty() || i < 1) {
    out.status = ScheduleStatus::error;
    out.message = "empty graph or nonpositive interval";
    return out;
  }
  const std::size_t n = g.nodes.size();
  std::vector<std::int64_t> cur(n, 0);
  ModuloSchedule best;
  bool have = false;

  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (v == n) {
      ModuloSchedule s{cur, i, realized_length(g, cur)};
      if (!schedule_is_valid(s, g, m)) return;
      if (!have || s.length < best.length ||
          (s.length == best.length && s.assignments > best.assignments)) {
        best = s;
        have = true;
      }
      return;
    }
    const std::int64_t t_cap = l_max - eff_cycles(g.nodes[v]);
    for (std::int64_t t = 0; t <= t_cap; ++t) {
      cur[v] = t;
      walk(v + 1);
    }
  };
  walk(0);

  if (!have) {
    out.status = ScheduleStatus::infeasible;
    out.message = "no schedule at initiation interval " + std::to_string(i) +
                  " within length " + std::to_string(l_max);
    return out;
  }
  out.status = ScheduleStatus::feasible;
  out.schedule = best;
  return out;
}

bool schedule_is_valid(const ModuloSchedule& s, const DepGraph& g,
                       const MachineDesc& m) {
  const std::size_t n = g.nodes.size();
  if (s.assignments.size() != n || s.initiation_interval < 1) return false;
  std::int64_t lowest = s.assignments.empty() ? 0 : s.assignments[0];
  for (std::int64_t a : s.assignments) {
    if (a < 0) return false;
    lowest = std::min(lowest, a);
  }
  if (lowest != 0) return false;
  for (const Edge& e : g.edges) {
    if (s.assignments[static_cast<std::size_t>(e.dst)] +
            e.delta * s.initiation_interval <
        s.assignments[static_cast<std::size_t>(e.src)] + e.d)
      return false;
  }
  auto rows = modular_rrt(s, g, m);
  for (std::size_t f = 0; f < rows.size(); ++f)
    for (std::int64_t used : rows[f])
      if (used > m.units[f].capacity) return false;
  return true;
}

std::vector<std::vector<std::int64_t>> modular_rrt(const ModuloSchedule& s,
                                                   const DepGraph& g,
                                                   const MachineDesc& m) {
  std::vector<std::vector<std::int64_t>> rows(
      m.units.size(),
      std::vector<std::int64_t>(static_cast<std::size_t>(s.initiation_interval), 0));
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const Node& nd = g.nodes[v];
    for (std::size_t f = 0; f < nd.rrt.use.size() && f < m.units.size(); ++f) {
      for (std::size_t c = 0; c < nd.rrt.use[f].size(); ++c) {
        if (nd.rrt.use[f][c] == 0) continue;
        const std::int64_t r =
            (s.assignments[v] + static_cast<std::int64_t>(c)) %
            s.initiation_interval;
        rows[f][static_cast<std::size_t>(r)] += nd.rrt.use[f][c];
      }
    }
  }
  return rows;
}

}  // namespace weftsched
