#include "weftsched/costnorm.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include "weftsched/solverio.hpp"

namespace weftsched {

namespace {

std::int64_t abs64(std::int64_t x) { return x < 0 ? -x : x; }

// Pairwise ratio distortion of candidate against the original vector.
std::int64_t distortion(const std::vector<std::int64_t>& c,
                        const std::vector<std::int64_t>& cand) {
  std::int64_t f = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      f = std::max(f, abs64(c[i] * cand[j] - c[j] * cand[i]));
  return f;
}

// Number of integer vectors with n entries >= 1 summing to at most u.
// This is C(u, n); anything past `cap` is reported as cap + 1.
std::int64_t lattice_size(std::int64_t u, std::int64_t n, std::int64_t cap) {
  __int128 count = 1;
  for (std::int64_t k = 1; k <= n; ++k) {
    count = count * (u - k + 1) / k;  // exact: prefix products of C(u, k)
    if (count > cap) return cap + 1;
  }
  return static_cast<std::int64_t>(count);
}

struct Best {
  std::vector<std::int64_t> values;
  std::int64_t f = -1;  // -1 until the first candidate lands
  std::int64_t sum = 0;
};

void search(const std::vector<std::int64_t>& c, std::int64_t u,
            std::vector<std::int64_t>& cand, std::size_t pos,
            std::int64_t used, Best& best) {
  if (pos == c.size()) {
    const std::int64_t f = distortion(c, cand);
    const bool better =
        best.f < 0 || f < best.f ||
        (f == best.f &&
         (used < best.sum || (used == best.sum && cand < best.values)));
    if (better) {
      best.f = f;
      best.sum = used;
      best.values = cand;
    }
    return;
  }
  const std::int64_t remaining = static_cast<std::int64_t>(c.size() - pos) - 1;
  for (std::int64_t v = 1; used + v + remaining <= u; ++v) {
    cand[pos] = v;
    search(c, u, cand, pos + 1, used + v, best);
  }
}

std::vector<std::int64_t> normalize_via_solver(
    const std::vector<std::int64_t>& c, std::int64_t u) {
  const int n = static_cast<int>(c.size());
  const std::int64_t cmax = *std::max_element(c.begin(), c.end());
  const std::int64_t fmax = cmax * u;

  auto base_request = [&](std::int64_t f_cap, std::int64_t sum_cap,
                          const std::vector<std::int64_t>& fixed) {
    SolverRequest r;
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i)
      x[i] = r.add_var("x" + std::to_string(i), VarSort::integer, 1, u);
    int f = r.add_var("f", VarSort::integer, 0, f_cap);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        r.add_linear({{c[i], x[j]}, {-c[j], x[i]}, {-1, f}}, CmpOp::le, 0);
        r.add_linear({{c[j], x[i]}, {-c[i], x[j]}, {-1, f}}, CmpOp::le, 0);
      }
    std::vector<LinTerm> sum_row;
    for (int i = 0; i < n; ++i) sum_row.push_back({1, x[i]});
    r.add_linear(sum_row, CmpOp::le, sum_cap);
    for (std::size_t i = 0; i < fixed.size(); ++i)
      r.add_linear({{1, x[static_cast<int>(i)]}}, CmpOp::eq, fixed[i]);
    return r;
  };

  SolveOptions opts;
  opts.max_decisions = 64;

  // Phase 1: minimize F.
  SolverRequest r1 = base_request(fmax, u, {});
  r1.objective = r1.find_var("f");
  SolverResponse resp = solve_internal(r1, opts);
  if (resp.status != SolveStatus::sat)
    throw std::runtime_error("cost normalization solver failed: " +
                             resp.message);
  const std::int64_t fstar = *resp.objective_value;

  // Phase 2: minimize sum(C') at F = F*.
  SolverRequest r2 = base_request(fstar, u, {});
  int svar = r2.add_var("s", VarSort::integer, n, u);
  std::vector<LinTerm> chan;
  for (int i = 0; i < n; ++i)
    chan.push_back({1, r2.find_var("x" + std::to_string(i))});
  chan.push_back({-1, svar});
  r2.add_linear(chan, CmpOp::eq, 0);
  r2.objective = svar;
  resp = solve_internal(r2, opts);
  if (resp.status != SolveStatus::sat)
    throw std::runtime_error("cost normalization solver failed: " +
                             resp.message);
  const std::int64_t sstar = *resp.objective_value;

  // Phase 3: lexicographically smallest, entry by entry.
  std::vector<std::int64_t> fixed;
  for (int i = 0; i < n; ++i) {
    SolverRequest r3 = base_request(fstar, sstar, fixed);
    std::vector<LinTerm> sum_eq;
    for (int j = 0; j < n; ++j)
      sum_eq.push_back({1, r3.find_var("x" + std::to_string(j))});
    r3.add_linear(sum_eq, CmpOp::ge, sstar);
    r3.objective = r3.find_var("x" + std::to_string(i));
    resp = solve_internal(r3, opts);
    if (resp.status != SolveStatus::sat)
      throw std::runtime_error("cost normalization solver failed: " +
                               resp.message);
    fixed.push_back(*resp.objective_value);
  }
  return fixed;
}

}  // namespace

CostVector collect_costs(const DepGraph& g) {
  CostVector out;
  std::map<std::int64_t, int> seen;
  auto intern = [&](std::int64_t v) {
    auto it = seen.find(v);
    if (it != seen.end()) return it->second;
    int idx = static_cast<int>(out.values.size());
    out.values.push_back(v);
    seen.emplace(v, idx);
    return idx;
  };
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].rrt.cycles > 0)
      out.sites.push_back({CostSite::Kind::node_cycles, static_cast<int>(i),
                           intern(g.nodes[i].rrt.cycles)});
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].d > 0)
      out.sites.push_back({CostSite::Kind::edge_delay, static_cast<int>(e),
                           intern(g.edges[e].d)});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].spill_cost > 0)
      out.sites.push_back({CostSite::Kind::node_spill, static_cast<int>(i),
                           intern(g.nodes[i].spill_cost)});
  }
  return out;
}

CostVector normalize_costs(const CostVector& c, std::int64_t u) {
  const std::int64_t n = static_cast<std::int64_t>(c.values.size());
  if (u < n)
    throw std::invalid_argument(
        "resolution bound " + std::to_string(u) + " admits no vector of " +
        std::to_string(n) + " positive entries");
  CostVector out = c;
  out.resolution_bound = u;
  if (n == 0) {
    out.achieved_distortion = 0;
    return out;
  }

  constexpr std::int64_t kExhaustiveCap = 30000000;
  if (lattice_size(u, n, kExhaustiveCap) <= kExhaustiveCap) {
    Best best;
    std::vector<std::int64_t> cand(c.values.size(), 1);
    search(c.values, u, cand, 0, 0, best);
    out.values = best.values;
    out.achieved_distortion = best.f;
  } else {
    out.values = normalize_via_solver(c.values, u);
    out.achieved_distortion = distortion(c.values, out.values);
  }
  return out;
}

namespace {

Rrt stretch_rrt(const Rrt& r, std::int64_t new_cycles) {
  if (new_cycles == r.cycles || r.cycles == 0) {
    Rrt out = r;
    out.cycles = new_cycles;
    for (auto& row : out.use) row.resize(static_cast<std::size_t>(new_cycles), 0);
    return out;
  }
  Rrt out;
  out.cycles = new_cycles;
  out.use.resize(r.use.size());
  for (std::size_t f = 0; f < r.use.size(); ++f) {
    out.use[f].resize(static_cast<std::size_t>(new_cycles), 0);
    for (std::int64_t c = 0; c < new_cycles; ++c) {
      // Resample: cycle c of the stretched pattern mirrors the source cycle
      // at the same relative position.
      std::int64_t src = c * r.cycles / new_cycles;
      if (src < static_cast<std::int64_t>(r.use[f].size()))
        out.use[f][static_cast<std::size_t>(c)] =
            r.use[f][static_cast<std::size_t>(src)];
    }
  }
  return out;
}

}  // namespace

DepGraph apply_normalization(const DepGraph& g, const CostVector& normalized) {
  DepGraph out = g;
  for (const CostSite& s : normalized.sites) {
    const std::int64_t v = normalized.values[static_cast<std::size_t>(s.value_index)];
    switch (s.kind) {
      case CostSite::Kind::node_cycles:
        out.nodes[static_cast<std::size_t>(s.index)].rrt =
            stretch_rrt(out.nodes[static_cast<std::size_t>(s.index)].rrt, v);
        break;
      case CostSite::Kind::edge_delay:
        out.edges[static_cast<std::size_t>(s.index)].d = v;
        break;
      case CostSite::Kind::node_spill:
        out.nodes[static_cast<std::size_t>(s.index)].spill_cost = v;
        break;
    }
  }
  return out;
}

}  // namespace weftsched
