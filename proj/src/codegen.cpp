#include "weftsched/codegen.hpp"

#include <algorithm>
#include <tuple>

#include "json.hpp"

namespace weftsched {

namespace {

using json = nlohmann::json;

// id decorated with a version index: 0 is the bare name, k > 0 appends one
// 'n' per pending stage, k < 0 names a pre-loop value.
std::string version_name(const std::string& id, std::int64_t k) {
  if (k >= 0) return id + std::string(static_cast<std::size_t>(k), 'n');
  return id + "_p" + std::to_string(-k);
}

struct Ranges {
  int start;
  int count;
};

bool same_range(const Ranges& a, const Ranges& b) {
  return a.start == b.start && a.count == b.count;
}

std::string render(const PipelinedInstr& in) {
  if (in.kind == "move") return in.dest + " = " + in.operands[0];
  if (in.kind == "spill_recv") return in.dest + " = xfer(" + in.operands[0] + ")";
  std::string s = in.dest + " = " + in.node + "(";
  for (std::size_t i = 0; i < in.operands.size(); ++i) {
    if (i) s += ", ";
    s += in.operands[i];
  }
  return s + ")";
}

}  // namespace

PipelinedProgram synthesize(const JointSolution& sol, const DepGraph& g) {
  PipelinedProgram p;
  const std::int64_t ii = sol.schedule.initiation_interval;
  const std::int64_t copies = sol.copies;
  p.initiation_interval = ii;
  p.copies = copies;
  p.length = sol.schedule.length;
  p.horizon = sol.horizon;
  const std::int64_t pro_end = (copies - 1) * ii;
  const std::int64_t steady_end = pro_end + ii;
  const std::size_t n = g.nodes.size();

  std::vector<Ranges> warp(n);
  for (std::size_t v = 0; v < n; ++v)
    warp[v] = {sol.warp_start.empty() ? 0 : sol.warp_start[v],
               std::max(1, g.nodes[v].warps_required)};

  // steady copy index and maximum out-edge stage lag per node
  std::vector<std::int64_t> steady_copy(n), kmax(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    steady_copy[v] = copies - 1 - sol.schedule.assignments[v] / ii;
  for (const Edge& e : g.edges) {
    if (e.src == e.dst) continue;
    const std::int64_t lag =
        sol.schedule.assignments[static_cast<std::size_t>(e.dst)] / ii -
        sol.schedule.assignments[static_cast<std::size_t>(e.src)] / ii + e.delta;
    kmax[static_cast<std::size_t>(e.src)] =
        std::max(kmax[static_cast<std::size_t>(e.src)], lag);
  }

  // the name holding the value of (u, copy pu) while moves are still pending
  auto pending_name = [&](std::size_t u, std::int64_t pu) {
    return version_name(g.nodes[u].id, kmax[u] - (steady_copy[u] - pu));
  };
  // the same value seen from the epilogue, after the final trip's moves
  auto epilogue_name = [&](std::size_t u, std::int64_t pu) {
    if (pu > steady_copy[u] || kmax[u] == 0) return g.nodes[u].id;
    return version_name(
        g.nodes[u].id,
        std::max<std::int64_t>(0, kmax[u] - 1 - (steady_copy[u] - pu)));
  };

  std::map<std::string, std::string> versions;
  auto note_version = [&](const std::string& name, const std::string& base) {
    if (name != base) versions[name] = base;
  };

  // region: 0 prologue, 1 steady, 2 epilogue
  auto region_of = [&](std::int64_t t) {
    return t < pro_end ? 0 : t < steady_end ? 1 : 2;
  };
  const std::int64_t region_start[3] = {0, pro_end, steady_end};

  struct Keyed {
    std::tuple<std::int64_t, int, std::size_t, std::int64_t> key;
    PipelinedInstr instr;
  };
  std::vector<Keyed> out[3];

  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t c = 0; c < copies; ++c) {
      const std::int64_t t = sol.schedule.assignments[v] + c * ii;
      const int r = region_of(t);
      PipelinedInstr in;
      in.kind = "op";
      in.node = g.nodes[v].id;
      in.copy = c;
      in.cycle = t - region_start[r];
      in.warp_start = warp[v].start;
      in.warp_count = warp[v].count;
      in.dest = r == 2 ? g.nodes[v].id : pending_name(v, c);
      note_version(in.dest, g.nodes[v].id);
      for (const Edge& e : g.edges) {
        if (static_cast<std::size_t>(e.dst) != v) continue;
        const std::size_t u = static_cast<std::size_t>(e.src);
        std::string name;
        bool cross = false;
        if (u == v) {
          // loop-carried self operand: shifted iteration index
          if (r == 0)
            name = g.nodes[v].id + "[" + std::to_string(c - e.delta) + "]";
          else if (r == 1)
            name = g.nodes[v].id + "[i-" + std::to_string(e.delta) + "]";
          else
            name = g.nodes[v].id + "[n-" + std::to_string(e.delta) + "]";
        } else {
          const std::int64_t pu = c - e.delta;
          name = r == 2 ? epilogue_name(u, pu) : pending_name(u, pu);
          note_version(name, g.nodes[u].id);
          cross = !same_range(warp[u], warp[v]);
          if (cross && pu >= 0 && pu < copies) {
            // transfer pseudo-op anchored to the consumer's region
            const std::int64_t recv =
                sol.schedule.assignments[u] + pu * ii + e.d +
                std::max<std::int64_t>(1, g.nodes[u].spill_cost) - 1;
            PipelinedInstr x;
            x.kind = "spill_recv";
            x.node = g.nodes[u].id;
            x.copy = pu;
            x.cycle = std::clamp<std::int64_t>(recv - region_start[r], 0,
                                               in.cycle);
            x.warp_start = warp[v].start;
            x.warp_count = warp[v].count;
            x.dest = name;
            x.operands = {name};
            x.spilled = {true};
            x.text = render(x);
            out[r].push_back(
                {{x.cycle, 0, v, c}, std::move(x)});
          }
        }
        in.operands.push_back(name);
        in.spilled.push_back(cross);
      }
      in.text = render(in);
      out[r].push_back({{in.cycle, 1, v, c}, std::move(in)});
    }
  }

  // end-of-body move-backs, oldest version first
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t j = 0; j < kmax[v]; ++j) {
      PipelinedInstr mv;
      mv.kind = "move";
      mv.node = g.nodes[v].id;
      mv.copy = j;
      mv.cycle = ii - 1;
      mv.warp_start = warp[v].start;
      mv.warp_count = warp[v].count;
      mv.dest = version_name(g.nodes[v].id, j);
      mv.operands = {version_name(g.nodes[v].id, j + 1)};
      note_version(mv.dest, g.nodes[v].id);
      note_version(mv.operands[0], g.nodes[v].id);
      mv.text = render(mv);
      out[1].push_back({{mv.cycle, 2, v, j}, std::move(mv)});
    }
  }

  for (int r = 0; r < 3; ++r) {
    std::stable_sort(out[r].begin(), out[r].end(),
                     [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
    auto& dst = r == 0 ? p.prologue : r == 1 ? p.steady_state : p.epilogue;
    for (Keyed& k : out[r]) dst.push_back(std::move(k.instr));
  }
  p.version_map = std::move(versions);
  return p;
}

std::string emit_listing(const PipelinedProgram& p) {
  std::string s;
  auto region = [&](const char* name, const std::vector<PipelinedInstr>& is) {
    s += name;
    s += ":\n";
    for (const PipelinedInstr& in : is) {
      s += "  @warp[" + std::to_string(in.warp_start) + ".." +
           std::to_string(in.warp_start + in.warp_count - 1) + "] @cycle " +
           std::to_string(in.cycle) + "  " + in.text + "\n";
    }
  };
  region("prologue", p.prologue);
  region("steady_state", p.steady_state);
  region("epilogue", p.epilogue);
  return s;
}

std::string program_to_json(const PipelinedProgram& p) {
  json j;
  j["I"] = p.initiation_interval;
  j["copies"] = p.copies;
  j["L"] = p.length;
  j["horizon"] = p.horizon;
  auto dump = [&](const std::vector<PipelinedInstr>& is) {
    json arr = json::array();
    for (const PipelinedInstr& in : is) {
      json o;
      o["kind"] = in.kind;
      o["node"] = in.node;
      o["copy"] = in.copy;
      o["cycle"] = in.cycle;
      o["warp_start"] = in.warp_start;
      o["warp_count"] = in.warp_count;
      o["dest"] = in.dest;
      o["operands"] = in.operands;
      json sp = json::array();
      for (bool b : in.spilled) sp.push_back(b);
      o["spilled"] = sp;
      o["text"] = in.text;
      arr.push_back(std::move(o));
    }
    return arr;
  };
  j["prologue"] = dump(p.prologue);
  j["steady_state"] = dump(p.steady_state);
  j["epilogue"] = dump(p.epilogue);
  j["version_map"] = p.version_map;
  return j.dump(2) + "\n";
}

}  // namespace weftsched
