#include "weftsched/ir.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace weftsched {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int MachineDesc::unit_index(const std::string& name) const {
  for (size_t i = 0; i < units.size(); ++i)
    if (units[i].name == name) return static_cast<int>(i);
  return -1;
}

int MachineDesc::memory_index(const std::string& name) const {
  for (size_t i = 0; i < memories.size(); ++i)
    if (memories[i].name == name) return static_cast<int>(i);
  return -1;
}

int DepGraph::node_index(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

namespace {

// nlohmann reports byte offsets only; convert to 1-based line/column.
std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, 0, 0); }

void expect_keys(const json& obj, const char* what,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(std::string("unknown key \"") + it.key() + "\" in " + what);
  }
}

std::int64_t get_int(const json& obj, const char* what, const char* key,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    fail(std::string(what) + " is missing required key \"" + key + "\"");
  }
  if (!it->is_number_integer())
    fail(std::string(what) + " key \"" + key + "\" must be an integer");
  return it->get<std::int64_t>();
}

std::string get_string(const json& obj, const char* what, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(std::string(what) + " is missing required key \"" + key + "\"");
  if (!it->is_string())
    fail(std::string(what) + " key \"" + key + "\" must be a string");
  return it->get<std::string>();
}

bool get_bool(const json& obj, const char* what, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean())
    fail(std::string(what) + " key \"" + key + "\" must be a boolean");
  return it->get<bool>();
}

}  // namespace

Problem parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col;
    throw ParseError(os.str(), line, col);
  }
  if (!root.is_object()) fail("top level must be an object");
  expect_keys(root, "problem", {"machine", "graph"});
  if (!root.contains("machine") || !root.contains("graph"))
    fail("problem requires \"machine\" and \"graph\"");

  Problem p;
  const json& mj = root["machine"];
  if (!mj.is_object()) fail("\"machine\" must be an object");
  expect_keys(mj, "machine",
              {"units", "memories", "num_warps", "reg_limit", "vl_warp"});
  if (!mj.contains("units") || !mj["units"].is_array())
    fail("machine requires a \"units\" array");
  for (const json& uj : mj["units"]) {
    if (!uj.is_object()) fail("unit entries must be objects");
    expect_keys(uj, "unit", {"name", "capacity"});
    FunctionalUnitKind u;
    u.name = get_string(uj, "unit", "name");
    u.capacity = get_int(uj, "unit", "capacity");
    if (u.capacity <= 0) fail("unit \"" + u.name + "\" capacity must be positive");
    if (p.machine.unit_index(u.name) >= 0) fail("duplicate unit \"" + u.name + "\"");
    p.machine.units.push_back(std::move(u));
  }
  if (mj.contains("memories")) {
    if (!mj["memories"].is_array()) fail("\"memories\" must be an array");
    for (const json& memj : mj["memories"]) {
      if (!memj.is_object()) fail("memory entries must be objects");
      expect_keys(memj, "memory", {"name", "capacity"});
      MemoryKind mem;
      mem.name = get_string(memj, "memory", "name");
      mem.capacity = get_int(memj, "memory", "capacity");
      if (mem.capacity < 0) fail("memory \"" + mem.name + "\" capacity must be >= 0");
      if (p.machine.memory_index(mem.name) >= 0)
        fail("duplicate memory \"" + mem.name + "\"");
      p.machine.memories.push_back(std::move(mem));
    }
  }
  p.machine.num_warps = static_cast<int>(get_int(mj, "machine", "num_warps"));
  if (p.machine.num_warps <= 0) fail("num_warps must be positive");
  p.machine.reg_limit = get_int(mj, "machine", "reg_limit");
  if (p.machine.reg_limit < 0) fail("reg_limit must be >= 0");
  p.machine.vl_warp = static_cast<int>(get_int(mj, "machine", "vl_warp"));
  if (p.machine.vl_warp < 0 || p.machine.vl_warp >= p.machine.num_warps)
    fail("vl_warp must lie in [0, num_warps)");

  const json& gj = root["graph"];
  if (!gj.is_object()) fail("\"graph\" must be an object");
  expect_keys(gj, "graph", {"nodes", "edges"});
  if (!gj.contains("nodes") || !gj["nodes"].is_array())
    fail("graph requires a \"nodes\" array");
  if (gj["nodes"].empty()) fail("graph has no nodes");
  for (const json& nj : gj["nodes"]) {
    if (!nj.is_object()) fail("node entries must be objects");
    expect_keys(nj, "node",
                {"id", "rrt", "cycles", "regs", "footprint", "spill_cost",
                 "variable_latency", "warps_required"});
    Node n;
    n.id = get_string(nj, "node", "id");
    if (n.id.empty()) fail("node id must be nonempty");
    if (p.graph.node_index(n.id) >= 0) fail("duplicate node \"" + n.id + "\"");
    n.rrt.cycles = get_int(nj, "node", "cycles");
    if (n.rrt.cycles < 1) fail("node \"" + n.id + "\" cycles must be >= 1");
    n.rrt.use.assign(p.machine.units.size(),
                     std::vector<std::int64_t>(n.rrt.cycles, 0));
    if (nj.contains("rrt")) {
      if (!nj["rrt"].is_object()) fail("node \"" + n.id + "\" rrt must be an object");
      for (auto it = nj["rrt"].begin(); it != nj["rrt"].end(); ++it) {
        int f = p.machine.unit_index(it.key());
        if (f < 0) fail("node \"" + n.id + "\" uses undeclared unit \"" + it.key() + "\"");
        if (!it->is_array()) fail("rrt rows must be arrays");
        if (static_cast<std::int64_t>(it->size()) > n.rrt.cycles)
          fail("node \"" + n.id + "\" rrt row for \"" + it.key() +
               "\" is longer than cycles");
        for (size_t c = 0; c < it->size(); ++c) {
          const json& cell = (*it)[c];
          if (!cell.is_number_integer()) fail("rrt entries must be integers");
          std::int64_t v = cell.get<std::int64_t>();
          if (v < 0) fail("rrt entries must be >= 0");
          n.rrt.use[f][c] = v;
        }
      }
    }
    n.regs = get_int(nj, "node", "regs", 0);
    if (n.regs < 0) fail("node \"" + n.id + "\" regs must be >= 0");
    n.footprint.assign(p.machine.memories.size(), 0);
    if (nj.contains("footprint")) {
      if (!nj["footprint"].is_object())
        fail("node \"" + n.id + "\" footprint must be an object");
      for (auto it = nj["footprint"].begin(); it != nj["footprint"].end(); ++it) {
        int mi = p.machine.memory_index(it.key());
        if (mi < 0)
          fail("node \"" + n.id + "\" footprint names undeclared memory \"" +
               it.key() + "\"");
        if (!it->is_number_integer()) fail("footprint entries must be integers");
        std::int64_t v = it->get<std::int64_t>();
        if (v < 0) fail("footprint entries must be >= 0");
        n.footprint[mi] = v;
      }
    }
    n.spill_cost = get_int(nj, "node", "spill_cost", 0);
    if (n.spill_cost < 0) fail("spill_cost must be >= 0");
    n.variable_latency = get_bool(nj, "node", "variable_latency", false);
    n.warps_required = static_cast<int>(get_int(nj, "node", "warps_required", 1));
    if (n.warps_required < 1) fail("warps_required must be >= 1");
    p.graph.nodes.push_back(std::move(n));
  }
  if (gj.contains("edges")) {
    if (!gj["edges"].is_array()) fail("\"edges\" must be an array");
    for (const json& ej : gj["edges"]) {
      if (!ej.is_object()) fail("edge entries must be objects");
      expect_keys(ej, "edge", {"src", "dst", "d", "delta", "blocking"});
      Edge e;
      std::string src = get_string(ej, "edge", "src");
      std::string dst = get_string(ej, "edge", "dst");
      e.src = p.graph.node_index(src);
      e.dst = p.graph.node_index(dst);
      if (e.src < 0) fail("edge references undeclared node \"" + src + "\"");
      if (e.dst < 0) fail("edge references undeclared node \"" + dst + "\"");
      e.d = get_int(ej, "edge", "d");
      if (e.d < 0) fail("edge d must be >= 0");
      e.delta = static_cast<int>(get_int(ej, "edge", "delta", 0));
      if (e.delta < 0) fail("edge delta must be >= 0");
      e.blocking = get_bool(ej, "edge", "blocking", false);
      p.graph.edges.push_back(e);
    }
  }
  return p;
}

std::vector<Diagnostic> validate_graph(const DepGraph& g, const MachineDesc& m) {
  std::vector<Diagnostic> out;
  const int n = static_cast<int>(g.nodes.size());

  // delta=0 subgraph must be a DAG: a cycle with total delta 0 would require
  // an op to precede itself within one iteration.
  {
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : g.edges)
      if (e.delta == 0) adj[e.src].push_back(e.dst);
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::function<bool(int)> dfs = [&](int v) -> bool {
      state[v] = 1;
      for (int w : adj[v]) {
        if (state[w] == 1) return true;
        if (state[w] == 0 && dfs(w)) return true;
      }
      state[v] = 2;
      return false;
    };
    for (int v = 0; v < n; ++v)
      if (state[v] == 0 && dfs(v)) {
        out.push_back({"zero-delta-cycle",
                       "dependence cycle with zero total iteration distance"});
        break;
      }
  }

  for (const Node& node : g.nodes) {
    for (size_t f = 0; f < node.rrt.use.size(); ++f)
      for (std::int64_t c = 0; c < node.rrt.cycles; ++c)
        if (node.rrt.use[f][c] > m.units[f].capacity) {
          out.push_back({"rrt-exceeds-capacity",
                         "node \"" + node.id + "\" reserves " +
                             std::to_string(node.rrt.use[f][c]) + " of unit \"" +
                             m.units[f].name + "\" (capacity " +
                             std::to_string(m.units[f].capacity) + ")"});
        }
    if (node.warps_required > m.num_warps)
      out.push_back({"warps-required-too-large",
                     "node \"" + node.id + "\" requires " +
                         std::to_string(node.warps_required) + " warps but the machine has " +
                         std::to_string(m.num_warps)});
  }
  return out;
}

std::string serialize_problem(const Problem& p) {
  ordered_json root;
  ordered_json mj;
  mj["units"] = ordered_json::array();
  for (const auto& u : p.machine.units)
    mj["units"].push_back({{"name", u.name}, {"capacity", u.capacity}});
  mj["memories"] = ordered_json::array();
  for (const auto& mem : p.machine.memories)
    mj["memories"].push_back({{"name", mem.name}, {"capacity", mem.capacity}});
  mj["num_warps"] = p.machine.num_warps;
  mj["reg_limit"] = p.machine.reg_limit;
  mj["vl_warp"] = p.machine.vl_warp;
  root["machine"] = std::move(mj);

  ordered_json nodes = ordered_json::array();
  for (const Node& n : p.graph.nodes) {
    ordered_json nj;
    nj["id"] = n.id;
    ordered_json rrt = ordered_json::object();
    for (size_t f = 0; f < n.rrt.use.size(); ++f) {
      bool any = false;
      for (std::int64_t v : n.rrt.use[f]) any |= v != 0;
      if (any) rrt[p.machine.units[f].name] = n.rrt.use[f];
    }
    nj["rrt"] = std::move(rrt);
    nj["cycles"] = n.rrt.cycles;
    if (n.regs != 0) nj["regs"] = n.regs;
    ordered_json fp = ordered_json::object();
    for (size_t mi = 0; mi < n.footprint.size(); ++mi)
      if (n.footprint[mi] != 0) fp[p.machine.memories[mi].name] = n.footprint[mi];
    if (!fp.empty()) nj["footprint"] = std::move(fp);
    if (n.spill_cost != 0) nj["spill_cost"] = n.spill_cost;
    if (n.variable_latency) nj["variable_latency"] = true;
    if (n.warps_required != 1) nj["warps_required"] = n.warps_required;
    nodes.push_back(std::move(nj));
  }
  ordered_json edges = ordered_json::array();
  for (const Edge& e : p.graph.edges) {
    ordered_json ej;
    ej["src"] = p.graph.nodes[e.src].id;
    ej["dst"] = p.graph.nodes[e.dst].id;
    ej["d"] = e.d;
    if (e.delta != 0) ej["delta"] = e.delta;
    if (e.blocking) ej["blocking"] = true;
    edges.push_back(std::move(ej));
  }
  root["graph"] = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  return root.dump(2) + "\n";
}

}  // namespace weftsched
