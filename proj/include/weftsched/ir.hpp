#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core IR: the machine description and the loop dependence graph of tile-level
// ops that every other component consumes. Durations are kept as int64 because
// raw inputs carry unnormalized costs (e.g. cycle counts in the thousands).

namespace weftsched {

struct FunctionalUnitKind {
  std::string name;
  std::int64_t capacity = 1;  // > 0
  bool operator==(const FunctionalUnitKind&) const = default;
};

struct MemoryKind {
  std::string name;
  std::int64_t capacity = 0;  // >= 0
  bool operator==(const MemoryKind&) const = default;
};

struct MachineDesc {
  std::vector<FunctionalUnitKind> units;
  std::vector<MemoryKind> memories;
  int num_warps = 1;           // > 0
  std::int64_t reg_limit = 0;  // per warp, >= 0
  int vl_warp = 0;             // warp reserved for variable-latency ops, in [0, num_warps)
  bool operator==(const MachineDesc&) const = default;

  int unit_index(const std::string& name) const;    // -1 if absent
  int memory_index(const std::string& name) const;  // -1 if absent
};

// Resource reservation table: use[f][c] = units of f held in the c'th cycle
// after issue. cycles == 0 only for zero-latency streaming ops produced by
// the streaming rewrite; parsed inputs always have cycles >= 1.
struct Rrt {
  std::vector<std::vector<std::int64_t>> use;  // [unit][cycle], dense
  std::int64_t cycles = 1;
  bool operator==(const Rrt&) const = default;
};

struct Node {
  std::string id;
  Rrt rrt;
  std::int64_t regs = 0;
  std::vector<std::int64_t> footprint;  // by memory index, dense
  std::int64_t spill_cost = 0;
  bool variable_latency = false;
  int warps_required = 1;
  bool operator==(const Node&) const = default;
};

// v must issue at least d cycles after u, delta iterations earlier.
struct Edge {
  int src = 0;
  int dst = 0;
  std::int64_t d = 0;
  int delta = 0;
  bool blocking = false;
  bool operator==(const Edge&) const = default;
};

struct DepGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  bool operator==(const DepGraph&) const = default;

  int node_index(const std::string& id) const;  // -1 if absent
};

struct Problem {
  DepGraph graph;
  MachineDesc machine;
  bool operator==(const Problem&) const = default;
};

// Thrown on malformed problem text. line/column are 1-based positions into the
// input; 0 when the failure is structural rather than lexical.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int column)
      : std::runtime_error(std::move(msg)), line(line), column(column) {}
  int line = 0;
  int column = 0;
};

struct Diagnostic {
  std::string code;  // stable identifier, e.g. "zero-delta-cycle"
  std::string message;
};

// Parses problem JSON. Unknown keys are rejected; defaults are applied
// (delta=0, blocking=false, regs=0, footprint empty, spill_cost=0,
// variable_latency=false, warps_required=1). Structural errors throw
// ParseError with position information where available.
Problem parse_problem(const std::string& text);

// Structural checks beyond grammar: the delta=0 subgraph must be acyclic
// (every dependence cycle advances at least one iteration), RRT entries must
// fit unit capacities, and warps_required must fit within num_warps.
// Returns an empty vector when the problem is well-formed.
std::vector<Diagnostic> validate_graph(const DepGraph& g, const MachineDesc& m);

// Canonical JSON rendering; parse_problem(serialize_problem(p)) == p.
std::string serialize_problem(const Problem& p);

}  // namespace weftsched
