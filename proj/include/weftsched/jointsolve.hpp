#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weftsched/ir.hpp"
#include "weftsched/modsched.hpp"
#include "weftsched/solverio.hpp"

// Joint software-pipelining and warp-specialization. For a candidate (I, L)
// the straight-line program Q (ceil(L/I) copies over horizon T) is encoded as
// one constraint system over
//   op_<id>_<i>_<t>   instance (v, copy i) issues at cycle t
//   live_<id>_<i>_<t> the value of (v, i) is resident at cycle t
//   opw_<id>_<w>      v runs on the warp range starting at w
// plus auxiliary products for register accounting. A model is a pipelined
// schedule together with a warp assignment; unsat at (I, L) drives the outer
// search to the next candidate.

namespace weftsched {

struct JointEncoding {
  SolverRequest request;
  std::int64_t ii = 1;
  std::int64_t length = 1;
  std::int64_t copies = 1;
  std::int64_t horizon = 0;  // T
  // var tables; -1 where an instance/cycle pair is folded away
  std::vector<std::vector<std::vector<int>>> op;    // [v][i][t], t < T
  std::vector<std::vector<std::vector<int>>> live;  // [v][i][t], t <= T
  std::vector<std::vector<int>> opw;                // [v][slot]
  std::vector<std::vector<int>> warp_slots;         // [v] -> legal start warps
};

// Variable declarations only; the emit stages below add constraint families.
JointEncoding make_joint_encoding(const DepGraph& g, const MachineDesc& m,
                                  std::int64_t i, std::int64_t l);

// Uniqueness, consistency across copies, dependence windows, and per-cycle
// unit capacity. Completion is absorbed into the op variable domains.
void emit_modsched_constraints(JointEncoding& e, const DepGraph& g,
                               const MachineDesc& m);

// Loop-carried initialization, forward/backward liveness propagation, and
// per-cycle memory capacity over live footprints.
void emit_memory_constraints(JointEncoding& e, const DepGraph& g,
                             const MachineDesc& m);

// Warp uniqueness, the variable-latency warp reservation, register pressure
// per warp, cross-warp spill latencies, and issue isolation for blocking
// consumers.
void emit_warp_constraints(JointEncoding& e, const DepGraph& g,
                           const MachineDesc& m);

JointEncoding encode_joint(const DepGraph& g, const MachineDesc& m,
                           std::int64_t i, std::int64_t l);

struct JointSolution {
  ModuloSchedule schedule;      // M*, I, realized L
  std::vector<int> warp_start;  // by node: first warp of the assigned range
  std::vector<std::vector<std::vector<bool>>> op;    // [v][copy][t], t < T
  std::vector<std::vector<std::vector<bool>>> live;  // [v][copy][t], t <= T
  std::int64_t horizon = 0;
  std::int64_t copies = 1;
  std::map<std::string, std::int64_t> streaming_depths;
  bool operator==(const JointSolution&) const = default;
};

enum class JointStatus { sat, unsat, error };

struct JointResult {
  JointStatus status = JointStatus::error;
  JointSolution solution;  // meaningful only when sat
  std::string message;
};

// One (I, L) query. `hints` optionally carries a modulo schedule whose
// placements are tried first, so a seed that extends to a joint solution is
// returned unchanged.
JointResult solve_joint_at(const DepGraph& g, const MachineDesc& m,
                           std::int64_t i, std::int64_t l,
                           const std::vector<std::int64_t>& hints = {},
                           const SolveOptions& opts = {});

// Seeded form: (I, L) and the hint vector come from the seed schedule.
JointResult solve_joint(const DepGraph& g, const MachineDesc& m,
                        const ModuloSchedule& seed,
                        const SolveOptions& opts = {});

// Streaming rewrite: variable-latency ops with no predecessors become
// zero-cycle issues (their latency is hidden by a deepened buffer), with
// reservations cleared and outgoing delays kept. Returns the rewritten graph
// and the ids of the rewritten nodes.
std::pair<DepGraph, std::vector<std::string>> apply_streaming_opt(
    const DepGraph& g);

struct SearchAttempt {
  std::int64_t ii = 0;
  std::optional<std::int64_t> length;  // empty when no schedule existed
  std::string outcome;                 // no_modulo_schedule | unsat | sat
  bool operator==(const SearchAttempt&) const = default;
};

struct JointSearchResult {
  JointStatus status = JointStatus::error;
  JointSolution solution;
  std::vector<SearchAttempt> attempts;
  std::string message;
};

// Minimal-I search: for each I ascending, take the optimal modulo schedule,
// then retry the joint system with L stepped up while the copy count holds;
// the first sat decides. Streaming is applied before the search; streamed
// nodes get `stream_depth` recorded in the solution. `max_ii` of 0 picks a
// ceiling of 8x the larger of the two lower bounds.
JointSearchResult joint_search(const DepGraph& g, const MachineDesc& m,
                               std::int64_t max_ii = 0,
                               std::int64_t stream_depth = 2,
                               const SolveOptions& opts = {});

}  // namespace weftsched
