#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weftsched/ir.hpp"
#include "weftsched/solverio.hpp"

// Modulo scheduling. A schedule assigns each op a start cycle M(v) >= 0 so
// that successive loop iterations can be initiated every I cycles:
//   - for every edge (u, v, d, delta): M(v) + delta*I >= M(u) + d
//   - for every unit f and residue r in [0, I): the summed reservations of
//     all ops whose busy cycles fall on r stay within capacity(f)
//   - min over v of M(v) = 0
// Length L = max over v of M(v) + cycles(v).

namespace weftsched {

struct ModuloSchedule {
  std::vector<std::int64_t> assignments;  // M(v) by node index
  std::int64_t initiation_interval = 1;   // I
  std::int64_t length = 1;                // L
  bool operator==(const ModuloSchedule&) const = default;
};

enum class ScheduleStatus { feasible, infeasible, length_bound_too_small, error };

struct ScheduleResult {
  ScheduleStatus status = ScheduleStatus::error;
  ModuloSchedule schedule;  // meaningful only when feasible
  std::string message;
};

// Resource-derived lower bound on I: per unit, total reservations across one
// iteration divided by capacity, rounded up; at least 1.
std::int64_t res_mii(const DepGraph& g, const MachineDesc& m);

// Recurrence-derived lower bound: max over dependence cycles of
// ceil(sum d / sum delta); at least 1. Exact for any graph (elementary-cycle
// enumeration up to 12 nodes, monotone search on larger graphs).
std::int64_t rec_mii(const DepGraph& g);

// Default schedule-length bound used when the caller does not supply one.
std::int64_t default_length_bound(const DepGraph& g, std::int64_t i);

// Time-indexed system for one (I, l_max) query: binaries a_<id>_<t>, start
// integers s_<id> channeled to them, capacity rows per (unit, residue), and
// an anchor row pinning min M = 0. When with_length_objective is set, an
// integer L bounded by l_max is added, constrained to cover every finish
// time, and registered as the minimization objective.
SolverRequest build_modsched_request(const DepGraph& g, const MachineDesc& m,
                                     std::int64_t i, std::int64_t l_max,
                                     bool with_length_objective = false);

// Optimal modulo schedule at initiation interval i: minimal L first, then the
// latest assignment vector in node declaration order among minimal-L
// schedules (the documented tie-break). Distinguishes true infeasibility at i
// from exhaustion of the length bound.
ScheduleResult modulo_schedule(const DepGraph& g, const MachineDesc& m,
                               std::int64_t i, std::int64_t l_max = 0,
                               const SolveOptions& opts = {});

// Reference implementation by direct enumeration of assignment vectors.
// Intended for graphs with at most 5 nodes and l_max <= 8.
ScheduleResult brute_force_modulo_schedule(const DepGraph& g,
                                           const MachineDesc& m, std::int64_t i,
                                           std::int64_t l_max);

// True when s satisfies every dependence and the modular capacity invariant.
bool schedule_is_valid(const ModuloSchedule& s, const DepGraph& g,
                       const MachineDesc& m);

// Steady-state reservation table: rows[unit][residue] summed over all ops,
// folding each busy cycle to (M(v) + c) mod I.
std::vector<std::vector<std::int64_t>> modular_rrt(const ModuloSchedule& s,
                                                   const DepGraph& g,
                                                   const MachineDesc& m);

}  // namespace weftsched
