#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weftsched/codegen.hpp"
#include "weftsched/ir.hpp"
#include "weftsched/jointsolve.hpp"
#include "weftsched/modsched.hpp"

// Machine-model validation and discrete simulation. The validator re-checks
// every constraint family directly on the solution tables (no solver trust);
// the simulators provide the in-order baseline and the pipelined replay whose
// steady-state rate the scheduler is optimizing.

namespace weftsched {

struct Violation {
  std::string family;  // constraint family, e.g. "capacity"
  std::string message;
  bool operator==(const Violation&) const = default;
};

// Liveness fixed point implied by an issue table: a value is resident from
// its issue cycle until its last in-window use, and only the last copy of a
// loop-carried producer survives to the horizon.
std::vector<std::vector<std::vector<bool>>> compute_live_tables(
    const DepGraph& g, const std::vector<std::vector<std::vector<bool>>>& op,
    std::int64_t copies, std::int64_t horizon);

// Unfolds a modulo schedule into full solution tables: copy c of v issues at
// M(v) + c*I, liveness by fixed point. warp_start defaults to all zeros.
JointSolution expand_solution(const DepGraph& g, const ModuloSchedule& s,
                              const std::vector<int>& warp_start = {});

// Empty iff every family holds: completion windows, uniqueness, consistency,
// dependence, unit capacity, memory capacity, liveness agreement, warp
// alignment, the variable-latency reservation, per-warp register limits,
// cross-warp spill latencies with their receive-point synchronization, and
// blocking-consumer isolation.
std::vector<Violation> validate_program(const JointSolution& sol,
                                        const DepGraph& g,
                                        const MachineDesc& m);

struct IssueRecord {
  std::size_t node = 0;
  std::int64_t iteration = 0;
  std::int64_t cycle = 0;
  int warp_start = 0;
  int warp_count = 1;
  bool operator==(const IssueRecord&) const = default;
};

struct ExecutionTrace {
  std::vector<IssueRecord> issues;  // chronological
  std::vector<std::vector<std::int64_t>> unit_occupancy;  // [cycle][unit]
  std::vector<std::vector<int>> warp_issues;              // [cycle][warp]
  std::int64_t iterations = 0;
  std::int64_t cycles_elapsed = 0;
  std::int64_t throughput_num = 0;  // iterations per cycle, reduced
  std::int64_t throughput_den = 1;
  std::int64_t steady_num = 0;  // steady-state rate, reduced
  std::int64_t steady_den = 1;
};

// Naive single-warp baseline: one instruction per cycle in declaration order
// per iteration, stalling on dependence delays and unit capacity, never
// reordering. Throughput = iterations / cycles.
ExecutionTrace simulate_inorder(const DepGraph& g, const MachineDesc& m,
                                std::int64_t iterations);

// Replays the synthesized program: prologue once, the steady body
// iterations - copies + 1 times advancing exactly I cycles per trip, then the
// epilogue. Throws std::runtime_error when a dependence is unsatisfied at its
// scheduled cycle or a unit exceeds capacity (a codegen bug), and
// std::invalid_argument when iterations < copies.
ExecutionTrace simulate_pipeline(const PipelinedProgram& p, const DepGraph& g,
                                 const MachineDesc& m, std::int64_t iterations);

}  // namespace weftsched
