#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "weftsched/ir.hpp"
#include "weftsched/jointsolve.hpp"

// Program synthesis from a joint solution: the straight-line window Q* is
// sliced into prologue / steady-state loop / epilogue, values that cross
// stage boundaries get versioned names with end-of-body move-backs (S vs. Sn)
// and loop-carried self operands are written with shifted indices (O[i-1]).

namespace weftsched {

struct PipelinedInstr {
  std::string kind;  // "op" | "move" | "spill_recv"
  std::string node;  // graph node id the instruction belongs to
  std::int64_t copy = 0;
  std::int64_t cycle = 0;  // issue cycle within the region
  int warp_start = 0;
  int warp_count = 1;
  std::string dest;
  std::vector<std::string> operands;
  std::vector<bool> spilled;  // operand sourced from a different warp range
  std::string text;           // rendered form, e.g. "O = O(P, O[i-1])"
  bool operator==(const PipelinedInstr&) const = default;
};

struct PipelinedProgram {
  std::vector<PipelinedInstr> prologue;
  std::vector<PipelinedInstr> steady_state;
  std::vector<PipelinedInstr> epilogue;
  std::map<std::string, std::string> version_map;  // versioned name -> node id
  std::int64_t initiation_interval = 1;
  std::int64_t copies = 1;
  std::int64_t length = 1;
  std::int64_t horizon = 0;
  bool operator==(const PipelinedProgram&) const = default;
};

// Slices the placements at the region boundaries ((copies-1)*I and
// (copies-1)*I + I) and renders every instance. Values consumed a stage after
// their definition are written to versioned names (id + one 'n' per pending
// stage) and shifted down by the end-of-body moves; names needed before the
// first steady trip fall back to pre-loop versions (id_p1, id_p2, ...).
PipelinedProgram synthesize(const JointSolution& sol, const DepGraph& g);

// Deterministic text form: region headers and one line per instruction with
// `@warp[a..b] @cycle t` annotations.
std::string emit_listing(const PipelinedProgram& p);

// Structured JSON form for --format json.
std::string program_to_json(const PipelinedProgram& p);

}  // namespace weftsched
