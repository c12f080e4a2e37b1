#pragma once

#include <cstdint>
#include <vector>

#include "weftsched/modsched.hpp"

// Unrolls a modulo schedule into the straight-line program Q: ceil(L/I)
// overlapping copies of the loop body, copy i shifted by i*I cycles. The
// first (copies-1)*I cycles form the prologue, the next I cycles the steady
// state, and the remainder the epilogue.

namespace weftsched {

struct StraightLineProgram {
  std::int64_t copies = 1;
  std::int64_t horizon = 0;        // T = (copies-1)*I + L
  std::int64_t prologue_end = 0;   // first steady-state cycle
  std::int64_t steady_end = 0;     // first epilogue cycle
  std::int64_t initiation_interval = 1;
  std::int64_t length = 1;
  std::vector<std::vector<std::int64_t>> placements;  // [node][copy] cycle
  bool operator==(const StraightLineProgram&) const = default;
};

StraightLineProgram build_straightline(const ModuloSchedule& s);

}  // namespace weftsched
