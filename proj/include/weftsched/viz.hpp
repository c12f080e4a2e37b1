#pragma once

#include <string>

#include "weftsched/ir.hpp"
#include "weftsched/jointsolve.hpp"

// Static visualization emitters. Both are pure string builders with integer
// geometry, so repeated runs are byte-identical.

namespace weftsched {

// DOT digraph of the dependence structure. With a solution, nodes are filled
// by warp range from a fixed palette; variable-latency nodes are diamonds;
// loop-carried edges are dashed and labeled with their distance; blocking
// edges are drawn heavy.
std::string emit_dot(const DepGraph& g, const JointSolution* sol = nullptr);

// SVG Gantt chart of the unrolled window: one row per functional unit and per
// warp, one box per (node, copy) spanning its cycles, with the prologue /
// steady-state / epilogue bands shaded and the steady band dash-outlined.
std::string emit_gantt(const JointSolution& sol, const DepGraph& g,
                       const MachineDesc& m);

}  // namespace weftsched
