#pragma once

#include <cstdint>
#include <vector>

#include "weftsched/ir.hpp"

// Cost normalization: raw cycle counts (often in the thousands) are mapped to
// small integers whose pairwise ratios deviate as little as possible from the
// originals, keeping the downstream constraint systems tractable. Scheduling
// with k*C' for any k >= 1 is isomorphic to scheduling with C', so only the
// ratios matter.

namespace weftsched {

// One duration site in the graph that a cost entry came from.
struct CostSite {
  enum class Kind { node_cycles, edge_delay, node_spill };
  Kind kind = Kind::node_cycles;
  int index = 0;        // node or edge index
  int value_index = 0;  // into CostVector::values
  bool operator==(const CostSite&) const = default;
};

struct CostVector {
  std::vector<std::int64_t> values;        // deduplicated durations, C or C'
  std::int64_t resolution_bound = 0;       // U; 0 on raw vectors
  std::int64_t achieved_distortion = 0;    // F; 0 on raw vectors
  std::vector<CostSite> sites;             // stable map back to the graph
  bool operator==(const CostVector&) const = default;
};

// Collects every positive duration in the problem: cycles(v) for each node,
// each edge delay d > 0, each spill_cost > 0. Values are deduplicated in
// first-appearance order; sites record where each came from.
CostVector collect_costs(const DepGraph& g);

// Minimizes F = max |C[i]*C'[j] - C[j]*C'[i]| over integer C' with C'[i] >= 1
// and sum(C') <= u. Ties broken by smallest sum(C'), then lexicographically
// smallest C'. Throws std::invalid_argument when u < |C| (no C' fits).
// The search is exhaustive on the bounded lattice when the lattice is small
// enough to walk; larger requests are dispatched through solverio.
CostVector normalize_costs(const CostVector& c, std::int64_t u);

// Rewrites every duration site with its normalized value. RRT occupancy
// patterns are stretched to the new cycle count by row resampling; zero
// durations are untouched.
DepGraph apply_normalization(const DepGraph& g, const CostVector& normalized);

}  // namespace weftsched
