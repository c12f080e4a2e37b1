#include "weftsched/straightline.hpp"

namespace weftsched {

StraightLineProgram build_straightline(const ModuloSchedule& s) {
  StraightLineProgram q;
  q.initiation_interval = s.initiation_interval;
  q.length = s.length;
  q.copies = (s.length + s.initiation_interval - 1) / s.initiation_interval;
  q.horizon = (q.copies - 1) * s.initiation_interval + s.length;
  q.prologue_end = (q.copies - 1) * s.initiation_interval;
  q.steady_end = q.prologue_end + s.initiation_interval;
  q.placements.resize(s.assignments.size());
  for (std::size_t v = 0; v < s.assignments.size(); ++v) {
    q.placements[v].resize(static_cast<std::size_t>(q.copies));
    for (std::int64_t c = 0; c < q.copies; ++c)
      q.placements[v][static_cast<std::size_t>(c)] =
          s.assignments[v] + c * s.initiation_interval;
  }
  return q;
}

}  // namespace weftsched
