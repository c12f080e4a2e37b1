#include "weftsched/jointsolve.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "testutil.hpp"
#include "weftsched/modsched.hpp"

using namespace weftsched;

namespace {

std::int64_t eff(const Node& n) {
  return std::max<std::int64_t>(1, n.rrt.cycles);
}

// Shift a decoded (anchor-free) assignment vector to min = 0 and recompute
// the realized length, so schedule_is_valid applies.
ModuloSchedule anchored(const JointSolution& s, const DepGraph& g) {
  ModuloSchedule m = s.schedule;
  std::int64_t lo = m.assignments[0];
  for (std::int64_t a : m.assignments) lo = std::min(lo, a);
  std::int64_t len = 1;
  for (std::size_t v = 0; v < m.assignments.size(); ++v) {
    m.assignments[v] -= lo;
    len = std::max(len, m.assignments[v] + eff(g.nodes[v]));
  }
  m.length = len;
  return m;
}

// Producer u spills to v, which occupies two warps so their ranges always
// differ; w is an independent three-cycle op whose execution straddles the
// transfer's receive point.
Problem spill_receive_problem(int num_warps) {
  Problem p;
  p.machine.units = {{"A", 1}, {"B", 1}};
  p.machine.num_warps = num_warps;
  p.machine.reg_limit = 0;
  p.machine.vl_warp = 0;
  Node u;
  u.id = "u";
  u.rrt.cycles = 1;
  u.rrt.use = {{1}, {0}};
  u.spill_cost = 2;
  Node v;
  v.id = "v";
  v.rrt.cycles = 1;
  v.rrt.use = {{1}, {0}};
  v.warps_required = 2;
  Node w;
  w.id = "w";
  w.rrt.cycles = 3;
  w.rrt.use = {{0, 0, 0}, {1, 1, 1}};
  p.graph.nodes = {u, v, w};
  p.graph.edges = {{0, 1, 1, 0, false}};
  return p;
}

// Two register-heavy producers feeding one consumer two cycles later; with
// reg_limit 4 a single warp cannot hold both values at once.
Problem register_pressure_problem(int num_warps, std::int64_t reg_limit) {
  Problem p;
  p.machine.units = {{"ALU", 2}};
  p.machine.num_warps = num_warps;
  p.machine.reg_limit = reg_limit;
  p.machine.vl_warp = 0;
  Node a;
  a.id = "a";
  a.rrt.cycles = 1;
  a.rrt.use = {{1}};
  a.regs = 3;
  Node b = a;
  b.id = "b";
  Node c = a;
  c.id = "c";
  c.regs = 0;
  p.graph.nodes = {a, b, c};
  p.graph.edges = {{0, 2, 2, 0, false}, {1, 2, 2, 0, false}};
  return p;
}

}  // namespace

TEST_CASE("joint encoding folds instance windows") {
  Problem p = testing::attention_problem();
  JointEncoding e = make_joint_encoding(p.graph, p.machine, 2, 4);
  CHECK(e.copies == 2);
  CHECK(e.horizon == 6);
  // copy 0 of S may issue in [0, 3], copy 1 in [2, 5]
  CHECK(e.op[0][0][0] >= 0);
  CHECK(e.op[0][0][3] >= 0);
  CHECK(e.op[0][0][4] == -1);
  CHECK(e.op[0][1][1] == -1);
  CHECK(e.op[0][1][2] >= 0);
  CHECK(e.op[0][1][5] >= 0);
  CHECK(e.request.find_var("op_S_0_0") == e.op[0][0][0]);
  CHECK(e.request.find_var("op_S_1_4") == e.op[0][1][4]);
  CHECK(e.request.find_var("live_O_1_6") == e.live[2][1][6]);
  // four single-warp slots per op
  CHECK(e.warp_slots[1] == std::vector<int>{0, 1, 2, 3});
  CHECK(e.request.find_var("opw_P_2") == e.opw[1][2]);
}

TEST_CASE("seeded joint solve extends the attention optimum") {
  Problem p = testing::attention_problem();
  ScheduleResult sr = modulo_schedule(p.graph, p.machine, 2);
  REQUIRE(sr.status == ScheduleStatus::feasible);
  JointResult jr = solve_joint(p.graph, p.machine, sr.schedule);
  REQUIRE(jr.status == JointStatus::sat);
  const JointSolution& s = jr.solution;
  CHECK(s.schedule.assignments == std::vector<std::int64_t>{0, 2, 3});
  CHECK(s.schedule.length == 4);
  CHECK(s.copies == 2);
  CHECK(s.horizon == 6);
  // copies repeat the kernel shifted by I
  for (std::size_t v = 0; v < 3; ++v)
    for (std::int64_t t = 0; t + 2 < 6; ++t)
      if (s.op[v][0][static_cast<std::size_t>(t)])
        CHECK(s.op[v][1][static_cast<std::size_t>(t + 2)]);
  // only the accumulator is carried past the horizon
  CHECK(s.live[2][1][6]);
  CHECK_FALSE(s.live[2][0][6]);
  CHECK_FALSE(s.live[0][0][6]);
  CHECK_FALSE(s.live[0][1][6]);
  // S issues at 0 and P consumes it at 2: live exactly over [issue, use)
  CHECK(s.live[0][0][0]);
  CHECK(s.live[0][0][1]);
  CHECK_FALSE(s.live[0][0][2]);
  for (int v = 0; v < 3; ++v) {
    CHECK(s.warp_start[static_cast<std::size_t>(v)] >= 0);
    CHECK(s.warp_start[static_cast<std::size_t>(v)] < 4);
  }
}

TEST_CASE("blocking consumer cannot share its issue cycle") {
  Problem p = testing::search_climb_problem();
  // u@0, v@1 forced; w has nowhere left at L=2: cycle 0 is full on F1 and
  // cycle 1 belongs to the blocked consumer's warp
  CHECK(solve_joint_at(p.graph, p.machine, 2, 2).status == JointStatus::unsat);
  CHECK(solve_joint_at(p.graph, p.machine, 3, 2).status == JointStatus::unsat);
  JointResult jr = solve_joint_at(p.graph, p.machine, 3, 3);
  REQUIRE(jr.status == JointStatus::sat);
  CHECK(anchored(jr.solution, p.graph).assignments ==
        std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("concurrency window covers multi-cycle ops") {
  Problem p;
  p.machine.units = {{"A", 1}, {"B", 2}};
  p.machine.num_warps = 1;
  p.machine.reg_limit = 0;
  p.machine.vl_warp = 0;
  Node u;
  u.id = "u";
  u.rrt.cycles = 1;
  u.rrt.use = {{1}, {0}};
  Node v = u;
  v.id = "v";
  Node o;
  o.id = "o";
  o.rrt.cycles = 2;
  o.rrt.use = {{0, 0}, {1, 1}};
  p.graph.nodes = {u, v, o};
  p.graph.edges = {{0, 1, 1, 0, true}};

  // L=2: v lands at 1 and o's two-cycle execution must straddle it
  CHECK(solve_joint_at(p.graph, p.machine, 4, 2).status == JointStatus::unsat);
  JointResult jr = solve_joint_at(p.graph, p.machine, 4, 3);
  REQUIRE(jr.status == JointStatus::sat);
  const auto m = anchored(jr.solution, p.graph).assignments;
  const std::int64_t tv = jr.solution.schedule.assignments[1];
  const std::int64_t to = jr.solution.schedule.assignments[2];
  CHECK((tv < to || tv > to + 1));  // v issues outside o's busy window
  CHECK(m[1] >= m[0] + 1);
}

TEST_CASE("one compute warp cannot absorb a blocking wait at interval 1") {
  // the streamed load frees the latency-hiding warp; what remains is whether
  // the gemm can dodge the add's isolated issue cycles
  Problem p1 = testing::blocking_sync_problem(1);
  auto [g1, ids1] = apply_streaming_opt(p1.graph);
  REQUIRE(ids1 == std::vector<std::string>{"LOAD"});
  ScheduleResult sr = modulo_schedule(g1, p1.machine, 1);
  REQUIRE(sr.status == ScheduleStatus::feasible);
  REQUIRE(sr.schedule.length == 3);
  CHECK(solve_joint_at(g1, p1.machine, 1, 3).status == JointStatus::unsat);

  Problem p2 = testing::blocking_sync_problem(2);
  auto [g2, ids2] = apply_streaming_opt(p2.graph);
  JointResult jr = solve_joint_at(g2, p2.machine, 1, 3);
  REQUIRE(jr.status == JointStatus::sat);
  const auto& w = jr.solution.warp_start;
  CHECK(w[0] == 2);       // load holds the variable-latency warp
  CHECK(w[2] != w[1]);    // gemm off the blocked add's warp
  CHECK(w[2] != w[3]);    // exp off the blocked add's warp
  CHECK(w[1] != 2);
  CHECK(w[3] != 2);
}

TEST_CASE("search over the blocked instance settles at interval 2") {
  Problem p = testing::blocking_sync_problem(1);
  JointSearchResult r = joint_search(p.graph, p.machine);
  REQUIRE(r.status == JointStatus::sat);
  std::vector<SearchAttempt> want = {
      {1, 3, "unsat"},
      {2, 3, "sat"},
  };
  CHECK(r.attempts == want);
  CHECK(r.solution.schedule.initiation_interval == 2);
  CHECK(r.solution.streaming_depths ==
        std::map<std::string, std::int64_t>{{"LOAD", 2}});
}

TEST_CASE("register pressure forces warp specialization") {
  // both producers' values overlap for at least one cycle, so 3+3 registers
  // exceed a limit of 4 on any single warp
  Problem p1 = register_pressure_problem(1, 4);
  CHECK(solve_joint_at(p1.graph, p1.machine, 4, 4).status ==
        JointStatus::unsat);

  Problem p2 = register_pressure_problem(2, 4);
  JointResult jr = solve_joint_at(p2.graph, p2.machine, 4, 4);
  REQUIRE(jr.status == JointStatus::sat);
  CHECK(jr.solution.warp_start[0] != jr.solution.warp_start[1]);

  // raising the limit past total demand takes the fast path out
  Problem p3 = register_pressure_problem(1, 8);
  CHECK(solve_joint_at(p3.graph, p3.machine, 4, 4).status == JointStatus::sat);
}

TEST_CASE("cross-warp spills delay the consumer") {
  Problem p = spill_receive_problem(3);
  // v's two-warp range never equals u's single warp, so every placement pays
  // d + spill_cost
  CHECK(solve_joint_at(p.graph, p.machine, 4, 3).status == JointStatus::unsat);
  JointResult jr = solve_joint_at(p.graph, p.machine, 4, 4);
  REQUIRE(jr.status == JointStatus::sat);
  CHECK(jr.solution.schedule.assignments[1] -
            jr.solution.schedule.assignments[0] ==
        3);
}

TEST_CASE("spill receive point is guarded on the consumer warps") {
  // with three warps, w escapes to the warp outside v's range; with two,
  // w's execution necessarily covers the receive cycle on a receiving warp
  CHECK(solve_joint_at(spill_receive_problem(2).graph,
                       spill_receive_problem(2).machine, 4, 4)
            .status == JointStatus::unsat);
  Problem p = spill_receive_problem(3);
  JointResult jr = solve_joint_at(p.graph, p.machine, 4, 4);
  REQUIRE(jr.status == JointStatus::sat);
  CHECK(jr.solution.warp_start[2] == 2);
}

TEST_CASE("variable latency ops reserve their warp") {
  Problem p;
  p.machine.units = {{"A", 2}};
  p.machine.num_warps = 2;
  p.machine.reg_limit = 0;
  p.machine.vl_warp = 1;
  Node r;
  r.id = "r";
  r.rrt.cycles = 1;
  r.rrt.use = {{1}};
  r.variable_latency = true;
  Node s = r;
  s.id = "s";
  s.variable_latency = false;
  p.graph.nodes = {r, s};
  JointResult jr = solve_joint_at(p.graph, p.machine, 2, 2);
  REQUIRE(jr.status == JointStatus::sat);
  CHECK(jr.solution.warp_start[0] == 1);
  CHECK(jr.solution.warp_start[1] == 0);

  // a two-warp op would overlap the reserved warp: no legal slot remains
  p.graph.nodes[1].warps_required = 2;
  CHECK(solve_joint_at(p.graph, p.machine, 2, 2).status == JointStatus::unsat);
}

TEST_CASE("streaming rewrites source loads only") {
  Problem p = testing::blocking_sync_problem(1);
  auto [g, ids] = apply_streaming_opt(p.graph);
  REQUIRE(ids == std::vector<std::string>{"LOAD"});
  CHECK(g.nodes[0].rrt.cycles == 0);
  for (const auto& row : g.nodes[0].rrt.use) CHECK(row.empty());
  CHECK(g.nodes[1].rrt.cycles == 1);
  CHECK(g.edges == p.graph.edges);

  // a variable-latency op with a predecessor keeps its cost
  DepGraph g2 = p.graph;
  g2.edges.push_back({1, 0, 1, 1, false});
  auto [g3, ids3] = apply_streaming_opt(g2);
  CHECK(ids3.empty());
  CHECK(g3.nodes[0].rrt.cycles == 1);
}

TEST_CASE("search report climbs in program order") {
  Problem p = testing::search_climb_problem();
  JointSearchResult r = joint_search(p.graph, p.machine);
  REQUIRE(r.status == JointStatus::sat);
  std::vector<SearchAttempt> want = {
      {1, std::nullopt, "no_modulo_schedule"},
      {2, 2, "unsat"},
      {3, 2, "unsat"},
      {3, 3, "sat"},
  };
  CHECK(r.attempts == want);
  CHECK(r.solution.schedule.initiation_interval == 3);
  CHECK(anchored(r.solution, p.graph).assignments ==
        std::vector<std::int64_t>{0, 1, 2});
  CHECK(r.solution.streaming_depths.empty());
}

TEST_CASE("attention search finds interval 2 at once") {
  Problem p = testing::attention_problem();
  JointSearchResult r = joint_search(p.graph, p.machine);
  REQUIRE(r.status == JointStatus::sat);
  std::vector<SearchAttempt> want = {
      {1, std::nullopt, "no_modulo_schedule"},
      {2, 4, "sat"},
  };
  CHECK(r.attempts == want);
  CHECK(r.solution.schedule.assignments == std::vector<std::int64_t>{0, 2, 3});
  CHECK(r.solution.schedule.length == 4);
}

TEST_CASE("search exhausts its interval ceiling") {
  // a zero-delta cycle admits no modulo schedule at any interval
  Problem p;
  p.machine = testing::plain_machine({{"F", 1}});
  Node a;
  a.id = "a";
  a.rrt.cycles = 1;
  a.rrt.use = {{1}};
  Node b = a;
  b.id = "b";
  p.graph.nodes = {a, b};
  p.graph.edges = {{0, 1, 1, 0, false}, {1, 0, 1, 0, false}};
  JointSearchResult r = joint_search(p.graph, p.machine, 3);
  CHECK(r.status == JointStatus::unsat);
  CHECK(r.attempts.size() == 3);
  for (const SearchAttempt& a2 : r.attempts)
    CHECK(a2.outcome == "no_modulo_schedule");
  CHECK(r.message.find("3") != std::string::npos);
}

TEST_CASE("joint feasibility matches anchored enumeration") {
  std::mt19937 rng(31337);
  int sat_seen = 0, unsat_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Problem p = testing::random_problem(rng);
    const std::int64_t i = 1 + trial % 3;
    const std::int64_t l = 8;
    ScheduleResult ref = brute_force_modulo_schedule(p.graph, p.machine, i, l);
    JointResult jr = solve_joint_at(p.graph, p.machine, i, l);
    REQUIRE(jr.status != JointStatus::error);
    if (ref.status == ScheduleStatus::feasible) {
      ++sat_seen;
      REQUIRE(jr.status == JointStatus::sat);
      ModuloSchedule m = anchored(jr.solution, p.graph);
      CHECK(m.length <= l);
      CHECK(schedule_is_valid(m, p.graph, p.machine));
    } else {
      ++unsat_seen;
      REQUIRE(jr.status == JointStatus::unsat);
    }
  }
  CHECK(sat_seen >= 20);
  CHECK(unsat_seen >= 5);
}
