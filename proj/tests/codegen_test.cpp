#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "testutil.hpp"
#include "weftsched/codegen.hpp"
#include "weftsched/jointsolve.hpp"
#include "weftsched/modsched.hpp"
#include "weftsched/sim.hpp"

using namespace weftsched;
using namespace weftsched::testing;

namespace {

ModuloSchedule ms(std::vector<std::int64_t> m, std::int64_t ii, std::int64_t len) {
  ModuloSchedule s;
  s.assignments = std::move(m);
  s.initiation_interval = ii;
  s.length = len;
  return s;
}

// every (node, copy) pair must appear exactly once across the three regions
void check_instance_multiset(const PipelinedProgram& p, const DepGraph& g) {
  std::map<std::pair<std::string, std::int64_t>, int> seen;
  auto scan = [&](const std::vector<PipelinedInstr>& is) {
    std::int64_t prev = -1;
    for (const PipelinedInstr& in : is) {
      CHECK(in.cycle >= prev);  // nondecreasing within a region
      prev = in.cycle;
      if (in.kind == "op") ++seen[{in.node, in.copy}];
    }
  };
  scan(p.prologue);
  scan(p.steady_state);
  scan(p.epilogue);
  CHECK(seen.size() == g.nodes.size() * static_cast<std::size_t>(p.copies));
  for (auto& [k, count] : seen) CHECK(count == 1);
  for (const PipelinedInstr& in : p.steady_state)
    if (in.kind == "op") {
      CHECK(in.cycle >= 0);
      CHECK(in.cycle < p.initiation_interval);
    }
}

std::vector<std::string> texts(const std::vector<PipelinedInstr>& is) {
  std::vector<std::string> out;
  for (const PipelinedInstr& in : is) out.push_back(in.text);
  return out;
}

}  // namespace

TEST_CASE("attention synthesizes the classic two-stage pipeline") {
  Problem p = attention_problem();
  JointSolution sol = expand_solution(p.graph, ms({0, 2, 3}, 2, 4));
  PipelinedProgram prog = synthesize(sol, p.graph);

  CHECK(prog.initiation_interval == 2);
  CHECK(prog.copies == 2);
  REQUIRE(prog.prologue.size() == 1);
  REQUIRE(prog.steady_state.size() == 4);
  REQUIRE(prog.epilogue.size() == 2);

  CHECK(prog.prologue[0].text == "S = S()");
  CHECK(prog.prologue[0].cycle == 0);

  CHECK(texts(prog.steady_state) ==
        std::vector<std::string>{"Sn = S()", "P = P(S)", "O = O(P, O[i-1])",
                                 "S = Sn"});
  CHECK(prog.steady_state[0].cycle == 0);
  CHECK(prog.steady_state[1].cycle == 0);
  CHECK(prog.steady_state[2].cycle == 1);
  CHECK(prog.steady_state[3].cycle == 1);
  CHECK(prog.steady_state[3].kind == "move");

  CHECK(texts(prog.epilogue) ==
        std::vector<std::string>{"P = P(S)", "O = O(P, O[n-1])"});
  CHECK(prog.epilogue[0].cycle == 0);
  CHECK(prog.epilogue[1].cycle == 1);

  CHECK(prog.version_map == std::map<std::string, std::string>{{"Sn", "S"}});
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("search solutions synthesize the same program shape") {
  Problem p = attention_problem();
  JointSearchResult r = joint_search(p.graph, p.machine);
  REQUIRE(r.status == JointStatus::sat);
  PipelinedProgram prog = synthesize(r.solution, p.graph);

  CHECK(prog.prologue.size() == 1);
  CHECK(prog.steady_state.size() == 4);
  CHECK(prog.epilogue.size() == 2);
  bool has_move = false, has_carry = false;
  for (const std::string& t : texts(prog.steady_state)) {
    if (t == "S = Sn") has_move = true;
    if (t.find("[i-1]") != std::string::npos) has_carry = true;
  }
  CHECK(has_move);
  CHECK(has_carry);
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("single-copy programs have no wind-up regions") {
  Problem p;
  p.machine = plain_machine({{"F", 1}});
  Node a;
  a.id = "a";
  a.rrt.cycles = 1;
  a.rrt.use = {{1}};
  Node b = a;
  b.id = "b";
  p.graph.nodes = {a, b};
  p.graph.edges = {{0, 1, 1, 0, false}};

  JointSolution sol = expand_solution(p.graph, ms({0, 1}, 2, 2));
  PipelinedProgram prog = synthesize(sol, p.graph);
  CHECK(prog.copies == 1);
  CHECK(prog.prologue.empty());
  CHECK(prog.epilogue.empty());
  CHECK(texts(prog.steady_state) == std::vector<std::string>{"a = a()", "b = b(a)"});
  CHECK(prog.version_map.empty());
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("cross-trip operands version and move even with one copy") {
  // b consumes a produced one iteration earlier: a's live value must survive
  // the trip boundary, so a writes a versioned name that moves back at end of
  // body and b reads the bare name.
  Problem p;
  p.machine = plain_machine({{"F", 1}});
  Node a;
  a.id = "a";
  a.rrt.cycles = 1;
  a.rrt.use = {{1}};
  Node b = a;
  b.id = "b";
  p.graph.nodes = {a, b};
  p.graph.edges = {{0, 1, 1, 1, false}};

  JointSolution sol = expand_solution(p.graph, ms({0, 1}, 2, 2));
  PipelinedProgram prog = synthesize(sol, p.graph);
  CHECK(prog.copies == 1);
  CHECK(prog.prologue.empty());
  CHECK(prog.epilogue.empty());
  CHECK(texts(prog.steady_state) ==
        std::vector<std::string>{"an = a()", "b = b(a)", "a = an"});
  CHECK(prog.steady_state[2].kind == "move");
  CHECK(prog.steady_state[2].cycle == 1);
  CHECK(prog.version_map == std::map<std::string, std::string>{{"an", "a"}});
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("deep pipelines spawn pre-loop versions and stacked moves") {
  // chain with latency 2 at interval 1: five copies in flight, values cross
  // two stage boundaries
  Problem p;
  p.machine = plain_machine({{"F", 3}});
  Node a;
  a.id = "a";
  a.rrt.cycles = 1;
  a.rrt.use = {{1}};
  Node b = a;
  b.id = "b";
  Node c = a;
  c.id = "c";
  p.graph.nodes = {a, b, c};
  p.graph.edges = {{0, 1, 2, 0, false}, {1, 2, 2, 0, false}};

  JointSolution sol = expand_solution(p.graph, ms({0, 2, 4}, 1, 5));
  PipelinedProgram prog = synthesize(sol, p.graph);
  CHECK(prog.copies == 5);

  auto pro = texts(prog.prologue);
  CHECK(std::count(pro.begin(), pro.end(), "a_p2 = a()") == 1);
  CHECK(std::count(pro.begin(), pro.end(), "a_p1 = a()") == 1);
  CHECK(texts(prog.steady_state) ==
        std::vector<std::string>{"ann = a()", "bnn = b(a)", "c = c(b)",
                                 "a = an", "an = ann", "b = bn", "bn = bnn"});
  // the move chain shifts oldest-first so each version survives one trip
  CHECK(prog.version_map.size() == 6);
  CHECK(prog.version_map.at("ann") == "a");
  CHECK(prog.version_map.at("a_p2") == "a");
  CHECK(prog.version_map.at("bn") == "b");
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("cross-warp operands carry a transfer pseudo-op") {
  Problem p;
  p.machine = plain_machine({{"A", 2}});
  p.machine.num_warps = 2;
  Node u;
  u.id = "u";
  u.rrt.cycles = 1;
  u.rrt.use = {{1}};
  u.spill_cost = 2;
  Node v = u;
  v.id = "v";
  v.spill_cost = 0;
  p.graph.nodes = {u, v};
  p.graph.edges = {{0, 1, 1, 0, false}};

  JointSolution sol = expand_solution(p.graph, ms({0, 3}, 4, 4), {0, 1});
  PipelinedProgram prog = synthesize(sol, p.graph);
  REQUIRE(prog.steady_state.size() == 3);
  CHECK(prog.steady_state[0].text == "u = u()");
  CHECK(prog.steady_state[1].kind == "spill_recv");
  CHECK(prog.steady_state[1].text == "u = xfer(u)");
  CHECK(prog.steady_state[1].cycle == 2);  // receive point of the transfer
  CHECK(prog.steady_state[1].warp_start == 1);
  CHECK(prog.steady_state[2].text == "v = v(u)");
  REQUIRE(prog.steady_state[2].spilled.size() == 1);
  CHECK(prog.steady_state[2].spilled[0]);
  check_instance_multiset(prog, p.graph);
}

TEST_CASE("listing and json renderings are stable") {
  Problem p = attention_problem();
  JointSolution sol = expand_solution(p.graph, ms({0, 2, 3}, 2, 4));
  PipelinedProgram prog = synthesize(sol, p.graph);

  const std::string expected =
      "prologue:\n"
      "  @warp[0..0] @cycle 0  S = S()\n"
      "steady_state:\n"
      "  @warp[0..0] @cycle 0  Sn = S()\n"
      "  @warp[0..0] @cycle 0  P = P(S)\n"
      "  @warp[0..0] @cycle 1  O = O(P, O[i-1])\n"
      "  @warp[0..0] @cycle 1  S = Sn\n"
      "epilogue:\n"
      "  @warp[0..0] @cycle 0  P = P(S)\n"
      "  @warp[0..0] @cycle 1  O = O(P, O[n-1])\n";
  CHECK(emit_listing(prog) == expected);
  CHECK(emit_listing(prog) == emit_listing(synthesize(sol, p.graph)));

  auto j = nlohmann::json::parse(program_to_json(prog));
  CHECK(j["I"] == 2);
  CHECK(j["copies"] == 2);
  CHECK(j["prologue"].size() == 1);
  CHECK(j["steady_state"].size() == 4);
  CHECK(j["epilogue"].size() == 2);
  CHECK(j["steady_state"][3]["kind"] == "move");
  CHECK(j["version_map"]["Sn"] == "S");
}
