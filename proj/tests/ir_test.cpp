#include "weftsched/ir.hpp"

#include <string>

#include "doctest.h"
#include "testutil.hpp"

using namespace weftsched;

namespace {

const char* kAttentionText = R"({
  "machine": {
    "units": [{"name": "TC", "capacity": 1}, {"name": "MFU", "capacity": 1}],
    "memories": [{"name": "smem", "capacity": 1024}],
    "num_warps": 4,
    "reg_limit": 256,
    "vl_warp": 3
  },
  "graph": {
    "nodes": [
      {"id": "S", "rrt": {"TC": [1]}, "cycles": 1},
      {"id": "P", "rrt": {"MFU": [1]}, "cycles": 1},
      {"id": "O", "rrt": {"TC": [1]}, "cycles": 1}
    ],
    "edges": [
      {"src": "S", "dst": "P", "d": 1},
      {"src": "P", "dst": "O", "d": 1},
      {"src": "O", "dst": "O", "d": 1, "delta": 1}
    ]
  }
})";

}  // namespace

TEST_CASE("attention pipeline file parses with defaults applied") {
  Problem p = parse_problem(kAttentionText);
  REQUIRE(p.graph.nodes.size() == 3);
  REQUIRE(p.graph.edges.size() == 3);
  CHECK(p.machine.units[0].name == "TC");
  CHECK(p.machine.num_warps == 4);
  CHECK(p.graph.nodes[0].id == "S");
  // rrt rows are densified across all declared units
  CHECK(p.graph.nodes[0].rrt.use.size() == 2);
  CHECK(p.graph.nodes[0].rrt.use[0] == std::vector<std::int64_t>{1});
  CHECK(p.graph.nodes[0].rrt.use[1] == std::vector<std::int64_t>{0});
  // defaults
  CHECK(p.graph.edges[0].delta == 0);
  CHECK_FALSE(p.graph.edges[0].blocking);
  CHECK(p.graph.edges[2].delta == 1);
  CHECK(p.graph.nodes[0].regs == 0);
  CHECK(p.graph.nodes[0].spill_cost == 0);
  CHECK(p.graph.nodes[0].warps_required == 1);
  CHECK_FALSE(p.graph.nodes[0].variable_latency);
  CHECK(p.graph.node_index("O") == 2);
  CHECK(p.graph.node_index("missing") == -1);
  CHECK(p.machine.unit_index("MFU") == 1);
}

TEST_CASE("parse matches the fixture builder") {
  Problem p = parse_problem(kAttentionText);
  CHECK(p == testing::attention_problem());
}

TEST_CASE("empty node list is rejected") {
  std::string text = R"({"machine": {"units": [{"name":"F","capacity":1}],
    "num_warps": 1, "reg_limit": 1, "vl_warp": 0},
    "graph": {"nodes": [], "edges": []}})";
  CHECK_THROWS_WITH_AS(parse_problem(text), doctest::Contains("graph has no nodes"),
                       ParseError);
}

TEST_CASE("undeclared edge endpoint is named in the error") {
  std::string text = R"({"machine": {"units": [{"name":"F","capacity":1}],
    "num_warps": 1, "reg_limit": 1, "vl_warp": 0},
    "graph": {"nodes": [{"id":"a","rrt":{"F":[1]},"cycles":1}],
              "edges": [{"src":"a","dst":"X","d":1}]}})";
  CHECK_THROWS_WITH_AS(parse_problem(text), doctest::Contains("X"), ParseError);
}

TEST_CASE("duplicate node id is rejected") {
  std::string text = R"({"machine": {"units": [{"name":"F","capacity":1}],
    "num_warps": 1, "reg_limit": 1, "vl_warp": 0},
    "graph": {"nodes": [{"id":"a","rrt":{"F":[1]},"cycles":1},
                        {"id":"a","rrt":{"F":[1]},"cycles":1}],
              "edges": []}})";
  CHECK_THROWS_WITH_AS(parse_problem(text), doctest::Contains("duplicate"),
                       ParseError);
}

TEST_CASE("unknown keys are rejected") {
  std::string text = R"({"machine": {"units": [{"name":"F","capacity":1}],
    "num_warps": 1, "reg_limit": 1, "vl_warp": 0, "bogus": 3},
    "graph": {"nodes": [{"id":"a","rrt":{"F":[1]},"cycles":1}], "edges": []}})";
  CHECK_THROWS_AS(parse_problem(text), ParseError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_problem("{\n  \"machine\": oops");
    FAIL("expected a throw");
  } catch (const ParseError& e) {
    CHECK(e.line >= 1);
  }
}

TEST_CASE("validate accepts the attention pipeline") {
  Problem p = testing::attention_problem();
  CHECK(validate_graph(p.graph, p.machine).empty());
}

TEST_CASE("zero-delta cycle is diagnosed") {
  Problem p = testing::attention_problem();
  p.graph.edges.push_back({1, 0, 1, 0, false});  // P -> S closes a delta-0 loop
  auto diags = validate_graph(p.graph, p.machine);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags[0].code == "zero-delta-cycle");
}

TEST_CASE("RRT entry above unit capacity is diagnosed") {
  Problem p = testing::attention_problem();
  p.graph.nodes[0].rrt.use[0][0] = 2;  // TC has capacity 1
  auto diags = validate_graph(p.graph, p.machine);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags[0].code == "rrt-exceeds-capacity");
}

TEST_CASE("warps_required above num_warps is diagnosed") {
  Problem p = testing::attention_problem();
  p.graph.nodes[1].warps_required = 9;
  auto diags = validate_graph(p.graph, p.machine);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags[0].code == "warps-required-too-large");
}

TEST_CASE("serialize/parse round trip") {
  Problem p = testing::attention_problem();
  CHECK(parse_problem(serialize_problem(p)) == p);

  Problem q = testing::blocking_sync_problem(2);
  q.graph.nodes[1].regs = 32;
  q.graph.nodes[1].footprint = {16};
  q.graph.nodes[1].spill_cost = 2;
  q.graph.nodes[2].warps_required = 1;
  CHECK(parse_problem(serialize_problem(q)) == q);
}

TEST_CASE("round trip holds on random problems") {
  std::mt19937 rng(7);
  for (int k = 0; k < 50; ++k) {
    Problem p = testing::random_problem(rng);
    CHECK(parse_problem(serialize_problem(p)) == p);
  }
}
