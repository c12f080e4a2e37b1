#pragma once

// Shared fixture builders for the test suite. Everything here is
// deterministic: random generators take explicit seeds.

#include <random>
#include <string>

#include "weftsched/ir.hpp"

namespace weftsched::testing {

// Three-op attention pipeline: two matmuls on the tensor core separated by a
// softmax on the multi-function unit, with a loop-carried accumulator.
// S = gemm(Q, K[i]); P = exp(S); O += gemm(P, V[i]).
inline Problem attention_problem(int num_warps = 4, int reg_limit = 256) {
  Problem p;
  p.machine.units = {{"TC", 1}, {"MFU", 1}};
  p.machine.memories = {{"smem", 1024}};
  p.machine.num_warps = num_warps;
  p.machine.reg_limit = reg_limit;
  p.machine.vl_warp = num_warps - 1;

  Node s;
  s.id = "S";
  s.rrt.cycles = 1;
  s.rrt.use = {{1}, {0}};  // one TC slot for one cycle
  s.footprint = {0};
  Node pr = s;
  pr.id = "P";
  pr.rrt.use = {{0}, {1}};
  Node o = s;
  o.id = "O";
  p.graph.nodes = {s, pr, o};
  p.graph.edges = {
      {0, 1, 1, 0, false},
      {1, 2, 1, 0, false},
      {2, 2, 1, 1, false},
  };
  return p;
}

// Blocking-synchronization scenario: a gemm whose consumer add performs a
// blocking wait, an independent exp that wants to co-issue, and a streaming
// tile load on the variable-latency warp. With a single compute warp the
// blocking wait serializes the exp; a second compute warp frees it.
inline Problem blocking_sync_problem(int compute_warps) {
  Problem p;
  p.machine.units = {{"TC", 1}, {"ALU", 1}, {"MFU", 1}, {"TMA", 1}};
  p.machine.memories = {{"smem", 64}};
  p.machine.num_warps = compute_warps + 1;
  p.machine.reg_limit = 256;
  p.machine.vl_warp = compute_warps;

  Node load;
  load.id = "LOAD";
  load.variable_latency = true;
  load.rrt.cycles = 1;
  load.rrt.use = {{0}, {0}, {0}, {1}};
  load.footprint = {0};
  Node gemm;
  gemm.id = "GEMM";
  gemm.rrt.cycles = 1;
  gemm.footprint = {0};
  gemm.rrt.use = {{1}, {0}, {0}, {0}};
  Node add;
  add.id = "ADD";
  add.rrt.cycles = 1;
  add.footprint = {0};
  add.rrt.use = {{0}, {1}, {0}, {0}};
  Node exp;
  exp.id = "EXP";
  exp.rrt.cycles = 1;
  exp.footprint = {0};
  exp.rrt.use = {{0}, {0}, {1}, {0}};
  p.graph.nodes = {load, gemm, add, exp};
  p.graph.edges = {
      {0, 1, 1, 0, false},
      {1, 2, 1, 0, true},  // blocking wait on the gemm result
  };
  return p;
}

// Instance whose joint system rejects the first two (I, L) attempts, used to
// pin the search order. Two unit kinds; u and w share one, v uses the other;
// the u->v edge blocks, so v's warp cannot also hold w at the same cycle.
inline Problem search_climb_problem() {
  Problem p;
  p.machine.units = {{"F1", 1}, {"F2", 1}};
  p.machine.num_warps = 1;
  p.machine.reg_limit = 64;
  p.machine.vl_warp = 0;

  Node u;
  u.id = "u";
  u.rrt.cycles = 1;
  u.rrt.use = {{1}, {0}};
  Node v = u;
  v.id = "v";
  v.rrt.use = {{0}, {1}};
  Node w = u;
  w.id = "w";
  p.graph.nodes = {u, v, w};
  p.graph.edges = {{0, 1, 1, 0, true}};
  return p;
}

// Machine with the warp-specialization dimensions disabled: one warp, no
// variable-latency reservation pressure, effectively unlimited registers.
inline MachineDesc plain_machine(std::vector<FunctionalUnitKind> units) {
  MachineDesc m;
  m.units = std::move(units);
  m.num_warps = 1;
  m.reg_limit = 1 << 20;
  m.vl_warp = 0;
  return m;
}

// Random dependence graph for property tests. Durations stay small so the
// brute-force oracles remain cheap. delta on forward edges is 0 or 1;
// self-edges always carry delta=1 so zero-delta cycles cannot appear.
inline Problem random_problem(std::mt19937& rng, int max_nodes = 4,
                              int max_units = 2, int max_dur = 2,
                              bool self_edges = true) {
  std::uniform_int_distribution<int> nodes_d(1, max_nodes);
  std::uniform_int_distribution<int> units_d(1, max_units);
  std::uniform_int_distribution<int> dur_d(1, max_dur);
  std::uniform_int_distribution<int> coin(0, 1);

  Problem p;
  int nu = units_d(rng);
  for (int f = 0; f < nu; ++f)
    p.machine.units.push_back({"F" + std::to_string(f), coin(rng) + 1});
  p.machine.num_warps = 1;
  p.machine.reg_limit = 1 << 20;
  p.machine.vl_warp = 0;

  int nv = nodes_d(rng);
  for (int v = 0; v < nv; ++v) {
    Node n;
    n.id = "n" + std::to_string(v);
    n.rrt.cycles = dur_d(rng);
    n.rrt.use.assign(nu, std::vector<std::int64_t>(n.rrt.cycles, 0));
    int f = std::uniform_int_distribution<int>(0, nu - 1)(rng);
    for (int c = 0; c < n.rrt.cycles; ++c) n.rrt.use[f][c] = 1;
    p.graph.nodes.push_back(n);
  }
  for (int a = 0; a < nv; ++a)
    for (int b = a; b < nv; ++b) {
      if (coin(rng)) continue;
      Edge e;
      e.src = a;
      e.dst = b;
      e.d = dur_d(rng);
      e.delta = a == b ? 1 : coin(rng);
      if (a == b && !self_edges) continue;
      p.graph.edges.push_back(e);
    }
  return p;
}

}  // namespace weftsched::testing
