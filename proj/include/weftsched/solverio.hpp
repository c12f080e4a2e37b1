#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Constraint-system plumbing: a small QF_LIA request type shared by the
// scheduling encodings, serializers for the SMT-LIB2 and LP wire formats,
// a model parser, and a deterministic internal solver sized for the
// desk-scale systems this project emits.

namespace weftsched {

enum class VarSort { boolean, integer };

struct VarDecl {
  std::string name;
  VarSort sort = VarSort::boolean;
  std::int64_t lo = 0;  // integer bounds; ignored for booleans
  std::int64_t hi = 1;
};

// Literal: var index, positive or negated.
struct Lit {
  int var = 0;
  bool neg = false;
};

struct Clause {
  std::vector<Lit> lits;
};

enum class CmpOp { le, ge, eq };

struct LinTerm {
  std::int64_t coeff = 0;
  int var = 0;
};

// sum(coeff_i * var_i) op rhs; boolean vars contribute 0/1.
struct LinearConstraint {
  std::vector<LinTerm> terms;
  CmpOp op = CmpOp::le;
  std::int64_t rhs = 0;
};

struct SolverRequest {
  std::string logic = "QF_LIA";
  std::vector<VarDecl> vars;
  std::vector<Clause> clauses;
  std::vector<LinearConstraint> linear;
  std::optional<int> objective;  // minimize vars[*objective]

  int add_var(std::string name, VarSort sort = VarSort::boolean,
              std::int64_t lo = 0, std::int64_t hi = 1);
  void add_clause(std::vector<Lit> lits);
  void add_linear(std::vector<LinTerm> terms, CmpOp op, std::int64_t rhs);
  int find_var(const std::string& name) const;  // -1 if absent
};

enum class SolveStatus { sat, unsat, unknown, error };

struct SolverResponse {
  SolveStatus status = SolveStatus::error;
  std::vector<std::int64_t> model;  // by var index, valid when sat
  std::optional<std::int64_t> objective_value;
  std::string message;
};

struct SolveOptions {
  // Upper bound on branch depth: variables the search actually decides on
  // (propagated assignments are free). Exceeding it produces an error
  // response instead of an unbounded search.
  int max_decisions = 28;
  // Branch exactly-one groups trying high-index candidates first.
  bool branch_high_first = false;
  // Variables to try true before false (seed placements).
  std::vector<int> prefer_true;
  // External solver command; when set, solve() pipes SMT-LIB2 through it.
  std::string external_command;
};

// SMT-LIB2 rendering of a decision request. Requests carrying an objective
// are rejected; optimization is driven by the callers through repeated
// decision queries.
std::string to_smtlib2(const SolverRequest& r);

// LP-format rendering of an optimization request. The request must carry an
// objective; clauses are linearized into >= 1 rows over the binaries.
std::string to_lp_format(const SolverRequest& r);

// Parses solver output ("sat" + model / "unsat" / "unknown") against the
// request's declarations. Unknown symbols or truncated models yield an
// error response.
SolverResponse parse_model(const std::string& text, const SolverRequest& r);

// Deterministic search over the request: exactly-one groups are branched
// n-way, everything else is driven by unit propagation on clauses and
// activity bounds on linear rows. For objective requests the optimum is
// found by re-solving with a tightening bound. Bit-for-bit deterministic.
SolverResponse solve_internal(const SolverRequest& r, const SolveOptions& opts = {});

// Dispatch: external command when configured (decision requests only),
// internal search otherwise.
SolverResponse solve(const SolverRequest& r, const SolveOptions& opts = {});

// Reads WEFTSCHED_SOLVER from the environment; empty string when unset.
std::string external_solver_from_env();

}  // namespace weftsched
