#include "weftsched/solverio.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace weftsched {

int SolverRequest::add_var(std::string name, VarSort sort, std::int64_t lo,
                           std::int64_t hi) {
  vars.push_back({std::move(name), sort, lo, hi});
  return static_cast<int>(vars.size()) - 1;
}

void SolverRequest::add_clause(std::vector<Lit> lits) {
  clauses.push_back({std::move(lits)});
}

void SolverRequest::add_linear(std::vector<LinTerm> terms, CmpOp op,
                               std::int64_t rhs) {
  linear.push_back({std::move(terms), op, rhs});
}

int SolverRequest::find_var(const std::string& name) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::string smt_int(std::int64_t v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

constexpr std::int64_t kNegInf = INT64_MIN / 4;
constexpr std::int64_t kPosInf = INT64_MAX / 4;

// Canonical row: lb <= sum(terms) <= ub, like terms merged.
struct Row {
  std::vector<LinTerm> terms;
  std::int64_t lb = kNegInf;
  std::int64_t ub = kPosInf;
};

Row canonical_row(const LinearConstraint& c) {
  Row r;
  std::map<int, std::int64_t> merged;
  for (const LinTerm& t : c.terms) merged[t.var] += t.coeff;
  for (auto& [var, coeff] : merged)
    if (coeff != 0) r.terms.push_back({coeff, var});
  switch (c.op) {
    case CmpOp::le: r.ub = c.rhs; break;
    case CmpOp::ge: r.lb = c.rhs; break;
    case CmpOp::eq: r.lb = r.ub = c.rhs; break;
  }
  return r;
}

}  // namespace

std::string to_smtlib2(const SolverRequest& r) {
  if (r.objective)
    throw std::invalid_argument("smtlib2 rendering takes decision requests only");
  std::ostringstream os;
  os << "(set-logic " << r.logic << ")\n";
  for (const VarDecl& v : r.vars) {
    os << "(declare-const " << v.name
       << (v.sort == VarSort::boolean ? " Bool)\n" : " Int)\n");
    if (v.sort == VarSort::integer) {
      if (v.lo > kNegInf)
        os << "(assert (>= " << v.name << " " << smt_int(v.lo) << "))\n";
      if (v.hi < kPosInf)
        os << "(assert (<= " << v.name << " " << smt_int(v.hi) << "))\n";
    }
  }
  auto lit_str = [&](const Lit& l) {
    const std::string& n = r.vars[l.var].name;
    return l.neg ? "(not " + n + ")" : n;
  };
  for (const Clause& c : r.clauses) {
    if (c.lits.empty()) {
      os << "(assert false)\n";
    } else if (c.lits.size() == 1) {
      os << "(assert " << lit_str(c.lits[0]) << ")\n";
    } else {
      os << "(assert (or";
      for (const Lit& l : c.lits) os << " " << lit_str(l);
      os << "))\n";
    }
  }
  for (const LinearConstraint& c : r.linear) {
    std::ostringstream sum;
    if (c.terms.empty()) {
      sum << "0";
    } else if (c.terms.size() == 1 && c.terms[0].coeff == 1 &&
               r.vars[c.terms[0].var].sort == VarSort::integer) {
      sum << r.vars[c.terms[0].var].name;
    } else {
      sum << "(+";
      for (const LinTerm& t : c.terms) {
        const VarDecl& v = r.vars[t.var];
        std::string val = v.sort == VarSort::boolean
                              ? "(ite " + v.name + " 1 0)"
                              : v.name;
        if (t.coeff == 1)
          sum << " " << val;
        else
          sum << " (* " << smt_int(t.coeff) << " " << val << ")";
      }
      sum << ")";
    }
    const char* op = c.op == CmpOp::le ? "<=" : c.op == CmpOp::ge ? ">=" : "=";
    os << "(assert (" << op << " " << sum.str() << " " << smt_int(c.rhs) << "))\n";
  }
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

std::string to_lp_format(const SolverRequest& r) {
  if (!r.objective)
    throw std::invalid_argument("lp rendering requires an objective");
  std::ostringstream os;
  os << "\\ generated by weftsched\nMinimize\n obj: " << r.vars[*r.objective].name
     << "\nSubject To\n";
  int row = 0;
  auto emit_terms = [&](const std::vector<LinTerm>& terms, std::int64_t shift) {
    bool first = true;
    for (const LinTerm& t : terms) {
      std::int64_t c = t.coeff;
      if (c == 0) continue;
      if (first) {
        if (c < 0) os << "- ";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      std::int64_t a = c < 0 ? -c : c;
      if (a != 1) os << a << " ";
      os << r.vars[t.var].name;
    }
    if (first) os << "0";
    (void)shift;
  };
  for (const LinearConstraint& c : r.linear) {
    os << " c" << row++ << ": ";
    emit_terms(c.terms, 0);
    const char* op = c.op == CmpOp::le ? " <= " : c.op == CmpOp::ge ? " >= " : " = ";
    os << op << c.rhs << "\n";
  }
  // A clause is one linear row over binaries: sum(pos) + sum(1 - neg) >= 1.
  for (const Clause& cl : r.clauses) {
    std::vector<LinTerm> terms;
    std::int64_t rhs = 1;
    for (const Lit& l : cl.lits) {
      if (r.vars[l.var].sort != VarSort::boolean)
        throw std::invalid_argument("clause over non-boolean variable");
      terms.push_back({l.neg ? -1 : 1, l.var});
      if (l.neg) rhs -= 1;
    }
    os << " c" << row++ << ": ";
    emit_terms(terms, 0);
    os << " >= " << rhs << "\n";
  }
  os << "Bounds\n";
  for (const VarDecl& v : r.vars)
    if (v.sort == VarSort::integer)
      os << " " << v.lo << " <= " << v.name << " <= " << v.hi << "\n";
  bool any_int = false, any_bool = false;
  for (const VarDecl& v : r.vars) {
    any_int |= v.sort == VarSort::integer;
    any_bool |= v.sort == VarSort::boolean;
  }
  if (any_int) {
    os << "Generals\n";
    for (const VarDecl& v : r.vars)
      if (v.sort == VarSort::integer) os << " " << v.name << "\n";
  }
  if (any_bool) {
    os << "Binaries\n";
    for (const VarDecl& v : r.vars)
      if (v.sort == VarSort::boolean) os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

namespace {

std::vector<std::string> tokenize_sexpr(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      toks.push_back(cur);
      cur.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == ';') {  // comment to end of line
      flush();
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (ch == '(' || ch == ')') {
      flush();
      toks.push_back(std::string(1, ch));
    } else if (isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return toks;
}

}  // namespace

SolverResponse parse_model(const std::string& text, const SolverRequest& r) {
  SolverResponse resp;
  std::vector<std::string> toks = tokenize_sexpr(text);
  size_t i = 0;
  while (i < toks.size() && (toks[i] == "(" || toks[i] == ")")) ++i;
  if (i >= toks.size()) {
    resp.message = "empty solver output";
    return resp;
  }
  if (toks[i] == "unsat") {
    resp.status = SolveStatus::unsat;
    return resp;
  }
  if (toks[i] == "unknown") {
    resp.status = SolveStatus::unknown;
    return resp;
  }
  if (toks[i] != "sat") {
    resp.message = "unrecognized solver status \"" + toks[i] + "\"";
    return resp;
  }
  ++i;
  resp.model.assign(r.vars.size(), 0);
  for (size_t v = 0; v < r.vars.size(); ++v)
    if (r.vars[v].sort == VarSort::integer) resp.model[v] = r.vars[v].lo;

  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    size_t k = s[0] == '-' ? 1 : 0;
    if (k == s.size()) return false;
    for (; k < s.size(); ++k)
      if (!isdigit(static_cast<unsigned char>(s[k]))) return false;
    return true;
  };

  while (i < toks.size()) {
    if (toks[i] != "define-fun") {
      ++i;
      continue;
    }
    if (i + 4 >= toks.size()) {
      resp.message = "truncated model";
      resp.status = SolveStatus::error;
      return resp;
    }
    const std::string& name = toks[i + 1];
    int var = r.find_var(name);
    if (var < 0) {
      resp.message = "model defines undeclared variable \"" + name + "\"";
      resp.status = SolveStatus::error;
      return resp;
    }
    size_t j = i + 2;
    if (j + 1 >= toks.size() || toks[j] != "(" || toks[j + 1] != ")") {
      resp.message = "model for \"" + name + "\" has arguments";
      resp.status = SolveStatus::error;
      return resp;
    }
    j += 2;  // skip ()
    if (j >= toks.size()) {
      resp.message = "truncated model";
      resp.status = SolveStatus::error;
      return resp;
    }
    ++j;  // skip sort token
    if (j >= toks.size()) {
      resp.message = "truncated model";
      resp.status = SolveStatus::error;
      return resp;
    }
    std::int64_t value = 0;
    if (toks[j] == "true") {
      value = 1;
    } else if (toks[j] == "false") {
      value = 0;
    } else if (is_int(toks[j])) {
      value = std::stoll(toks[j]);
    } else if (toks[j] == "(" && j + 2 < toks.size() && toks[j + 1] == "-" &&
               is_int(toks[j + 2])) {
      value = -std::stoll(toks[j + 2]);
      j += 3;  // lands on ")"
    } else {
      resp.message = "unparsable value for \"" + name + "\"";
      resp.status = SolveStatus::error;
      return resp;
    }
    resp.model[var] = value;
    i = j + 1;
  }
  resp.status = SolveStatus::sat;
  return resp;
}

// ---------------------------------------------------------------------------
// Internal solver.

namespace {

class InternalSolver {
 public:
  InternalSolver(const SolverRequest& r, const SolveOptions& opts)
      : req_(r), opts_(opts) {
    n_ = static_cast<int>(r.vars.size());
    bval_.assign(n_, -1);
    ilo_.resize(n_);
    ihi_.resize(n_);
    prefer_.assign(n_, 0);
    for (int v : opts.prefer_true)
      if (v >= 0 && v < n_) prefer_[v] = 1;
    for (int v = 0; v < n_; ++v) {
      ilo_[v] = r.vars[v].sort == VarSort::integer ? r.vars[v].lo : 0;
      ihi_[v] = r.vars[v].sort == VarSort::integer ? r.vars[v].hi : 1;
    }
    occ_row_.assign(n_, {});
    occ_cl_.assign(n_, {});
    for (const LinearConstraint& c : r.linear) {
      Row row = canonical_row(c);
      int id = static_cast<int>(rows_.size());
      for (const LinTerm& t : row.terms) occ_row_[t.var].push_back(id);
      // Exactly-one over booleans: branch n-way on the member that is true.
      bool group = row.lb == 1 && row.ub == 1 && row.terms.size() >= 2;
      if (group)
        for (const LinTerm& t : row.terms)
          group &= t.coeff == 1 && r.vars[t.var].sort == VarSort::boolean;
      if (group) {
        std::vector<int> members;
        for (const LinTerm& t : row.terms) members.push_back(t.var);
        groups_.push_back(std::move(members));
      }
      rows_.push_back(std::move(row));
    }
    for (const Clause& c : r.clauses) {
      Cl cl;
      cl.lits = c.lits;
      int id = static_cast<int>(cls_.size());
      for (const Lit& l : cl.lits) occ_cl_[l.var].push_back(id);
      cls_.push_back(std::move(cl));
    }
    act_min_.resize(rows_.size());
    act_max_.resize(rows_.size());
    for (size_t i = 0; i < rows_.size(); ++i) recompute_activity(static_cast<int>(i));
    ntrue_.assign(cls_.size(), 0);
    nfalse_.assign(cls_.size(), 0);
  }

  SolveStatus run(std::vector<std::int64_t>* model, std::string* message) {
    for (size_t i = 0; i < cls_.size(); ++i) enqueue_clause(static_cast<int>(i));
    for (size_t i = 0; i < rows_.size(); ++i) enqueue_row(static_cast<int>(i));
    bool found = search(0);
    if (too_large_) {
      *message = "instance too large for the internal solver (decision limit " +
                 std::to_string(opts_.max_decisions) + ")";
      return SolveStatus::error;
    }
    if (!found) return SolveStatus::unsat;
    model->assign(n_, 0);
    for (int v = 0; v < n_; ++v)
      (*model)[v] = req_.vars[v].sort == VarSort::boolean ? bval_[v] : ilo_[v];
    return SolveStatus::sat;
  }

 private:
  struct Cl {
    std::vector<Lit> lits;
  };
  enum class EvKind : uint8_t { bassign, int_lo, int_hi };
  struct Event {
    EvKind kind;
    int var;
    std::int64_t old_value;
  };

  void recompute_activity(int ri) {
    const Row& row = rows_[ri];
    std::int64_t mn = 0, mx = 0;
    for (const LinTerm& t : row.terms) {
      if (req_.vars[t.var].sort == VarSort::boolean) {
        if (bval_[t.var] >= 0) {
          mn += t.coeff * bval_[t.var];
          mx += t.coeff * bval_[t.var];
        } else {
          mn += std::min<std::int64_t>(t.coeff, 0);
          mx += std::max<std::int64_t>(t.coeff, 0);
        }
      } else {
        if (t.coeff > 0) {
          mn += t.coeff * ilo_[t.var];
          mx += t.coeff * ihi_[t.var];
        } else {
          mn += t.coeff * ihi_[t.var];
          mx += t.coeff * ilo_[t.var];
        }
      }
    }
    act_min_[ri] = mn;
    act_max_[ri] = mx;
  }

  void enqueue_row(int ri) {
    if (!row_queued_.empty() && row_queued_[ri]) return;
    if (row_queued_.empty()) row_queued_.assign(rows_.size(), false);
    row_queued_[ri] = true;
    row_queue_.push_back(ri);
  }
  void enqueue_clause(int ci) {
    if (!cl_queued_.empty() && cl_queued_[ci]) return;
    if (cl_queued_.empty()) cl_queued_.assign(cls_.size(), false);
    cl_queued_[ci] = true;
    cl_queue_.push_back(ci);
  }

  // Assign a boolean; returns false on conflict with an existing assignment.
  bool assign_bool(int var, int value) {
    if (bval_[var] >= 0) return bval_[var] == value;
    bval_[var] = static_cast<int8_t>(value);
    trail_.push_back({EvKind::bassign, var, -1});
    for (int ri : occ_row_[var]) {
      for (const LinTerm& t : rows_[ri].terms)
        if (t.var == var) {
          act_min_[ri] += t.coeff * value - std::min<std::int64_t>(t.coeff, 0);
          act_max_[ri] += t.coeff * value - std::max<std::int64_t>(t.coeff, 0);
        }
      enqueue_row(ri);
    }
    for (int ci : occ_cl_[var]) {
      for (const Lit& l : cls_[ci].lits)
        if (l.var == var) {
          bool lit_true = (value == 1) != l.neg;
          if (lit_true)
            ++ntrue_[ci];
          else
            ++nfalse_[ci];
        }
      enqueue_clause(ci);
    }
    return true;
  }

  bool tighten_lo(int var, std::int64_t lo) {
    if (lo <= ilo_[var]) return true;
    trail_.push_back({EvKind::int_lo, var, ilo_[var]});
    for (int ri : occ_row_[var]) {
      for (const LinTerm& t : rows_[ri].terms)
        if (t.var == var) {
          if (t.coeff > 0)
            act_min_[ri] += t.coeff * (lo - ilo_[var]);
          else
            act_max_[ri] += t.coeff * (lo - ilo_[var]);
        }
      enqueue_row(ri);
    }
    ilo_[var] = lo;
    return ilo_[var] <= ihi_[var];
  }

  bool tighten_hi(int var, std::int64_t hi) {
    if (hi >= ihi_[var]) return true;
    trail_.push_back({EvKind::int_hi, var, ihi_[var]});
    for (int ri : occ_row_[var]) {
      for (const LinTerm& t : rows_[ri].terms)
        if (t.var == var) {
          if (t.coeff > 0)
            act_max_[ri] += t.coeff * (hi - ihi_[var]);
          else
            act_min_[ri] += t.coeff * (hi - ihi_[var]);
        }
      enqueue_row(ri);
    }
    ihi_[var] = hi;
    return ilo_[var] <= ihi_[var];
  }

  bool propagate() {
    while (!row_queue_.empty() || !cl_queue_.empty()) {
      if (!cl_queue_.empty()) {
        int ci = cl_queue_.back();
        cl_queue_.pop_back();
        cl_queued_[ci] = false;
        const Cl& cl = cls_[ci];
        if (ntrue_[ci] > 0) continue;
        int sz = static_cast<int>(cl.lits.size());
        if (nfalse_[ci] == sz) return false;
        if (nfalse_[ci] == sz - 1) {
          for (const Lit& l : cl.lits)
            if (bval_[l.var] < 0) {
              if (!assign_bool(l.var, l.neg ? 0 : 1)) return false;
              break;
            }
        }
        continue;
      }
      int ri = row_queue_.back();
      row_queue_.pop_back();
      row_queued_[ri] = false;
      const Row& row = rows_[ri];
      if (act_min_[ri] > row.ub || act_max_[ri] < row.lb) return false;
      for (const LinTerm& t : row.terms) {
        if (req_.vars[t.var].sort == VarSort::boolean) {
          if (bval_[t.var] >= 0) continue;
          if (t.coeff > 0) {
            if (act_min_[ri] + t.coeff > row.ub && !assign_bool(t.var, 0))
              return false;
            else if (bval_[t.var] < 0 && act_max_[ri] - t.coeff < row.lb &&
                     !assign_bool(t.var, 1))
              return false;
          } else {
            if (act_min_[ri] - t.coeff > row.ub && !assign_bool(t.var, 1))
              return false;
            else if (bval_[t.var] < 0 && act_max_[ri] + t.coeff < row.lb &&
                     !assign_bool(t.var, 0))
              return false;
          }
        } else {
          if (ilo_[t.var] == ihi_[t.var]) continue;
          // Bounds are re-read at each use: the first tighten below moves
          // them (and the activities), and the second must see fresh values.
          if (t.coeff > 0) {
            if (row.ub < kPosInf) {
              std::int64_t rest = act_min_[ri] - t.coeff * ilo_[t.var];
              if (!tighten_hi(t.var, floor_div(row.ub - rest, t.coeff)))
                return false;
            }
            if (row.lb > kNegInf) {
              std::int64_t rest = act_max_[ri] - t.coeff * ihi_[t.var];
              if (!tighten_lo(t.var, ceil_div(row.lb - rest, t.coeff)))
                return false;
            }
          } else {
            if (row.ub < kPosInf) {
              std::int64_t rest = act_min_[ri] - t.coeff * ihi_[t.var];
              if (!tighten_lo(t.var, ceil_div(row.ub - rest, t.coeff)))
                return false;
            }
            if (row.lb > kNegInf) {
              std::int64_t rest = act_max_[ri] - t.coeff * ilo_[t.var];
              if (!tighten_hi(t.var, floor_div(row.lb - rest, t.coeff)))
                return false;
            }
          }
        }
      }
    }
    return true;
  }

  size_t push_level() { return trail_.size(); }

  void pop_level(size_t mark) {
    while (trail_.size() > mark) {
      Event ev = trail_.back();
      trail_.pop_back();
      if (ev.kind == EvKind::bassign) {
        int value = bval_[ev.var];
        bval_[ev.var] = -1;
        for (int ri : occ_row_[ev.var])
          for (const LinTerm& t : rows_[ri].terms)
            if (t.var == ev.var) {
              act_min_[ri] -= t.coeff * value - std::min<std::int64_t>(t.coeff, 0);
              act_max_[ri] -= t.coeff * value - std::max<std::int64_t>(t.coeff, 0);
            }
        for (int ci : occ_cl_[ev.var])
          for (const Lit& l : cls_[ci].lits)
            if (l.var == ev.var) {
              bool lit_true = (value == 1) != l.neg;
              if (lit_true)
                --ntrue_[ci];
              else
                --nfalse_[ci];
            }
      } else if (ev.kind == EvKind::int_lo) {
        for (int ri : occ_row_[ev.var])
          for (const LinTerm& t : rows_[ri].terms)
            if (t.var == ev.var) {
              if (t.coeff > 0)
                act_min_[ri] += t.coeff * (ev.old_value - ilo_[ev.var]);
              else
                act_max_[ri] += t.coeff * (ev.old_value - ilo_[ev.var]);
            }
        ilo_[ev.var] = ev.old_value;
      } else {
        for (int ri : occ_row_[ev.var])
          for (const LinTerm& t : rows_[ri].terms)
            if (t.var == ev.var) {
              if (t.coeff > 0)
                act_max_[ri] += t.coeff * (ev.old_value - ihi_[ev.var]);
              else
                act_min_[ri] += t.coeff * (ev.old_value - ihi_[ev.var]);
            }
        ihi_[ev.var] = ev.old_value;
      }
    }
    row_queue_.clear();
    cl_queue_.clear();
    if (!row_queued_.empty()) std::fill(row_queued_.begin(), row_queued_.end(), false);
    if (!cl_queued_.empty()) std::fill(cl_queued_.begin(), cl_queued_.end(), false);
  }

  // Candidate order within a group: seeded vars first, then declaration
  // order (reversed under branch_high_first).
  std::vector<int> group_candidates(const std::vector<int>& members) const {
    std::vector<int> pref, rest;
    for (int v : members)
      if (bval_[v] < 0) (prefer_[v] ? pref : rest).push_back(v);
    if (opts_.branch_high_first) std::reverse(rest.begin(), rest.end());
    pref.insert(pref.end(), rest.begin(), rest.end());
    return pref;
  }

  bool search(int depth) {
    if (too_large_) return false;
    if (!propagate()) return false;

    for (const std::vector<int>& members : groups_) {
      bool selected = false, open = false;
      for (int v : members) {
        if (bval_[v] == 1) selected = true;
        if (bval_[v] < 0) open = true;
      }
      if (selected || !open) continue;
      if (depth >= opts_.max_decisions) {
        too_large_ = true;
        return false;
      }
      for (int v : group_candidates(members)) {
        size_t mark = push_level();
        if (assign_bool(v, 1) && search(depth + 1)) return true;
        if (too_large_) return false;
        pop_level(mark);
      }
      return false;
    }

    for (int v = 0; v < n_; ++v) {
      if (req_.vars[v].sort != VarSort::boolean || bval_[v] >= 0) continue;
      if (depth >= opts_.max_decisions) {
        too_large_ = true;
        return false;
      }
      int first = prefer_[v] ? 1 : 0;
      for (int phase : {first, 1 - first}) {
        size_t mark = push_level();
        if (assign_bool(v, phase) && search(depth + 1)) return true;
        if (too_large_) return false;
        pop_level(mark);
      }
      return false;
    }

    for (int v = 0; v < n_; ++v) {
      if (req_.vars[v].sort != VarSort::integer || ilo_[v] == ihi_[v]) continue;
      if (depth >= opts_.max_decisions) {
        too_large_ = true;
        return false;
      }
      std::int64_t lo = ilo_[v], hi = ihi_[v];
      for (std::int64_t val = lo; val <= hi; ++val) {
        size_t mark = push_level();
        if (tighten_lo(v, val) && tighten_hi(v, val) && search(depth + 1))
          return true;
        if (too_large_) return false;
        pop_level(mark);
      }
      return false;
    }
    return true;  // full model
  }

  const SolverRequest& req_;
  const SolveOptions& opts_;
  int n_ = 0;
  std::vector<int8_t> bval_;
  std::vector<std::int64_t> ilo_, ihi_;
  std::vector<uint8_t> prefer_;
  std::vector<Row> rows_;
  std::vector<Cl> cls_;
  std::vector<std::int64_t> act_min_, act_max_;
  std::vector<int> ntrue_, nfalse_;
  std::vector<std::vector<int>> occ_row_, occ_cl_;
  std::vector<std::vector<int>> groups_;
  std::vector<Event> trail_;
  std::vector<int> row_queue_, cl_queue_;
  std::vector<bool> row_queued_, cl_queued_;
  bool too_large_ = false;
};

SolverResponse solve_decision(const SolverRequest& r, const SolveOptions& opts) {
  SolverResponse resp;
  for (const VarDecl& v : r.vars)
    if (v.sort == VarSort::integer && v.lo > v.hi) {
      resp.message = "integer variable \"" + v.name + "\" has an empty domain";
      return resp;
    }
  InternalSolver solver(r, opts);
  resp.status = solver.run(&resp.model, &resp.message);
  return resp;
}

}  // namespace

SolverResponse solve_internal(const SolverRequest& r, const SolveOptions& opts) {
  if (!r.objective) return solve_decision(r, opts);
  // Optimum through repeated decision queries with a tightening bound.
  SolverRequest work = r;
  work.objective.reset();
  std::optional<SolverResponse> best;
  while (true) {
    SolverResponse resp = solve_decision(work, opts);
    if (resp.status == SolveStatus::error) return resp;
    if (resp.status != SolveStatus::sat) break;
    std::int64_t z = resp.model[*r.objective];
    resp.objective_value = z;
    best = resp;
    work.add_linear({{1, *r.objective}}, CmpOp::le, z - 1);
  }
  if (best) return *best;
  SolverResponse resp;
  resp.status = SolveStatus::unsat;
  return resp;
}

std::string external_solver_from_env() {
  const char* v = std::getenv("WEFTSCHED_SOLVER");
  return v ? std::string(v) : std::string();
}

SolverResponse solve(const SolverRequest& r, const SolveOptions& opts) {
  if (opts.external_command.empty()) return solve_internal(r, opts);
  if (r.objective) {
    // Optimization stays internal; the external path speaks plain SMT-LIB2.
    return solve_internal(r, opts);
  }
  SolverResponse resp;
  std::string script = to_smtlib2(r);
  char path[] = "/tmp/weftsched-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) {
    resp.message = "cannot create temporary file for the external solver";
    return resp;
  }
  {
    FILE* f = fdopen(fd, "w");
    fwrite(script.data(), 1, script.size(), f);
    fclose(f);
  }
  std::string cmd = opts.external_command + " < " + path + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::remove(path);
    resp.message = "cannot run external solver \"" + opts.external_command + "\"";
    return resp;
  }
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int rc = pclose(pipe);
  std::remove(path);
  if (out.empty()) {
    resp.message = "external solver produced no output (exit " +
                   std::to_string(rc) + ")";
    return resp;
  }
  return parse_model(out, r);
}

}  // namespace weftsched
