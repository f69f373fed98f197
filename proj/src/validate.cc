/* Copyright 2026 The clpbn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <set>
#include <sstream>

#include "clpbn/analysis.h"
#include "clpbn/syntax.h"

namespace clpbn {

namespace {

Diagnostic Make(Diagnostic::Severity sev, std::string code, int clause,
                SourcePos pos, std::string message) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.clause = clause;
  d.pos = pos;
  d.message = std::move(message);
  return d;
}

Diagnostic Error(std::string code, int clause, SourcePos pos,
                 std::string message) {
  return Make(Diagnostic::Severity::kError, std::move(code), clause, pos,
              std::move(message));
}

Diagnostic Warning(std::string code, int clause, SourcePos pos,
                   std::string message) {
  return Make(Diagnostic::Severity::kWarning, std::move(code), clause, pos,
              std::move(message));
}

std::string VarLabel(const Clause& c, VarId id) {
  if (id >= 0 && static_cast<std::size_t>(id) < c.var_names.size() &&
      c.var_names[id] != "_")
    return c.var_names[id];
  return "_";
}

std::string SkolemName(const Term& sk) {
  return sk.name() + "/" + std::to_string(sk.is_compound() ? sk.arity() : 0);
}

// Column sums of a flat table, or nullopt when the shape does not fit.
std::optional<std::vector<double>> ColumnSums(const std::vector<Term>& table,
                                              std::size_t d) {
  if (d == 0 || table.empty() || table.size() % d != 0) return std::nullopt;
  std::size_t ncols = table.size() / d;
  std::vector<double> sums(ncols, 0.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t col = 0; col < ncols; ++col) {
      const Term& e = table[r * ncols + col];
      if (!e.is_number()) return std::nullopt;
      sums[col] += e.number();
    }
  return sums;
}

class Validator {
 public:
  Validator(const Program& p, const ValidateOptions& o)
      : p_(p), options_(o), positions_(ConstrainedPositions(p)) {}

  std::vector<Diagnostic> Run() {
    const auto& clauses = p_.clauses();
    for (std::size_t ci = 0; ci < clauses.size(); ++ci)
      for (const Constraint& k : clauses[ci].constraints)
        CheckConstraint(static_cast<int>(ci), clauses[ci], k);
    for (Diagnostic& d : SkolemConflicts(p_)) out_.push_back(std::move(d));
    return std::move(out_);
  }

 private:
  void CheckConstraint(int ci, const Clause& c, const Constraint& k) {
    std::set<VarId> logical;
    std::vector<VarId> ids;
    CollectVars(c.head, ids);
    for (const Goal& g : c.body)
      if (g.kind != Goal::Kind::kConstraint) CollectVars(g.term, ids);
    logical.insert(ids.begin(), ids.end());

    std::vector<VarId> mine;
    CollectVars(k.var, mine);
    CollectVars(k.skolem, mine);
    CollectVars(k.cpt, mine);
    for (VarId v : mine)
      if (logical.count(v) == 0)
        out_.push_back(Error("WF1", ci, k.pos,
                             "variable " + VarLabel(c, v) + " in constraint " +
                                 SkolemName(k.skolem) +
                                 " does not occur in the clause head or body"));

    auto parts = SplitCpt(k.cpt);
    if (!parts) return;
    std::optional<std::size_t> dsize = CheckDomain(ci, k, parts->domain);
    CheckParents(ci, c, k, parts->parents, logical);
    CheckTable(ci, c, k, parts->table, dsize);
  }

  std::optional<std::size_t> CheckDomain(int ci, const Constraint& k,
                                         const Term& d) {
    std::string where = " of " + SkolemName(k.skolem);
    if (d.is_var()) return std::nullopt;
    if (!d.ground()) {
      out_.push_back(Error("WF3a", ci, k.pos, "domain" + where +
                                                  " is not ground"));
      return std::nullopt;
    }
    auto items = ListItems(d);
    if (!items) {
      out_.push_back(Error("WF3a", ci, k.pos, "domain" + where +
                                                  " is not a list"));
      return std::nullopt;
    }
    if (items->empty()) {
      out_.push_back(Error("WF3a", ci, k.pos, "domain" + where + " is empty"));
      return std::nullopt;
    }
    std::set<std::size_t> bad;
    for (std::size_t i = 0; i < items->size(); ++i) {
      if (p_.registry().ContainsSkolem((*items)[i])) {
        out_.push_back(Error("WF3a", ci, k.pos,
                             "domain value " + FormatTerm((*items)[i]) +
                                 where + " contains a Skolem term"));
        return std::nullopt;
      }
      for (std::size_t j = 0; j < i; ++j)
        if ((*items)[i] == (*items)[j]) {
          out_.push_back(Error("WF3a", ci, k.pos,
                               "domain value " + FormatTerm((*items)[i]) +
                                   where + " is repeated"));
          return std::nullopt;
        }
    }
    return items->size();
  }

  void CheckParents(int ci, const Clause& c, const Constraint& k,
                    const Term& ps, const std::set<VarId>& logical) {
    if (ps.is_var()) return;
    auto items = ListItems(ps);
    std::string where = " of " + SkolemName(k.skolem);
    if (!items) {
      if (ps.ground())
        out_.push_back(
            Error("WF3b", ci, k.pos, "parents" + where + " is not a list"));
      return;
    }
    std::set<VarId> seen;
    for (const Term& parent : *items) {
      if (!parent.is_var()) {
        out_.push_back(Error("WF3b", ci, k.pos,
                             "parent " + FormatTerm(parent) + where +
                                 " is not a constrained variable"));
        continue;
      }
      VarId v = parent.var_id();
      if (!seen.insert(v).second) {
        out_.push_back(Error("WF3b", ci, k.pos,
                             "parent " + VarLabel(c, v) + where +
                                 " is listed twice"));
        continue;
      }
      if (logical.count(v) != 0 && ProvablyUnconstrained(c, v))
        out_.push_back(Error("WF3b", ci, k.pos,
                             "parent " + VarLabel(c, v) + where +
                                 " is never bound to a random variable"));
    }
  }

  // No path can bind `v` to a node: it is not in the head, not the variable
  // of a constraint, and every body occurrence is a direct argument at a
  // non-constrained position of a defined user predicate.
  bool ProvablyUnconstrained(const Clause& c, VarId v) {
    std::vector<VarId> head;
    CollectVars(c.head, head);
    for (VarId h : head)
      if (h == v) return false;
    for (const Constraint& k : c.constraints)
      if (k.var.is_var() && k.var.var_id() == v) return false;
    for (const Goal& g : c.body) {
      if (g.kind == Goal::Kind::kConstraint || g.kind == Goal::Kind::kCut)
        continue;
      std::vector<VarId> vs;
      CollectVars(g.term, vs);
      bool occurs = false;
      for (VarId x : vs) occurs = occurs || x == v;
      if (!occurs) continue;
      if (g.kind == Goal::Kind::kBuiltin) return false;
      PredicateKey key = KeyOf(g.term);
      if (!p_.Defines(key)) continue;
      for (std::size_t i = 0; i < g.term.arity(); ++i) {
        const Term& a = g.term.arg(i);
        if (a.is_var() && a.var_id() == v) {
          if (IsConstrainedPosition(positions_, key, i)) return false;
        } else if (!a.ground()) {
          std::vector<VarId> inner;
          CollectVars(a, inner);
          for (VarId x : inner)
            if (x == v) return false;
        }
      }
    }
    return true;
  }

  void CheckTable(int ci, const Clause& c, const Constraint& k,
                  const Term& t, std::optional<std::size_t> dsize) {
    std::string where = " of " + SkolemName(k.skolem);
    if (t.is_var()) {
      if (dsize) CheckTableSources(c, k, t.var_id(), *dsize);
      return;
    }
    if (!t.ground()) return;
    auto items = ListItems(t);
    if (!items) {
      out_.push_back(Error("WF3c", ci, k.pos, "table" + where +
                                                  " is not a list"));
      return;
    }
    for (const Term& e : *items) {
      if (!e.is_number() || e.number() < 0.0 || e.number() > 1.0) {
        out_.push_back(Error("WF3c", ci, k.pos,
                             "table entry " + FormatTerm(e) + where +
                                 " is not a probability"));
        return;
      }
    }
    if (!dsize) return;
    if (items->empty() || items->size() % *dsize != 0) {
      out_.push_back(Error(
          "WF3c", ci, k.pos,
          "table" + where + " has " + std::to_string(items->size()) +
              " entries, not a positive multiple of the domain size " +
              std::to_string(*dsize)));
      return;
    }
    WarnColumns(ci, k.pos, *items, *dsize, "table" + where);
  }

  // The table is bound by a body literal; check the ground lists that the
  // literal's clauses can supply at that position.
  void CheckTableSources(const Clause& c, const Constraint& k, VarId v,
                         std::size_t dsize) {
    for (const Goal& g : c.body) {
      if (g.kind != Goal::Kind::kLiteral || !g.term.is_compound()) continue;
      for (std::size_t i = 0; i < g.term.arity(); ++i) {
        const Term& a = g.term.arg(i);
        if (!a.is_var() || a.var_id() != v) continue;
        PredicateKey key = KeyOf(g.term);
        for (std::size_t src : p_.ClausesOf(key)) {
          const Term& h = p_.clauses()[src].head;
          if (!h.arg(i).ground()) continue;
          auto items = ListItems(h.arg(i));
          if (!items || !checked_.insert({src, i}).second) continue;
          WarnColumns(static_cast<int>(src), p_.clauses()[src].pos, *items,
                      dsize,
                      "table " + FormatTerm(h) + " used by " +
                          SkolemName(k.skolem));
        }
      }
    }
  }

  void WarnColumns(int ci, SourcePos pos, const std::vector<Term>& items,
                   std::size_t dsize, const std::string& what) {
    auto sums = ColumnSums(items, dsize);
    if (!sums) return;
    for (std::size_t col = 0; col < sums->size(); ++col) {
      double s = (*sums)[col];
      if (std::fabs(s - 1.0) <= options_.tolerance) continue;
      std::ostringstream msg;
      msg << what << ": column " << col << " sums to " << s;
      out_.push_back(Warning("non-normalized-column", ci, pos, msg.str()));
    }
  }

  const Program& p_;
  ValidateOptions options_;
  PositionMap positions_;
  std::set<std::pair<std::size_t, std::size_t>> checked_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> SkolemConflicts(const Program& p) {
  std::vector<Diagnostic> out;
  for (const auto& [functor, owners] : p.registry().owners()) {
    if (owners.size() < 2) continue;
    // Identical ground domains make the shared functor harmless.
    std::optional<Term> domain;
    bool same = true;
    for (const SkolemOwner& o : owners) {
      const Constraint& k = p.clauses()[o.clause].constraints[o.constraint];
      auto parts = SplitCpt(k.cpt);
      if (!parts || !parts->domain.ground()) {
        same = false;
        break;
      }
      if (!domain) domain = parts->domain;
      if (!(*domain == parts->domain)) same = false;
    }
    std::string name = functor.first + "/" + std::to_string(functor.second);
    const SkolemOwner& first = owners.front();
    for (std::size_t i = 1; i < owners.size(); ++i) {
      const SkolemOwner& o = owners[i];
      const Constraint& k = p.clauses()[o.clause].constraints[o.constraint];
      std::string msg = "Skolem functor " + name +
                        " is also used by the constraint in clause " +
                        std::to_string(first.clause);
      if (same) {
        out.push_back(Warning("shared-skolem-functor",
                              static_cast<int>(o.clause), k.pos,
                              msg + " with the same domain"));
      } else {
        out.push_back(Error("WF2", static_cast<int>(o.clause), k.pos, msg));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> Validate(const Program& p,
                                 const ValidateOptions& options) {
  return Validator(p, options).Run();
}

bool HasErrors(const std::vector<Diagnostic>& ds) {
  for (const Diagnostic& d : ds)
    if (d.is_error()) return true;
  return false;
}

}  // namespace clpbn
