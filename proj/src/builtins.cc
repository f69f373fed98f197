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

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "engine_impl.h"

namespace clpbn {

namespace {

constexpr std::size_t kMaxCombinations = std::size_t{1} << 20;

struct Num {
  bool is_int;
  std::int64_t i;
  double d;

  double value() const { return is_int ? static_cast<double>(i) : d; }
  Term ToTerm() const { return is_int ? Term::Int(i) : Term::Float(d); }
};

Num MakeInt(std::int64_t v) { return {true, v, 0.0}; }
Num MakeFloat(double v) { return {false, 0, v}; }

[[noreturn]] void Instantiation(const std::string& what) {
  throw EngineError("instantiation", "arguments are not sufficiently "
                                     "instantiated in " + what);
}

[[noreturn]] void TypeError(const std::string& what) {
  throw EngineError("type", what);
}

Num Eval(const Term& t0, const Substitution& s) {
  Term t = s.Walk(t0);
  switch (t.kind()) {
    case Term::Kind::kInt:
      return MakeInt(t.int_value());
    case Term::Kind::kFloat:
      return MakeFloat(t.float_value());
    case Term::Kind::kVar:
      Instantiation("arithmetic");
    case Term::Kind::kAtom:
      if (t.name() == "pi") return MakeFloat(M_PI);
      if (t.name() == "e") return MakeFloat(M_E);
      TypeError("not an arithmetic expression: " + FormatTerm(t));
    case Term::Kind::kCompound:
      break;
  }
  const std::string& f = t.name();
  if (t.arity() == 1) {
    Num a = Eval(t.arg(0), s);
    if (f == "-") return a.is_int ? MakeInt(-a.i) : MakeFloat(-a.d);
    if (f == "+") return a;
    if (f == "abs") return a.is_int ? MakeInt(std::llabs(a.i))
                                    : MakeFloat(std::fabs(a.d));
    if (f == "float") return MakeFloat(a.value());
    if (f == "round") return MakeInt(std::llround(a.value()));
    if (f == "floor") return MakeInt(static_cast<std::int64_t>(std::floor(a.value())));
    if (f == "ceiling") return MakeInt(static_cast<std::int64_t>(std::ceil(a.value())));
    if (f == "sqrt") return MakeFloat(std::sqrt(a.value()));
    if (f == "log") return MakeFloat(std::log(a.value()));
    if (f == "exp") return MakeFloat(std::exp(a.value()));
  } else if (t.arity() == 2) {
    Num a = Eval(t.arg(0), s);
    Num b = Eval(t.arg(1), s);
    bool ints = a.is_int && b.is_int;
    if (f == "+") return ints ? MakeInt(a.i + b.i) : MakeFloat(a.value() + b.value());
    if (f == "-") return ints ? MakeInt(a.i - b.i) : MakeFloat(a.value() - b.value());
    if (f == "*") return ints ? MakeInt(a.i * b.i) : MakeFloat(a.value() * b.value());
    if (f == "/") {
      if (ints) {
        if (b.i == 0) throw EngineError("evaluation", "division by zero");
        if (a.i % b.i == 0) return MakeInt(a.i / b.i);
      }
      if (b.value() == 0.0) throw EngineError("evaluation", "division by zero");
      return MakeFloat(a.value() / b.value());
    }
    if (f == "//" || f == "mod") {
      if (!ints) TypeError(f + " expects integers");
      if (b.i == 0) throw EngineError("evaluation", "division by zero");
      if (f == "//") return MakeInt(a.i / b.i);
      std::int64_t m = a.i % b.i;
      if (m != 0 && ((m < 0) != (b.i < 0))) m += b.i;
      return MakeInt(m);
    }
    if (f == "min") return a.value() <= b.value() ? a : b;
    if (f == "max") return a.value() >= b.value() ? a : b;
    if (f == "**" || f == "^") return MakeFloat(std::pow(a.value(), b.value()));
  }
  TypeError("unknown arithmetic function " + f + "/" +
            std::to_string(t.arity()));
}

int CompareNum(const Num& a, const Num& b) {
  if (a.is_int && b.is_int) return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
  double x = a.value(), y = b.value();
  return x < y ? -1 : (x > y ? 1 : 0);
}

int Rank(const Term& t) {
  if (t.is_var()) return 0;
  if (t.is_number()) return 1;
  if (t.is_atom()) return 2;
  return 3;
}

// Value of a deterministic aggregate over one parent assignment. Ties in
// `mode` go to the earliest value in `order`.
Term AggregateValue(const std::string& op, const std::vector<Term>& values,
                    const std::vector<Term>& order) {
  if (op == "mean" || op == "average") {
    double sum = 0.0;
    for (const Term& v : values) sum += v.number();
    double m = sum / static_cast<double>(values.size());
    double r = std::ceil(m - 0.5);
    return Term::Int(static_cast<std::int64_t>(r));
  }
  if (op == "mode") {
    std::size_t best = 0, best_count = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::size_t n = static_cast<std::size_t>(
          std::count(values.begin(), values.end(), order[i]));
      if (n > best_count) {
        best = i;
        best_count = n;
      }
    }
    return order[best];
  }
  // min_list / max_list: numbers by value, other terms in standard order.
  Term best = values.front();
  for (const Term& v : values) {
    int c = (v.is_number() && best.is_number())
                ? (v.number() < best.number() ? -1 : v.number() > best.number())
                : CompareTerms(v, best);
    if ((op == "min_list" && c < 0) || (op == "max_list" && c > 0)) best = v;
  }
  return best;
}

}  // namespace

int Solver::Impl::Compare(const Term& a0, const Term& b0) const {
  Term a = s.Walk(a0);
  Term b = s.Walk(b0);
  int ra = Rank(a), rb = Rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::kVar: {
      if (a.var_id() == b.var_id()) return 0;
      auto na = net->NodeOf(a.var_id());
      auto nb = net->NodeOf(b.var_id());
      if (na && nb) return *na < *nb ? -1 : (*na > *nb ? 1 : 0);
      if (na || nb) return na ? 1 : -1;
      return a.var_id() < b.var_id() ? -1 : 1;
    }
    case Term::Kind::kInt:
    case Term::Kind::kFloat:
    case Term::Kind::kAtom:
      return CompareTerms(a, b);
    case Term::Kind::kCompound:
      break;
  }
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  if (a.name() != b.name()) return a.name() < b.name() ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (int c = Compare(a.arg(i), b.arg(i))) return c;
  return 0;
}

std::vector<Goal> Solver::Impl::GoalsFromTerm(const Term& t0) const {
  std::vector<Goal> out;
  Term t = s.Walk(t0);
  if (t.is_var()) Instantiation("call");
  if (t.is_compound() && t.name() == "," && t.arity() == 2) {
    out = GoalsFromTerm(t.arg(0));
    for (Goal& g : GoalsFromTerm(t.arg(1))) out.push_back(std::move(g));
    return out;
  }
  if (!t.is_callable()) TypeError("not callable: " + FormatTerm(t));
  Goal g;
  g.term = t;
  if (t.is_atom() && t.name() == "!") {
    g.kind = Goal::Kind::kCut;
  } else if (t.name() == "{}") {
    TypeError("constraints cannot be called as goals");
  } else if (IsBuiltin(t.name(), t.is_compound() ? t.arity() : 0)) {
    g.kind = Goal::Kind::kBuiltin;
  } else {
    g.kind = Goal::Kind::kLiteral;
  }
  out.push_back(std::move(g));
  return out;
}

NodeId Solver::Impl::ImportNode(const ConstraintNetwork& inner,
                                const Substitution& sub, NodeId id) {
  if (net->Contains(id)) return id;
  Node n = inner.node(id);
  n.label = sub.Apply(n.label);
  if (auto existing = net->FindLabel(n.label)) return *existing;
  for (NodeId& p : n.parents) p = ImportNode(inner, sub, p);
  MutNet().InsertNode(std::move(n));
  return id;
}

std::vector<Term> Solver::Impl::FindAll(const Term& templ, const Term& goal,
                                        const ContPtr& at) {
  Impl sub(ctx, GoalsFromTerm(goal), s, net, at->depth + 1, at->rdepth);
  std::vector<Term> out;
  while (sub.NextRaw()) {
    Term t = sub.s.Apply(templ);
    std::vector<VarId> vars;
    CollectVars(t, vars);
    if (vars.empty()) {
      out.push_back(t);
      continue;
    }
    // Copy with fresh variables; constrained ones keep their nodes.
    Substitution renaming;
    for (VarId v : vars) {
      VarId fresh = ctx->vars.Fresh();
      renaming.Bind(v, Term::Var(fresh));
      if (auto n = sub.net->NodeOf(v)) {
        NodeId imported = ImportNode(*sub.net, sub.s, *n);
        MutNet().BindVar(fresh, imported);
      }
    }
    out.push_back(renaming.Apply(t));
  }
  return out;
}

bool Solver::Impl::SetOf(const Term& goal, const ContPtr& at,
                         const ContPtr& rest) {
  Term templ = goal.arg(0);
  Term inner = s.Walk(goal.arg(1));
  std::vector<VarId> hidden;
  CollectVars(s.Apply(templ), hidden);
  while (inner.is_compound() && inner.name() == "^" && inner.arity() == 2) {
    CollectVars(s.Apply(inner.arg(0)), hidden);
    inner = s.Walk(inner.arg(1));
  }
  std::vector<VarId> free;
  CollectVars(s.Apply(inner), free);
  std::vector<Term> witness;
  for (VarId v : free)
    if (std::find(hidden.begin(), hidden.end(), v) == hidden.end())
      witness.push_back(Term::Var(v));

  auto sort_unique = [&](std::vector<Term>& items) {
    std::stable_sort(items.begin(), items.end(),
                     [&](const Term& a, const Term& b) {
                       return Compare(a, b) < 0;
                     });
    items.erase(std::unique(items.begin(), items.end(),
                            [&](const Term& a, const Term& b) {
                              return Compare(a, b) == 0;
                            }),
                items.end());
  };

  if (witness.empty()) {
    std::vector<Term> items = FindAll(templ, inner, at);
    if (items.empty()) return false;
    sort_unique(items);
    if (!UnifyTerms(goal.arg(2), Term::List(items))) return false;
    cont = rest;
    return true;
  }

  Term w = Term::Compound("$w", witness);
  std::vector<Term> pairs =
      FindAll(Term::Compound("-", {w, templ}), inner, at);
  if (pairs.empty()) return false;
  std::stable_sort(pairs.begin(), pairs.end(),
                   [&](const Term& a, const Term& b) {
                     return Compare(a.arg(0), b.arg(0)) < 0;
                   });
  auto alts = std::make_shared<std::vector<Term>>();
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    std::vector<Term> items;
    while (j < pairs.size() && IsVariant(pairs[j].arg(0), pairs[i].arg(0))) {
      items.push_back(pairs[j].arg(1));
      ++j;
    }
    sort_unique(items);
    alts->push_back(Term::Compound("-", {pairs[i].arg(0), Term::List(items)}));
    i = j;
  }
  ChoicePoint cp;
  cp.kind = ChoicePoint::Kind::kAlternatives;
  cp.trail_mark = s.Mark();
  cp.net = net;
  cp.next = 0;
  cp.pattern = Term::Compound("-", {w, goal.arg(2)});
  cp.alts = alts;
  cp.after = rest;
  cps.push_back(std::move(cp));
  return Backtrack();
}

bool Solver::Impl::Average(const Term& nodes, const Term& cpt) {
  return Aggregate("average", nodes, cpt);
}

bool Solver::Impl::Aggregate(const std::string& op, const Term& list,
                             const Term& out) {
  auto items = ListItems(s.Apply(list));
  if (!items) Instantiation(op + "/2");
  if (items->empty()) {
    if (op == "average")
      throw EngineError("type", "average/2 needs at least one parent");
    return false;
  }
  bool all_ground = true, all_nodes = true;
  std::vector<NodeId> parents;
  for (const Term& t : *items) {
    Term w = s.Walk(t);
    all_ground = all_ground && w.ground();
    std::optional<NodeId> n;
    if (w.is_var()) n = net->NodeOf(w.var_id());
    all_nodes = all_nodes && n.has_value();
    if (n) parents.push_back(*n);
  }

  if (op != "average" && all_ground) {
    if (op == "mean") {
      bool ints = true;
      std::int64_t isum = 0;
      double sum = 0.0;
      for (const Term& t : *items) {
        if (!t.is_number()) TypeError("mean/2 expects numbers");
        ints = ints && t.is_int();
        if (t.is_int()) isum += t.int_value();
        sum += t.number();
      }
      std::int64_t n = static_cast<std::int64_t>(items->size());
      Term m = ints && isum % n == 0 ? Term::Int(isum / n)
                                     : Term::Float(sum / static_cast<double>(n));
      return UnifyTerms(out, m);
    }
    std::vector<Term> order;
    for (const Term& t : *items)
      if (std::find(order.begin(), order.end(), t) == order.end())
        order.push_back(t);
    std::stable_sort(order.begin(), order.end(), [](const Term& a, const Term& b) {
      return CompareTerms(a, b) < 0;
    });
    return UnifyTerms(out, AggregateValue(op, *items, order));
  }
  if (!all_nodes)
    TypeError(op + "/2 expects a list of numbers or of random variables");

  // Deterministic node over the parents.
  std::vector<std::size_t> sizes;
  std::size_t combos = 1;
  std::vector<Term> order;
  for (NodeId p : parents) {
    const Node& n = net->node(p);
    sizes.push_back(n.domain.size());
    combos *= n.domain.size();
    if (combos > kMaxCombinations)
      throw EngineError("limit", op + "/2 over too many parent combinations");
    for (const Term& v : n.domain) {
      if ((op == "mean" || op == "average") && !v.is_number())
        TypeError(op + "/2 needs numeric parent domains, got " + FormatTerm(v));
      if (std::find(order.begin(), order.end(), v) == order.end())
        order.push_back(v);
    }
  }
  std::vector<Term> column_value(combos);
  std::vector<Term> values(parents.size());
  for (std::size_t col = 0; col < combos; ++col) {
    std::size_t rest = col;
    for (std::size_t k = parents.size(); k-- > 0;) {
      values[k] = net->node(parents[k]).domain[rest % sizes[k]];
      rest /= sizes[k];
    }
    column_value[col] = AggregateValue(op, values, order);
  }
  std::vector<Term> domain;
  if (op == "mean" || op == "average") {
    domain = column_value;
    std::sort(domain.begin(), domain.end(), [](const Term& a, const Term& b) {
      return CompareTerms(a, b) < 0;
    });
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  } else {
    domain = order;
  }
  std::vector<Term> table(domain.size() * combos, Term::Float(0.0));
  for (std::size_t col = 0; col < combos; ++col) {
    std::size_t r = static_cast<std::size_t>(
        std::find(domain.begin(), domain.end(), column_value[col]) -
        domain.begin());
    table[r * combos + col] = Term::Float(1.0);
  }
  Term p = Term::Compound("p", {Term::List(domain), Term::List(table),
                                Term::List(*items)});
  if (op == "average") return UnifyTerms(out, p);
  std::vector<Term> labels;
  for (NodeId id : parents) labels.push_back(s.Apply(net->node(id).label));
  Constraint c;
  c.var = out;
  c.skolem = Term::Compound("$" + op, {Term::List(labels)});
  c.cpt = p;
  return PostConstraint(MutNet(), c, s, this).has_value();
}

bool Solver::Impl::CallBuiltin(const Term& goal0, const ContPtr& at,
                               const ContPtr& rest) {
  Term goal = s.Walk(goal0);
  const std::string& f = goal.name();
  std::size_t n = goal.is_compound() ? goal.arity() : 0;
  bool ok = false;
  if (n == 0) {
    if (f == "true") ok = true;
    else if (f == "fail") ok = false;
  } else if (f == "=") {
    ok = UnifyTerms(goal.arg(0), goal.arg(1));
  } else if (f == "==") {
    ok = Compare(goal.arg(0), goal.arg(1)) == 0;
  } else if (f == "\\==") {
    ok = Compare(goal.arg(0), goal.arg(1)) != 0;
  } else if (f == "is") {
    ok = UnifyTerms(goal.arg(0), Eval(goal.arg(1), s).ToTerm());
  } else if (f == "<" || f == "=<" || f == ">" || f == ">=" || f == "=:=" ||
             f == "=\\=") {
    int c = CompareNum(Eval(goal.arg(0), s), Eval(goal.arg(1), s));
    ok = (f == "<" && c < 0) || (f == "=<" && c <= 0) || (f == ">" && c > 0) ||
         (f == ">=" && c >= 0) || (f == "=:=" && c == 0) ||
         (f == "=\\=" && c != 0);
  } else if (f == "^") {
    std::vector<Goal> goals = GoalsFromTerm(goal.arg(1));
    auto clause = std::make_shared<Clause>();
    clause->body = std::move(goals);
    cont = BodyCont(clause, at->barrier, at->depth, at->rdepth, -1, rest);
    return true;
  } else if (f == "findall") {
    std::vector<Term> items = FindAll(goal.arg(0), goal.arg(1), at);
    ok = UnifyTerms(goal.arg(2), Term::List(items));
  } else if (f == "setof") {
    return SetOf(goal, at, rest);
  } else if (f == "average") {
    ok = Average(goal.arg(0), goal.arg(1));
  } else if (f == "mean" || f == "mode" || f == "min_list" ||
             f == "max_list") {
    ok = Aggregate(f, goal.arg(0), goal.arg(1));
  } else {
    throw EngineError("existence", "unknown builtin " + f);
  }
  if (ok) cont = rest;
  return ok;
}

}  // namespace clpbn
