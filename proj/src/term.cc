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

#include "clpbn/term.h"

#include <functional>
#include <map>

namespace clpbn {

namespace {

const Term& NilTerm() {
  static const Term nil = Term::Atom("[]");
  return nil;
}

int KindRank(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar:
      return 0;
    case Term::Kind::kInt:
    case Term::Kind::kFloat:
      return 1;
    case Term::Kind::kAtom:
      return 2;
    case Term::Kind::kCompound:
      return 3;
  }
  return 4;
}

}  // namespace

Term::Term() : d_(NilTerm().d_) {}

Term Term::Var(VarId id, std::string name) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kVar;
  d->ground = false;
  d->id = id;
  d->name = std::move(name);
  return Term(std::move(d));
}

Term Term::Atom(std::string name) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kAtom;
  d->ground = true;
  d->name = std::move(name);
  return Term(std::move(d));
}

Term Term::Int(std::int64_t value) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kInt;
  d->ground = true;
  d->id = value;
  return Term(std::move(d));
}

Term Term::Float(double value) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::kFloat;
  d->ground = true;
  d->real = value;
  return Term(std::move(d));
}

Term Term::Compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) return Atom(std::move(functor));
  auto d = std::make_shared<Data>();
  d->kind = Kind::kCompound;
  d->ground = true;
  for (const Term& a : args) d->ground = d->ground && a.ground();
  d->name = std::move(functor);
  d->args = std::move(args);
  return Term(std::move(d));
}

Term Term::Nil() { return NilTerm(); }

Term Term::Cons(Term head, Term tail) {
  return Compound(".", {std::move(head), std::move(tail)});
}

Term Term::List(const std::vector<Term>& items, Term tail) {
  Term out = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = Cons(*it, out);
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.d_ == b.d_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::kVar:
    case Term::Kind::kInt:
      return a.d_->id == b.d_->id;
    case Term::Kind::kFloat:
      return a.d_->real == b.d_->real;
    case Term::Kind::kAtom:
      return a.d_->name == b.d_->name;
    case Term::Kind::kCompound:
      if (a.d_->name != b.d_->name || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.arg(i) != b.arg(i)) return false;
      return true;
  }
  return false;
}

std::size_t Term::hash() const {
  std::size_t h = static_cast<std::size_t>(kind()) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  switch (kind()) {
    case Kind::kVar:
    case Kind::kInt:
      mix(std::hash<std::int64_t>()(d_->id));
      break;
    case Kind::kFloat:
      mix(std::hash<double>()(d_->real));
      break;
    case Kind::kAtom:
      mix(std::hash<std::string>()(d_->name));
      break;
    case Kind::kCompound:
      mix(std::hash<std::string>()(d_->name));
      for (const Term& a : d_->args) mix(a.hash());
      break;
  }
  return h;
}

std::optional<std::vector<Term>> ListItems(const Term& t) {
  std::vector<Term> items;
  Term cur = t;
  while (cur.is_cons()) {
    items.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  if (!cur.is_nil()) return std::nullopt;
  return items;
}

int CompareTerms(const Term& a, const Term& b) {
  int ra = KindRank(a), rb = KindRank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::kVar:
      return a.var_id() < b.var_id() ? -1 : (a.var_id() > b.var_id() ? 1 : 0);
    case Term::Kind::kInt:
    case Term::Kind::kFloat: {
      double x = a.number(), y = b.number();
      if (x != y) return x < y ? -1 : 1;
      if (a.is_float() != b.is_float()) return a.is_float() ? -1 : 1;
      return 0;
    }
    case Term::Kind::kAtom:
      return a.name().compare(b.name()) < 0 ? -1
             : a.name() == b.name()         ? 0
                                            : 1;
    case Term::Kind::kCompound: {
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      int c = a.name().compare(b.name());
      if (c != 0) return c < 0 ? -1 : 1;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        int r = CompareTerms(a.arg(i), b.arg(i));
        if (r != 0) return r;
      }
      return 0;
    }
  }
  return 0;
}

void CollectVars(const Term& t, std::vector<VarId>& out) {
  if (t.ground()) return;
  if (t.is_var()) {
    for (VarId v : out)
      if (v == t.var_id()) return;
    out.push_back(t.var_id());
    return;
  }
  for (const Term& a : t.args()) CollectVars(a, out);
}

Term OffsetVars(const Term& t, VarId base) {
  if (t.ground()) return t;
  if (t.is_var()) return Term::Var(base + t.var_id(), t.var_name());
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(OffsetVars(a, base));
  return Term::Compound(t.name(), std::move(args));
}

Term Substitution::Walk(Term t) const {
  while (t.is_var()) {
    auto it = bindings_.find(t.var_id());
    if (it == bindings_.end()) break;
    t = it->second;
  }
  return t;
}

Term Substitution::Apply(const Term& t) const {
  if (t.ground()) return t;
  if (t.is_var()) {
    Term w = Walk(t);
    if (w.is_var()) return w;
    return Apply(w);
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(Apply(a));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return t;
  return Term::Compound(t.name(), std::move(args));
}

const Term* Substitution::Lookup(VarId v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::Bind(VarId v, Term value) {
  bindings_.insert_or_assign(v, std::move(value));
  trail_.push_back(v);
}

void Substitution::Undo(std::size_t mark) {
  while (trail_.size() > mark) {
    bindings_.erase(trail_.back());
    trail_.pop_back();
  }
}

bool OccursIn(VarId v, const Term& t, const Substitution& s) {
  if (t.ground()) return false;
  Term w = s.Walk(t);
  if (w.is_var()) return w.var_id() == v;
  for (const Term& a : w.args())
    if (OccursIn(v, a, s)) return true;
  return false;
}

namespace {

bool UnifyRec(const Term& a, const Term& b, Substitution& s,
              UnifyHooks* hooks) {
  Term x = s.Walk(a);
  Term y = s.Walk(b);
  if (x.same_node(y)) return true;
  if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
  if (!x.is_var() && y.is_var()) std::swap(x, y);
  if (x.is_var()) {
    if (hooks != nullptr) {
      switch (hooks->BindVar(x, y, s)) {
        case UnifyHooks::Result::kSucceeded:
          return true;
        case UnifyHooks::Result::kFailed:
          return false;
        case UnifyHooks::Result::kDefault:
          break;
      }
    }
    if (!y.is_var() && OccursIn(x.var_id(), y, s)) return false;
    s.Bind(x.var_id(), y);
    return true;
  }
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::kAtom:
    case Term::Kind::kInt:
    case Term::Kind::kFloat:
      return x == y;
    case Term::Kind::kCompound:
      if (x.name() != y.name() || x.arity() != y.arity()) return false;
      for (std::size_t i = 0; i < x.arity(); ++i)
        if (!UnifyRec(x.arg(i), y.arg(i), s, hooks)) return false;
      return true;
    case Term::Kind::kVar:
      break;
  }
  return false;
}

bool VariantRec(const Term& a, const Term& b, std::map<VarId, VarId>& fwd,
                std::map<VarId, VarId>& bwd) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::kVar: {
      auto f = fwd.find(a.var_id());
      auto g = bwd.find(b.var_id());
      if (f == fwd.end() && g == bwd.end()) {
        fwd[a.var_id()] = b.var_id();
        bwd[b.var_id()] = a.var_id();
        return true;
      }
      return f != fwd.end() && g != bwd.end() && f->second == b.var_id() &&
             g->second == a.var_id();
    }
    case Term::Kind::kCompound:
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!VariantRec(a.arg(i), b.arg(i), fwd, bwd)) return false;
      return true;
    default:
      return a == b;
  }
}

}  // namespace

bool UnifyInPlace(const Term& a, const Term& b, Substitution& s,
                  UnifyHooks* hooks) {
  std::size_t mark = s.Mark();
  if (UnifyRec(a, b, s, hooks)) return true;
  s.Undo(mark);
  return false;
}

std::optional<Substitution> Unify(const Term& a, const Term& b,
                                  Substitution s) {
  if (!UnifyInPlace(a, b, s)) return std::nullopt;
  return s;
}

bool IsVariant(const Term& a, const Term& b) {
  std::map<VarId, VarId> fwd, bwd;
  return VariantRec(a, b, fwd, bwd);
}

}  // namespace clpbn
