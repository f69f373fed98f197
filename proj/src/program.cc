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

#include "clpbn/program.h"

#include <unordered_map>

namespace clpbn {

std::optional<CptParts> SplitCpt(const Term& cpt) {
  if (!cpt.is_compound() || cpt.name() != "p" || cpt.arity() != 3)
    return std::nullopt;
  return CptParts{cpt.arg(0), cpt.arg(1), cpt.arg(2)};
}

bool SkolemRegistry::IsSkolem(const std::string& name,
                              std::size_t arity) const {
  if (owners_.count({name, arity}) != 0) return true;
  return arity == 0 && constants_.count(name) != 0;
}

bool SkolemRegistry::IsSkolemTerm(const Term& t) const {
  return t.is_callable() && IsSkolem(t.name(), t.arity());
}

bool SkolemRegistry::ContainsSkolem(const Term& t) const {
  if (IsSkolemTerm(t)) return true;
  if (t.is_compound())
    for (const Term& a : t.args())
      if (ContainsSkolem(a)) return true;
  return false;
}

PredicateKey KeyOf(const Term& callable) {
  return {callable.name(), callable.is_compound() ? callable.arity() : 0};
}

Program::Program(std::vector<Clause> clauses,
                 std::set<std::string> skolem_constants)
    : clauses_(std::move(clauses)) {
  for (const std::string& c : skolem_constants) registry_.AddConstant(c);
  Reindex();
}

void Program::Reindex() {
  index_.clear();
  predicates_.clear();
  SkolemRegistry fresh;
  for (const std::string& c : registry_.constants()) fresh.AddConstant(c);
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const Clause& c = clauses_[i];
    PredicateKey key = KeyOf(c.head);
    auto [it, inserted] = index_.try_emplace(key);
    if (inserted) predicates_.push_back(key);
    it->second.push_back(i);
    for (std::size_t k = 0; k < c.constraints.size(); ++k) {
      const Term& sk = c.constraints[k].skolem;
      if (sk.is_callable()) fresh.AddOwner(KeyOf(sk), {i, k});
    }
  }
  registry_ = std::move(fresh);
}

const std::vector<std::size_t>& Program::ClausesOf(
    const PredicateKey& key) const {
  static const std::vector<std::size_t> kNone;
  auto it = index_.find(key);
  return it == index_.end() ? kNone : it->second;
}

Program Program::WithClauses(const std::vector<Clause>& extra) const {
  Program out = *this;
  out.clauses_.insert(out.clauses_.end(), extra.begin(), extra.end());
  out.Reindex();
  return out;
}

namespace {

class Renamer {
 public:
  explicit Renamer(VarSource& vars) : vars_(vars) {}

  Term Rename(const Term& t) {
    if (t.ground()) return t;
    if (t.is_var()) {
      auto [it, inserted] = map_.try_emplace(t.var_id(), 0);
      if (inserted) it->second = vars_.Fresh();
      return Term::Var(it->second, t.var_name());
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(Rename(a));
    return Term::Compound(t.name(), std::move(args));
  }

 private:
  VarSource& vars_;
  std::unordered_map<VarId, VarId> map_;
};

}  // namespace

Clause StandardizeApart(const Clause& c, VarSource& vars) {
  Renamer r(vars);
  Clause out = c;
  out.head = r.Rename(c.head);
  for (Goal& g : out.body) g.term = r.Rename(g.term);
  for (Constraint& k : out.constraints) {
    k.var = r.Rename(k.var);
    k.skolem = r.Rename(k.skolem);
    k.cpt = r.Rename(k.cpt);
  }
  return out;
}

bool IsBuiltin(const std::string& name, std::size_t arity) {
  static const std::map<std::string, std::set<std::size_t>> kTable = {
      {"is", {2}},       {"<", {2}},        {"=<", {2}},      {">", {2}},
      {">=", {2}},       {"=:=", {2}},      {"=\\=", {2}},    {"=", {2}},
      {"==", {2}},       {"\\==", {2}},     {"true", {0}},    {"fail", {0}},
      {"findall", {3}},  {"setof", {3}},    {"^", {2}},       {"average", {2}},
      {"mean", {2}},     {"mode", {2}},     {"min_list", {2}},
      {"max_list", {2}},
  };
  auto it = kTable.find(name);
  return it != kTable.end() && it->second.count(arity) != 0;
}

}  // namespace clpbn
