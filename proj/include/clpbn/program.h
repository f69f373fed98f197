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

// Clauses, constraints and programs.
//
// A clause is a head, a body of goals in textual order and the Bayes-net
// constraints `{V = Sk with CPT}` that appear in that body. Constraint goals
// keep their position in the body so that a CPT computed by an earlier goal
// is available when the constraint is posted.

#ifndef CLPBN_PROGRAM_H_
#define CLPBN_PROGRAM_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clpbn/term.h"

namespace clpbn {

struct SourcePos {
  int line = 0;
  int column = 0;
};

// `{V = Sk with CPT}`. `cpt` is either a variable or p(Domain, Table,
// Parents).
struct Constraint {
  Term var;
  Term skolem;
  Term cpt;
  SourcePos pos;
};

// The three lists of a p(D, T, P) term, when `cpt` has that shape. The lists
// themselves may still contain variables.
struct CptParts {
  Term domain;
  Term table;
  Term parents;
};
std::optional<CptParts> SplitCpt(const Term& cpt);

struct Goal {
  enum class Kind { kLiteral, kCut, kBuiltin, kConstraint };
  Kind kind = Kind::kLiteral;
  Term term;  // the call; for kConstraint, a copy of the constraint term
  std::size_t constraint = 0;  // index into Clause::constraints
  SourcePos pos;
};

struct Clause {
  Term head;
  std::vector<Goal> body;
  std::vector<Constraint> constraints;
  // Variables are numbered 0..num_vars-1 in order of first occurrence.
  std::size_t num_vars = 0;
  std::vector<std::string> var_names;
  SourcePos pos;

  bool is_fact() const { return body.empty(); }
};

using PredicateKey = std::pair<std::string, std::size_t>;

struct SkolemOwner {
  std::size_t clause;
  std::size_t constraint;
};

// Skolem functors inferred from the Sk position of constraints, plus Skolem
// constants declared by compiled PRM skeletons.
class SkolemRegistry {
 public:
  void AddOwner(const PredicateKey& functor, SkolemOwner owner) {
    owners_[functor].push_back(owner);
  }
  void AddConstant(const std::string& name) { constants_.insert(name); }

  bool IsSkolem(const std::string& name, std::size_t arity) const;
  bool IsSkolemTerm(const Term& t) const;
  // True if `t` has a Skolem subterm (including `t` itself).
  bool ContainsSkolem(const Term& t) const;

  const std::map<PredicateKey, std::vector<SkolemOwner>>& owners() const {
    return owners_;
  }
  const std::set<std::string>& constants() const { return constants_; }

 private:
  std::map<PredicateKey, std::vector<SkolemOwner>> owners_;
  std::set<std::string> constants_;
};

class Program {
 public:
  Program() = default;
  explicit Program(std::vector<Clause> clauses,
                   std::set<std::string> skolem_constants = {});

  const std::vector<Clause>& clauses() const { return clauses_; }
  const SkolemRegistry& registry() const { return registry_; }
  // Clause indices of a predicate, in textual order.
  const std::vector<std::size_t>& ClausesOf(const PredicateKey& key) const;
  bool Defines(const PredicateKey& key) const {
    return index_.count(key) != 0;
  }
  // Predicates in order of first definition.
  const std::vector<PredicateKey>& predicates() const { return predicates_; }

  // A copy with `extra` clauses appended.
  Program WithClauses(const std::vector<Clause>& extra) const;

 private:
  void Reindex();

  std::vector<Clause> clauses_;
  SkolemRegistry registry_;
  std::map<PredicateKey, std::vector<std::size_t>> index_;
  std::vector<PredicateKey> predicates_;
};

PredicateKey KeyOf(const Term& callable);

// A variant of `c` whose variables are fresh ids from `vars`. A single
// renaming covers head, body and constraints.
Clause StandardizeApart(const Clause& c, VarSource& vars);

// Builtins recognised by the engine, by name/arity.
bool IsBuiltin(const std::string& name, std::size_t arity);

}  // namespace clpbn

#endif  // CLPBN_PROGRAM_H_
