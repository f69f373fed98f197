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

// Solver internals shared by the resolution loop and the builtins.

#ifndef CLPBN_SRC_ENGINE_IMPL_H_
#define CLPBN_SRC_ENGINE_IMPL_H_

#include <memory>
#include <set>
#include <vector>

#include "clpbn/engine.h"

namespace clpbn {

struct EngineContext {
  const Program* program = nullptr;
  SolveOptions options;
  // Program clauses with variables renumbered 0..num_vars-1.
  std::vector<Clause> clauses;
  std::set<PredicateKey> random;
  VarSource vars;
  std::uint64_t steps = 0;
};

// A pending goal: body goal `pc` of `clause`, followed by `next`.
struct Cont {
  std::shared_ptr<const Clause> clause;
  std::size_t pc = 0;
  std::size_t barrier = 0;  // choice-point height that `!` cuts back to
  std::size_t depth = 0;
  int rdepth = 0;  // nesting of random-variable predicates (permissive mode)
  int clause_index = -1;  // program clause, or -1 for query goals
  std::shared_ptr<const Cont> next;
};
using ContPtr = std::shared_ptr<const Cont>;

struct ChoicePoint {
  enum class Kind { kClauses, kAlternatives };
  Kind kind = Kind::kClauses;
  ContPtr at;  // the goal being retried
  std::size_t trail_mark = 0;
  std::shared_ptr<ConstraintNetwork> net;
  std::size_t next = 0;
  // kAlternatives: unify `pattern` with each remaining alternative.
  Term pattern;
  std::shared_ptr<const std::vector<Term>> alts;
  ContPtr after;
};

struct Solver::Impl : UnifyHooks {
  Impl(std::shared_ptr<EngineContext> context, std::vector<Goal> goals,
       Substitution subst, std::shared_ptr<ConstraintNetwork> network,
       std::size_t depth, int rdepth);

  // Runs to the next solution. False when the search space is exhausted.
  bool NextRaw();

  Result BindVar(const Term& var, const Term& value,
                 Substitution& s) override;

  ConstraintNetwork& MutNet();
  bool UnifyTerms(const Term& a, const Term& b);

  bool Run();
  bool Backtrack();
  bool Resolve(const ContPtr& at, std::size_t start);
  bool PostGoal(const ContPtr& at, const Goal& g);
  ContPtr Advance(const ContPtr& at) const;
  ContPtr BodyCont(std::shared_ptr<const Clause> clause, std::size_t barrier,
                   std::size_t depth, int rdepth, int clause_index,
                   ContPtr next) const;

  // Builtins (builtins.cc).
  bool CallBuiltin(const Term& goal, const ContPtr& at, const ContPtr& rest);
  std::vector<Goal> GoalsFromTerm(const Term& t) const;
  std::vector<Term> FindAll(const Term& templ, const Term& goal,
                            const ContPtr& at);
  bool SetOf(const Term& goal, const ContPtr& at, const ContPtr& rest);
  bool Average(const Term& nodes, const Term& cpt);
  bool Aggregate(const std::string& op, const Term& list, const Term& out);
  int Compare(const Term& a, const Term& b) const;
  NodeId ImportNode(const ConstraintNetwork& inner, const Substitution& sub,
                    NodeId id);

  std::shared_ptr<EngineContext> ctx;
  Substitution s;
  std::shared_ptr<ConstraintNetwork> net;
  std::vector<ChoicePoint> cps;
  ContPtr cont;
  bool started = false;
  bool exhausted = false;
  // Top-level query, when this is not a sub-solver.
  Query query;
};

}  // namespace clpbn

#endif  // CLPBN_SRC_ENGINE_IMPL_H_
