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

#include "clpbn/engine.h"

#include "clpbn/analysis.h"
#include "engine_impl.h"

namespace clpbn {

namespace {

// Renumbers a clause's variables 0..n-1 so renaming is an offset.
Clause Normalize(const Clause& c) {
  VarSource from_zero(0);
  Clause out = StandardizeApart(c, from_zero);
  out.num_vars = static_cast<std::size_t>(from_zero.peek());
  return out;
}

std::shared_ptr<const Clause> Rename(const Clause& c, VarId base) {
  auto out = std::make_shared<Clause>();
  out->head = OffsetVars(c.head, base);
  out->body = c.body;
  for (Goal& g : out->body) g.term = OffsetVars(g.term, base);
  out->constraints = c.constraints;
  for (Constraint& k : out->constraints) {
    k.var = OffsetVars(k.var, base);
    k.skolem = OffsetVars(k.skolem, base);
    k.cpt = OffsetVars(k.cpt, base);
  }
  out->num_vars = c.num_vars;
  out->pos = c.pos;
  return out;
}

}  // namespace

Query PreprocessEvidence(const Program& p, const Query& q) {
  PositionMap positions = ConstrainedPositions(p);
  Query out = q;
  out.goals.clear();
  int fresh = 0;
  for (const Goal& g : q.goals) {
    if (g.kind != Goal::Kind::kLiteral || !g.term.is_compound()) {
      out.goals.push_back(g);
      continue;
    }
    PredicateKey key = KeyOf(g.term);
    std::vector<Term> args(g.term.args().begin(), g.term.args().end());
    std::vector<Goal> evidence;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!args[i].ground() || !IsConstrainedPosition(positions, key, i) ||
          p.registry().ContainsSkolem(args[i]))
        continue;
      VarId id = static_cast<VarId>(out.num_vars++);
      std::string name = "_E" + std::to_string(++fresh);
      out.var_names.push_back(name);
      Term v = Term::Var(id, name);
      Goal eq;
      eq.kind = Goal::Kind::kBuiltin;
      eq.term = Term::Compound("=", {v, args[i]});
      eq.pos = g.pos;
      evidence.push_back(std::move(eq));
      args[i] = v;
    }
    Goal lit = g;
    lit.term = Term::Compound(g.term.name(), std::move(args));
    out.goals.push_back(std::move(lit));
    for (Goal& e : evidence) out.goals.push_back(std::move(e));
  }
  return out;
}

Solver::Impl::Impl(std::shared_ptr<EngineContext> context,
                   std::vector<Goal> goals, Substitution subst,
                   std::shared_ptr<ConstraintNetwork> network,
                   std::size_t depth, int rdepth)
    : ctx(std::move(context)), s(std::move(subst)), net(std::move(network)) {
  if (goals.empty()) return;
  auto clause = std::make_shared<Clause>();
  clause->body = std::move(goals);
  cont = BodyCont(clause, 0, depth, rdepth, -1, nullptr);
}

ConstraintNetwork& Solver::Impl::MutNet() {
  if (net.use_count() > 1) net = std::make_shared<ConstraintNetwork>(*net);
  return *net;
}

UnifyHooks::Result Solver::Impl::BindVar(const Term& var, const Term& value,
                                         Substitution& subst) {
  std::optional<NodeId> n1 = net->NodeOf(var.var_id());
  if (value.is_var()) {
    if (!n1) return Result::kDefault;
    std::optional<NodeId> n2 = net->NodeOf(value.var_id());
    if (!n2) {
      subst.Bind(value.var_id(), var);
      return Result::kSucceeded;
    }
    if (!UnifyConstrained(MutNet(), var.var_id(), value.var_id(), subst, this))
      return Result::kFailed;
    subst.Bind(var.var_id(), value);
    return Result::kSucceeded;
  }
  if (!n1) return Result::kDefault;
  if (value.ground())
    return MutNet().SetEvidence(*n1, value) ? Result::kSucceeded
                                            : Result::kFailed;
  const Node& n = net->node(*n1);
  std::vector<bool> keep(n.domain.size());
  for (std::size_t i = 0; i < n.domain.size(); ++i)
    keep[i] = Unify(value, n.domain[i], subst).has_value();
  return MutNet().RestrictDomain(*n1, keep) ? Result::kSucceeded
                                            : Result::kFailed;
}

bool Solver::Impl::UnifyTerms(const Term& a, const Term& b) {
  std::shared_ptr<ConstraintNetwork> saved = net;
  if (UnifyInPlace(a, b, s, this)) return true;
  net = std::move(saved);
  return false;
}

ContPtr Solver::Impl::BodyCont(std::shared_ptr<const Clause> clause,
                               std::size_t barrier, std::size_t depth,
                               int rdepth, int clause_index,
                               ContPtr next) const {
  if (clause->body.empty()) return next;
  auto c = std::make_shared<Cont>();
  c->clause = std::move(clause);
  c->pc = 0;
  c->barrier = barrier;
  c->depth = depth;
  c->rdepth = rdepth;
  c->clause_index = clause_index;
  c->next = std::move(next);
  return c;
}

ContPtr Solver::Impl::Advance(const ContPtr& at) const {
  if (at->pc + 1 >= at->clause->body.size()) return at->next;
  auto c = std::make_shared<Cont>(*at);
  ++c->pc;
  return c;
}

bool Solver::Impl::Resolve(const ContPtr& at, std::size_t start) {
  const Goal& g = at->clause->body[at->pc];
  Term goal = s.Walk(g.term);
  const Program& p = *ctx->program;
  const std::vector<std::size_t>& candidates = p.ClausesOf(KeyOf(goal));
  if (at->depth + 1 > ctx->options.depth_limit)
    throw LimitExceeded("depth limit of " +
                        std::to_string(ctx->options.depth_limit) +
                        " frames exceeded");
  int rdepth = at->rdepth;
  if (ctx->options.permissive && ctx->random.count(KeyOf(goal)) != 0)
    ++rdepth;
  ContPtr rest = Advance(at);
  for (std::size_t i = start; i < candidates.size(); ++i) {
    const Clause& c = ctx->clauses[candidates[i]];
    std::size_t mark = s.Mark();
    std::shared_ptr<ConstraintNetwork> saved = net;
    VarId base = ctx->vars.Reserve(c.num_vars);
    std::shared_ptr<const Clause> renamed = Rename(c, base);
    if (!UnifyInPlace(goal, renamed->head, s, this)) {
      s.Undo(mark);
      net = std::move(saved);
      continue;
    }
    std::size_t barrier = cps.size();
    if (i + 1 < candidates.size()) {
      ChoicePoint cp;
      cp.kind = ChoicePoint::Kind::kClauses;
      cp.at = at;
      cp.trail_mark = mark;
      cp.net = std::move(saved);
      cp.next = i + 1;
      cps.push_back(std::move(cp));
    }
    cont = BodyCont(std::move(renamed), barrier, at->depth + 1, rdepth,
                    static_cast<int>(candidates[i]), std::move(rest));
    return true;
  }
  return false;
}

bool Solver::Impl::PostGoal(const ContPtr& at, const Goal& g) {
  const Constraint& c = at->clause->constraints[g.constraint];
  if (ctx->options.permissive && at->rdepth >= 2)
    return PostStub(MutNet(), c, s).has_value();
  std::optional<SkolemOwner> origin;
  if (at->clause_index >= 0)
    origin = SkolemOwner{static_cast<std::size_t>(at->clause_index),
                         g.constraint};
  return PostConstraint(MutNet(), c, s, this, origin).has_value();
}

bool Solver::Impl::Backtrack() {
  while (!cps.empty()) {
    ChoicePoint cp = std::move(cps.back());
    cps.pop_back();
    s.Undo(cp.trail_mark);
    net = cp.net;
    if (cp.kind == ChoicePoint::Kind::kClauses) {
      if (Resolve(cp.at, cp.next)) return true;
      continue;
    }
    for (std::size_t i = cp.next; i < cp.alts->size(); ++i) {
      std::size_t mark = s.Mark();
      if (UnifyTerms(cp.pattern, (*cp.alts)[i])) {
        if (i + 1 < cp.alts->size()) {
          ChoicePoint again = cp;
          again.next = i + 1;
          again.net = cp.net;
          cps.push_back(std::move(again));
        }
        cont = cp.after;
        return true;
      }
      s.Undo(mark);
      net = cp.net;
    }
  }
  return false;
}

bool Solver::Impl::Run() {
  const SolveOptions& o = ctx->options;
  while (true) {
    if (!cont) return true;
    if (++ctx->steps > o.step_limit)
      throw LimitExceeded("step limit of " + std::to_string(o.step_limit) +
                          " resolution steps exceeded");
    ContPtr at = cont;
    const Goal& g = at->clause->body[at->pc];
    bool ok = true;
    switch (g.kind) {
      case Goal::Kind::kCut:
        if (cps.size() > at->barrier) cps.resize(at->barrier);
        cont = Advance(at);
        break;
      case Goal::Kind::kConstraint:
        ok = PostGoal(at, g);
        if (ok) cont = Advance(at);
        break;
      case Goal::Kind::kBuiltin:
        ok = CallBuiltin(g.term, at, Advance(at));
        break;
      case Goal::Kind::kLiteral: {
        if (o.permissive && at->rdepth >= 2 &&
            ctx->random.count(KeyOf(s.Walk(g.term))) != 0) {
          cont = Advance(at);
          break;
        }
        ok = Resolve(at, 0);
        break;
      }
    }
    if (!ok && !Backtrack()) return false;
  }
}

bool Solver::Impl::NextRaw() {
  if (exhausted) return false;
  bool ok;
  if (!started) {
    started = true;
    ok = Run();
  } else {
    ok = Backtrack() && Run();
  }
  if (!ok) exhausted = true;
  return ok;
}

Solver::Solver(const Program& p, const Query& q, SolveOptions options) {
  auto ctx = std::make_shared<EngineContext>();
  ctx->program = &p;
  ctx->options = options;
  ctx->clauses.reserve(p.clauses().size());
  for (const Clause& c : p.clauses()) ctx->clauses.push_back(Normalize(c));
  if (options.permissive)
    for (const PredicateKey& k : RandomPredicates(p)) ctx->random.insert(k);
  Query query = options.preprocess_evidence ? PreprocessEvidence(p, q) : q;
  ctx->vars = VarSource(static_cast<VarId>(query.num_vars) + 1);
  auto network = std::make_shared<ConstraintNetwork>();
  network->set_permissive(options.permissive);
  impl_ = std::make_unique<Impl>(ctx, query.goals, Substitution(), network,
                                 0, 0);
  impl_->query = std::move(query);
}

Solver::~Solver() = default;

std::optional<Answer> Solver::Next() {
  try {
    while (impl_->NextRaw()) {
      Answer a;
      a.network = *impl_->net;
      if (!FreezeLabels(a.network, impl_->s)) continue;
      if (!a.network.permissive())
        if (auto cycle = a.network.FindCycle())
          throw EngineError("acyclic", "answer network has a cycle");
      for (const auto& [name, id] : impl_->query.named_vars) {
        Term v = Term::Var(id, name);
        a.bindings.emplace_back(name, impl_->s.Apply(v));
        Term w = impl_->s.Walk(v);
        if (w.is_var())
          if (auto n = a.network.NodeOf(w.var_id()))
            a.query_nodes.emplace_back(name, *n);
      }
      a.substitution = impl_->s;
      return a;
    }
  } catch (const NetworkError& e) {
    throw EngineError(e.code(), e.what());
  }
  return std::nullopt;
}

std::vector<Answer> Solve(const Program& p, const Query& q, std::size_t limit,
                          SolveOptions options) {
  Solver solver(p, q, options);
  std::vector<Answer> out;
  while (limit == 0 || out.size() < limit) {
    std::optional<Answer> a = solver.Next();
    if (!a) break;
    out.push_back(std::move(*a));
  }
  return out;
}

}  // namespace clpbn
