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

#include "clpbn/inference.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "clpbn/analysis.h"

namespace clpbn {

namespace {

constexpr std::size_t kMaxJointStates = std::size_t{1} << 24;

std::size_t IndexOf(const std::vector<NodeId>& vars, NodeId v) {
  auto it = std::find(vars.begin(), vars.end(), v);
  return it == vars.end() ? vars.size()
                          : static_cast<std::size_t>(it - vars.begin());
}

// Stride of each variable of `vars` inside factor `f`; zero when absent.
std::vector<std::size_t> StridesIn(const Factor& f,
                                   const std::vector<NodeId>& vars) {
  std::vector<std::size_t> own(f.vars.size());
  std::size_t stride = 1;
  for (std::size_t k = f.vars.size(); k-- > 0;) {
    own[k] = stride;
    stride *= f.card[k];
  }
  std::vector<std::size_t> out(vars.size(), 0);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    std::size_t i = IndexOf(f.vars, vars[k]);
    if (i < f.vars.size()) out[k] = own[i];
  }
  return out;
}

std::size_t Product(const std::vector<std::size_t>& v) {
  std::size_t p = 1;
  for (std::size_t x : v) p *= x;
  return p;
}

// Advances a mixed-radix counter, last digit fastest, keeping `offsets`
// (one per tracked factor) in step.
void Step(std::vector<std::size_t>& digits, const std::vector<std::size_t>& card,
          const std::vector<std::vector<std::size_t>>& strides,
          std::vector<std::size_t>& offsets) {
  for (std::size_t k = digits.size(); k-- > 0;) {
    if (++digits[k] < card[k]) {
      for (std::size_t f = 0; f < offsets.size(); ++f)
        offsets[f] += strides[f][k];
      return;
    }
    for (std::size_t f = 0; f < offsets.size(); ++f)
      offsets[f] -= strides[f][k] * (card[k] - 1);
    digits[k] = 0;
  }
}

std::vector<double> NormalizedTable(const Node& n) {
  if (n.stub)
    throw InferenceError("placeholder", "node " + FormatTerm(n.label) +
                                            " has no CPT");
  std::vector<double> t = n.table;
  if (!NormalizeColumns(t, n.domain.size()))
    throw InferenceError("malformed-cpt", "CPT of " + FormatTerm(n.label) +
                                              " has an all-zero column");
  return t;
}

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string FormatProb(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", p);
  return buf;
}

}  // namespace

Factor Multiply(const Factor& a, const Factor& b) {
  Factor out;
  out.vars = a.vars;
  out.card = a.card;
  for (std::size_t k = 0; k < b.vars.size(); ++k)
    if (IndexOf(out.vars, b.vars[k]) == out.vars.size()) {
      out.vars.push_back(b.vars[k]);
      out.card.push_back(b.card[k]);
    }
  out.values.assign(Product(out.card), 0.0);
  std::vector<std::vector<std::size_t>> strides{StridesIn(a, out.vars),
                                                StridesIn(b, out.vars)};
  std::vector<std::size_t> digits(out.vars.size(), 0), offsets{0, 0};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = a.values[offsets[0]] * b.values[offsets[1]];
    Step(digits, out.card, strides, offsets);
  }
  return out;
}

Factor SumOut(const Factor& f, NodeId var) {
  std::size_t at = IndexOf(f.vars, var);
  if (at == f.vars.size()) return f;
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k)
    if (k != at) {
      out.vars.push_back(f.vars[k]);
      out.card.push_back(f.card[k]);
    }
  out.values.assign(Product(out.card), 0.0);
  std::vector<std::vector<std::size_t>> strides{StridesIn(out, f.vars)};
  std::vector<std::size_t> digits(f.vars.size(), 0), offsets{0};
  for (double v : f.values) {
    out.values[offsets[0]] += v;
    Step(digits, f.card, strides, offsets);
  }
  return out;
}

Factor Reduce(const Factor& f, NodeId var, std::size_t index) {
  std::size_t at = IndexOf(f.vars, var);
  if (at == f.vars.size()) return f;
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k)
    if (k != at) {
      out.vars.push_back(f.vars[k]);
      out.card.push_back(f.card[k]);
    }
  out.values.reserve(Product(out.card));
  std::vector<std::size_t> digits(f.vars.size(), 0), offsets;
  for (double v : f.values) {
    if (digits[at] == index) out.values.push_back(v);
    Step(digits, f.card, {}, offsets);
  }
  return out;
}

Factor NodeFactor(const ConstraintNetwork& net, NodeId id) {
  const Node& n = net.node(id);
  Factor f;
  f.vars.push_back(id);
  f.card.push_back(n.domain.size());
  for (NodeId p : n.parents) {
    f.vars.push_back(p);
    f.card.push_back(net.node(p).domain.size());
  }
  f.values = NormalizedTable(n);
  return f;
}

Marginal ComputeMarginal(const ConstraintNetwork& net, NodeId target,
                         const MarginalOptions& options) {
  if (!net.Contains(target))
    throw InferenceError("unknown-node",
                         "no node " + std::to_string(target) + " in network");
  // Barren nodes (neither ancestors of the target nor of evidence) sum to
  // one and are dropped.
  std::set<NodeId> relevant;
  for (NodeId a : net.Ancestors(target)) relevant.insert(a);
  for (const auto& [id, n] : net.nodes())
    if (n.evidence)
      for (NodeId a : net.Ancestors(id)) relevant.insert(a);

  std::vector<Factor> factors;
  for (NodeId id : relevant) {
    Factor f = NodeFactor(net, id);
    for (NodeId v : std::vector<NodeId>(f.vars)) {
      const Node& n = net.node(v);
      if (v != target && n.evidence) f = Reduce(f, v, *n.evidence);
    }
    factors.push_back(std::move(f));
  }

  std::set<NodeId> pending;
  for (NodeId id : relevant)
    if (id != target && !net.node(id).evidence) pending.insert(id);
  while (!pending.empty()) {
    NodeId best = 0;
    std::size_t best_degree = 0;
    bool found = false;
    for (NodeId v : pending) {
      std::set<NodeId> nb;
      for (const Factor& f : factors)
        if (IndexOf(f.vars, v) < f.vars.size())
          nb.insert(f.vars.begin(), f.vars.end());
      std::size_t degree = nb.empty() ? 0 : nb.size() - 1;
      bool better = !found || degree < best_degree ||
                    (degree == best_degree && options.reverse_ties && v > best);
      if (better) {
        best = v;
        best_degree = degree;
        found = true;
      }
    }
    pending.erase(best);
    Factor prod;
    prod.values = {1.0};
    std::vector<Factor> rest;
    for (Factor& f : factors) {
      if (IndexOf(f.vars, best) < f.vars.size())
        prod = Multiply(prod, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(SumOut(prod, best));
    factors = std::move(rest);
  }

  Factor result;
  result.values = {1.0};
  for (const Factor& f : factors) result = Multiply(result, f);
  const Node& t = net.node(target);
  Marginal m;
  m.node = target;
  m.domain = t.domain;
  m.probs.assign(t.domain.size(), 0.0);
  std::size_t at = IndexOf(result.vars, target);
  for (std::size_t i = 0; i < t.domain.size(); ++i) {
    if (t.evidence && *t.evidence != i) continue;
    m.probs[i] = at < result.vars.size() ? Reduce(result, target, i).values[0]
                                         : result.values[0];
  }
  double z = 0.0;
  for (double p : m.probs) z += p;
  if (!(z > 0.0))
    throw InferenceError("inconsistent-evidence",
                         "the evidence has probability zero");
  for (double& p : m.probs) p /= z;
  return m;
}

Factor EnumerateJoint(const ConstraintNetwork& net) {
  std::vector<NodeId> ids;
  std::map<NodeId, std::vector<double>> tables;
  for (const auto& [id, n] : net.nodes()) {
    tables[id] = NormalizedTable(n);
    if (!n.evidence) ids.push_back(id);
  }
  Factor joint;
  joint.vars = ids;
  std::size_t states = 1;
  for (NodeId id : ids) {
    joint.card.push_back(net.node(id).domain.size());
    states *= joint.card.back();
    if (states > kMaxJointStates)
      throw InferenceError("limit", "joint has more than 2^24 states");
  }
  joint.values.assign(states, 0.0);
  std::map<NodeId, std::size_t> value;
  for (const auto& [id, n] : net.nodes())
    value[id] = n.evidence ? *n.evidence : 0;
  std::vector<std::size_t> digits(ids.size(), 0), offsets;
  double z = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t k = 0; k < ids.size(); ++k) value[ids[k]] = digits[k];
    double p = 1.0;
    for (const auto& [id, n] : net.nodes()) {
      std::size_t col = 0;
      for (NodeId q : n.parents)
        col = col * net.node(q).domain.size() + value[q];
      p *= tables[id][value[id] * n.columns() + col];
      if (p == 0.0) break;
    }
    joint.values[s] = p;
    z += p;
    Step(digits, joint.card, {}, offsets);
  }
  if (!(z > 0.0))
    throw InferenceError("inconsistent-evidence",
                         "the evidence has probability zero");
  for (double& v : joint.values) v /= z;
  return joint;
}

Marginal MarginalFromJoint(const ConstraintNetwork& net, const Factor& joint,
                           NodeId target) {
  const Node& t = net.node(target);
  Marginal m;
  m.node = target;
  m.domain = t.domain;
  m.probs.assign(t.domain.size(), 0.0);
  if (t.evidence) {
    m.probs[*t.evidence] = 1.0;
    return m;
  }
  Factor f = joint;
  for (NodeId v : joint.vars)
    if (v != target) f = SumOut(f, v);
  m.probs = f.values;
  return m;
}

SampleTable SampleNetwork(const ConstraintNetwork& net, std::size_t n,
                          std::uint64_t seed) {
  SampleTable out;
  out.order = net.TopologicalOrder();
  if (out.order.size() != net.size())
    throw InferenceError("acyclic", "cannot sample a cyclic network");
  std::map<NodeId, std::size_t> pos;
  std::vector<std::vector<double>> tables;
  for (std::size_t k = 0; k < out.order.size(); ++k) {
    const Node& node = net.node(out.order[k]);
    if (node.evidence)
      throw InferenceError("evidence", "sampling does not condition on "
                                       "evidence (node " +
                                           FormatTerm(node.label) + ")");
    pos[node.id] = k;
    tables.push_back(NormalizedTable(node));
  }
  std::mt19937_64 rng(seed);
  out.rows.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> row(out.order.size());
    for (std::size_t k = 0; k < out.order.size(); ++k) {
      const Node& node = net.node(out.order[k]);
      std::size_t col = 0;
      for (NodeId q : node.parents)
        col = col * net.node(q).domain.size() + row[pos[q]];
      std::size_t cols = node.columns();
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      std::size_t pick = node.domain.size() - 1;
      double acc = 0.0;
      for (std::size_t r = 0; r < node.domain.size(); ++r) {
        double p = tables[k][r * cols + col];
        acc += p;
        if (u < acc && p > 0.0) {
          pick = r;
          break;
        }
      }
      while (pick > 0 && tables[k][pick * cols + col] == 0.0) --pick;
      row[k] = pick;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void WriteSamplesCsv(std::ostream& out, const ConstraintNetwork& net,
                     const SampleTable& samples) {
  for (std::size_t k = 0; k < samples.order.size(); ++k)
    out << (k ? "," : "") << Quote(FormatTerm(net.node(samples.order[k]).label));
  out << "\n";
  std::vector<std::vector<std::string>> printed;
  for (NodeId id : samples.order) {
    std::vector<std::string> values;
    for (const Term& v : net.node(id).domain) values.push_back(Quote(FormatTerm(v)));
    printed.push_back(std::move(values));
  }
  for (const auto& row : samples.rows) {
    for (std::size_t k = 0; k < row.size(); ++k)
      out << (k ? "," : "") << printed[k][row[k]];
    out << "\n";
  }
}

nlohmann::json MarginalToJson(const ConstraintNetwork& net, const Marginal& m) {
  nlohmann::json domain = nlohmann::json::array();
  for (const Term& v : m.domain) domain.push_back(FormatTerm(v));
  return {{"node", FormatTerm(net.node(m.node).label)},
          {"domain", domain},
          {"probs", m.probs}};
}

std::string FormatMarginal(const ConstraintNetwork& net, const Marginal& m) {
  std::string out = FormatTerm(net.node(m.node).label) + ":";
  for (std::size_t i = 0; i < m.domain.size(); ++i)
    out += " " + FormatTerm(m.domain[i]) + "=" + FormatProb(m.probs[i]);
  return out;
}

std::vector<Query> DefaultRoots(const Program& p) {
  std::vector<Query> roots;
  for (const PredicateKey& key : RandomPredicates(p)) {
    std::vector<Term> args;
    for (std::size_t i = 0; i < key.second; ++i)
      args.push_back(Term::Var(static_cast<VarId>(i)));
    Goal g;
    g.kind = Goal::Kind::kLiteral;
    g.term = key.second == 0 ? Term::Atom(key.first)
                            : Term::Compound(key.first, std::move(args));
    Query q;
    q.goals.push_back(std::move(g));
    q.num_vars = key.second;
    roots.push_back(std::move(q));
  }
  return roots;
}

std::map<NodeId, NodeId> ImportByLabel(ConstraintNetwork& ground,
                                       const ConstraintNetwork& answer) {
  std::map<NodeId, NodeId> mapped;
  std::function<NodeId(NodeId)> import = [&](NodeId id) -> NodeId {
    if (auto it = mapped.find(id); it != mapped.end()) return it->second;
    const Node& n = answer.node(id);
    if (!n.label.ground())
      throw InferenceError("non-ground", "random variable " +
                                             FormatTerm(n.label) +
                                             " is not ground");
    std::vector<NodeId> parents;
    for (NodeId p : n.parents) parents.push_back(import(p));
    if (auto existing = ground.FindLabel(n.label)) {
      mapped[id] = *existing;
      Node& g = ground.mutable_node(*existing);
      if (g.stub && !n.stub) {
        g.domain = n.domain;
        g.table = n.table;
        g.parents = parents;
        g.origin = n.origin;
        g.stub = false;
      } else if (!n.stub && g.domain != n.domain) {
        throw InferenceError("conflict", "two derivations give " +
                                             FormatTerm(n.label) +
                                             " different domains");
      }
      if (n.evidence && !n.stub) {
        std::size_t idx = *n.evidence;
        if (!ground.SetEvidenceIndex(*existing, idx))
          throw InferenceError("inconsistent-evidence",
                               "conflicting evidence on " +
                                   FormatTerm(n.label));
      }
      return *existing;
    }
    Node copy = n;
    copy.id = *ground.counter();
    copy.parents = std::move(parents);
    ground.InsertNode(copy);
    mapped[id] = copy.id;
    return copy.id;
  };
  for (const auto& [id, n] : answer.nodes()) import(id);
  return mapped;
}

ConstraintNetwork GroundProgram(const Program& p, const Population& pop,
                                const GroundOptions& options) {
  Program full = pop.facts.empty() ? p : p.WithClauses(pop.facts);
  std::vector<Query> roots = pop.roots.empty() ? DefaultRoots(full) : pop.roots;
  ConstraintNetwork ground;
  ground.set_permissive(options.permissive);
  SolveOptions so = options.solve;
  so.permissive = options.permissive;
  for (const Query& root : roots) {
    Solver solver(full, root, so);
    while (auto a = solver.Next()) ImportByLabel(ground, a->network);
  }
  if (!options.permissive)
    if (auto cycle = ground.FindCycle())
      throw InferenceError("acyclic", "the ground network has a cycle");
  return ground;
}

AgreementReport AgreementCheck(const Program& p, const Query& q,
                               const Population& pop,
                               const SolveOptions& options) {
  Program full = pop.facts.empty() ? p : p.WithClauses(pop.facts);
  std::vector<Answer> answers = Solve(full, q, 1, options);
  if (answers.empty())
    throw InferenceError("query-failed", "the query has no answer");
  const Answer& a = answers.front();
  GroundOptions go;
  go.solve = options;
  ConstraintNetwork ground = GroundProgram(p, pop, go);
  for (const auto& [id, n] : a.network.nodes()) {
    if (!n.evidence) continue;
    auto g = ground.FindLabel(n.label);
    if (!g)
      throw InferenceError("missing-node", "evidence node " +
                                               FormatTerm(n.label) +
                                               " is not in the ground network");
    if (!ground.SetEvidence(*g, n.domain[*n.evidence]))
      throw InferenceError("inconsistent-evidence",
                           "conflicting evidence on " + FormatTerm(n.label));
  }
  AgreementReport report;
  for (const auto& [name, id] : a.query_nodes) {
    AgreementEntry e;
    e.variable = name;
    e.label = FormatTerm(a.network.node(id).label);
    auto g = ground.FindLabel(a.network.node(id).label);
    if (!g)
      throw InferenceError("missing-node", "query node " + e.label +
                                               " is not in the ground network");
    e.proof = ComputeMarginal(a.network, id);
    e.ground = ComputeMarginal(ground, *g);
    const Node& gn = ground.node(*g);
    for (std::size_t i = 0; i < e.proof.domain.size(); ++i) {
      auto it = std::find(gn.domain.begin(), gn.domain.end(),
                          e.proof.domain[i]);
      double other = it == gn.domain.end()
                         ? 0.0
                         : e.ground.probs[static_cast<std::size_t>(
                               it - gn.domain.begin())];
      e.difference = std::max(e.difference, std::fabs(e.proof.probs[i] - other));
    }
    if (gn.domain.size() != e.proof.domain.size())
      e.difference = std::max(e.difference, 1.0);
    report.max_difference = std::max(report.max_difference, e.difference);
    report.entries.push_back(std::move(e));
  }
  return report;
}

nlohmann::json AgreementToJson(const AgreementReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const AgreementEntry& e : r.entries) {
    nlohmann::json d = nlohmann::json::array();
    for (const Term& v : e.proof.domain) d.push_back(FormatTerm(v));
    entries.push_back({{"variable", e.variable},
                       {"node", e.label},
                       {"domain", d},
                       {"proof", e.proof.probs},
                       {"ground", e.ground.probs},
                       {"difference", e.difference}});
  }
  return {{"entries", entries}, {"max_difference", r.max_difference}};
}

}  // namespace clpbn
