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

#include "clpbn/network.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>

#include "clpbn/syntax.h"

namespace clpbn {

namespace {

constexpr double kTableTolerance = 1e-9;

std::size_t Product(const std::vector<std::size_t>& v) {
  std::size_t p = 1;
  for (std::size_t x : v) p *= x;
  return p;
}

// Rewrites the columns of a table whose parent `j` changes from `sizes[j]`
// values to `map.size()` values; new value i reads old value map[i].
std::vector<double> RemapParent(const std::vector<double>& table,
                                std::size_t rows,
                                const std::vector<std::size_t>& sizes,
                                std::size_t j,
                                const std::vector<std::size_t>& map) {
  std::vector<std::size_t> new_sizes = sizes;
  new_sizes[j] = map.size();
  std::size_t old_cols = Product(sizes);
  std::size_t new_cols = Product(new_sizes);
  std::vector<double> out(rows * new_cols);
  std::vector<std::size_t> digits(sizes.size());
  for (std::size_t col = 0; col < new_cols; ++col) {
    std::size_t rest = col;
    for (std::size_t k = sizes.size(); k-- > 0;) {
      digits[k] = rest % new_sizes[k];
      rest /= new_sizes[k];
    }
    digits[j] = map[digits[j]];
    std::size_t old_col = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k)
      old_col = old_col * sizes[k] + digits[k];
    for (std::size_t r = 0; r < rows; ++r)
      out[r * new_cols + col] = table[r * old_cols + old_col];
  }
  return out;
}

std::string Label(const Term& t) { return FormatTerm(t); }

}  // namespace

bool NormalizeColumns(std::vector<double>& table, std::size_t d) {
  if (d == 0 || table.size() % d != 0) return false;
  std::size_t ncols = table.size() / d;
  for (std::size_t col = 0; col < ncols; ++col) {
    double sum = 0.0;
    for (std::size_t r = 0; r < d; ++r) sum += table[r * ncols + col];
    if (!(sum > 0.0)) return false;
    for (std::size_t r = 0; r < d; ++r) table[r * ncols + col] /= sum;
  }
  return true;
}

ConstraintNetwork::ConstraintNetwork()
    : counter_(std::make_shared<NodeId>(1)) {}

ConstraintNetwork::ConstraintNetwork(std::shared_ptr<NodeId> counter)
    : counter_(counter ? std::move(counter) : std::make_shared<NodeId>(1)) {}

const Node& ConstraintNetwork::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw std::out_of_range("no node " + std::to_string(id));
  return it->second;
}

Node& ConstraintNetwork::mutable_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw std::out_of_range("no node " + std::to_string(id));
  return it->second;
}

std::optional<NodeId> ConstraintNetwork::NodeOf(VarId v) const {
  auto it = binding_.find(v);
  if (it == binding_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> ConstraintNetwork::FindLabel(const Term& label) const {
  if (!label.ground()) return std::nullopt;
  auto it = labels_.find(label);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

void ConstraintNetwork::IndexLabel(const Node& n) {
  if (n.label.ground()) labels_.try_emplace(n.label, n.id);
}

void ConstraintNetwork::UnindexLabel(const Node& n) {
  if (!n.label.ground()) return;
  auto it = labels_.find(n.label);
  if (it == labels_.end() || it->second != n.id) return;
  labels_.erase(it);
  // Another node may carry the same label until labels are frozen.
  for (const auto& [id, other] : nodes_)
    if (id != n.id && other.label.ground() && other.label == n.label) {
      labels_[n.label] = id;
      break;
    }
}

NodeId ConstraintNetwork::AddNode(Term label, std::vector<Term> domain,
                                  std::vector<double> table,
                                  std::vector<NodeId> parents,
                                  std::optional<SkolemOwner> origin) {
  std::string name = Label(label);
  if (domain.empty())
    throw NetworkError("WF3a", "domain of " + name + " is empty");
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i].ground())
      throw NetworkError("WF3a", "domain of " + name + " is not ground");
    for (std::size_t j = 0; j < i; ++j)
      if (domain[i] == domain[j])
        throw NetworkError("WF3a", "domain of " + name + " repeats " +
                                       Label(domain[i]));
  }
  std::size_t cols = 1;
  bool stub_parent = false;
  std::set<NodeId> seen;
  for (NodeId p : parents) {
    if (!Contains(p))
      throw NetworkError("WF3b", "parent of " + name + " is not in the network");
    if (!seen.insert(p).second)
      throw NetworkError("WF3b", "parent of " + name + " is listed twice");
    cols *= node(p).domain.size();
    stub_parent = stub_parent || node(p).stub;
  }
  if (!(permissive_ && stub_parent) && table.size() != domain.size() * cols)
    throw NetworkError("WF3c", "table of " + name + " has " +
                                   std::to_string(table.size()) +
                                   " entries, expected " +
                                   std::to_string(domain.size() * cols));
  for (double x : table)
    if (!(x >= 0.0 && x <= 1.0))
      throw NetworkError("WF3c", "table of " + name +
                                     " has an entry outside [0,1]");
  Node n;
  n.id = (*counter_)++;
  n.label = std::move(label);
  n.domain = std::move(domain);
  n.table = std::move(table);
  n.parents = std::move(parents);
  n.origin = origin;
  IndexLabel(n);
  NodeId id = n.id;
  nodes_.emplace(id, std::move(n));
  return id;
}

void ConstraintNetwork::InsertNode(Node n) {
  if (n.id >= *counter_) *counter_ = n.id + 1;
  IndexLabel(n);
  NodeId id = n.id;
  nodes_[id] = std::move(n);
}

void ConstraintNetwork::SetLabel(NodeId id, Term label) {
  Node& n = mutable_node(id);
  if (n.label == label) return;
  UnindexLabel(n);
  n.label = std::move(label);
  IndexLabel(n);
}

bool ConstraintNetwork::SetEvidenceIndex(NodeId id, std::size_t index) {
  Node& n = mutable_node(id);
  if (index >= n.domain.size()) return false;
  if (n.evidence && *n.evidence != index) return false;
  n.evidence = index;
  return true;
}

bool ConstraintNetwork::SetEvidence(NodeId id, const Term& value) {
  const Node& n = node(id);
  for (std::size_t i = 0; i < n.domain.size(); ++i)
    if (n.domain[i] == value) return SetEvidenceIndex(id, i);
  return false;
}

void ConstraintNetwork::ClearEvidence(NodeId id) {
  mutable_node(id).evidence.reset();
}

bool ConstraintNetwork::RestrictDomain(NodeId id, const std::vector<bool>& keep) {
  Node& n = mutable_node(id);
  std::vector<std::size_t> map;
  for (std::size_t i = 0; i < n.domain.size(); ++i)
    if (keep[i]) map.push_back(i);
  if (map.empty()) return false;
  if (map.size() == n.domain.size()) return true;
  if (n.evidence) {
    auto it = std::find(map.begin(), map.end(), *n.evidence);
    if (it == map.end()) return false;
    n.evidence = static_cast<std::size_t>(it - map.begin());
  }
  std::size_t old_d = n.domain.size();
  if (!n.stub) {
    std::size_t cols = n.table.size() / old_d;
    std::vector<double> table;
    table.reserve(map.size() * cols);
    for (std::size_t r : map)
      for (std::size_t col = 0; col < cols; ++col)
        table.push_back(n.table[r * cols + col]);
    if (!NormalizeColumns(table, map.size())) return false;
    n.table = std::move(table);
  }
  std::vector<Term> domain;
  for (std::size_t r : map) domain.push_back(n.domain[r]);
  n.domain = std::move(domain);
  for (auto& [cid, child] : nodes_) {
    auto it = std::find(child.parents.begin(), child.parents.end(), id);
    if (it == child.parents.end() || child.stub) continue;
    std::size_t j = static_cast<std::size_t>(it - child.parents.begin());
    std::vector<std::size_t> sizes;
    for (NodeId p : child.parents)
      sizes.push_back(p == id ? old_d : node(p).domain.size());
    child.table =
        RemapParent(child.table, child.domain.size(), sizes, j, map);
  }
  return true;
}

void ConstraintNetwork::Redirect(NodeId from, NodeId to) {
  for (auto& [id, n] : nodes_)
    for (NodeId& p : n.parents)
      if (p == from) p = to;
  for (auto& [v, n] : binding_)
    if (n == from) n = to;
  Erase(from);
}

void ConstraintNetwork::Erase(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return;
  Node n = std::move(it->second);
  nodes_.erase(it);
  UnindexLabel(n);
}

namespace {

// Reorders node `id`'s domain to `order` (old indices), together with the
// matching column slices of its children.
void PermuteDomain(ConstraintNetwork& net, NodeId id,
                   const std::vector<std::size_t>& order) {
  Node& n = net.mutable_node(id);
  std::size_t d = n.domain.size();
  bool identity = true;
  for (std::size_t i = 0; i < order.size(); ++i) identity &= order[i] == i;
  if (identity) return;
  std::vector<Term> domain;
  for (std::size_t i : order) domain.push_back(n.domain[i]);
  if (!n.stub) {
    std::size_t cols = n.table.size() / d;
    std::vector<double> table;
    for (std::size_t i : order)
      for (std::size_t col = 0; col < cols; ++col)
        table.push_back(n.table[i * cols + col]);
    n.table = std::move(table);
  }
  if (n.evidence) {
    std::size_t e = *n.evidence;
    n.evidence = static_cast<std::size_t>(
        std::find(order.begin(), order.end(), e) - order.begin());
  }
  n.domain = std::move(domain);
  std::vector<NodeId> children;
  for (const auto& [cid, child] : net.nodes())
    if (std::find(child.parents.begin(), child.parents.end(), id) !=
        child.parents.end())
      children.push_back(cid);
  for (NodeId cid : children) {
    Node& child = net.mutable_node(cid);
    if (child.stub) continue;
    auto it = std::find(child.parents.begin(), child.parents.end(), id);
    std::size_t j = static_cast<std::size_t>(it - child.parents.begin());
    std::vector<std::size_t> sizes;
    for (NodeId p : child.parents) sizes.push_back(net.node(p).domain.size());
    child.table = RemapParent(child.table, child.domain.size(), sizes, j, order);
  }
}

}  // namespace

bool ConstraintNetwork::Merge(NodeId a, NodeId b, Substitution& s,
                              UnifyHooks* hooks) {
  if (a == b) return true;
  if (!Contains(a) || !Contains(b)) return false;
  {
    Term la = node(a).label;
    Term lb = node(b).label;
    if (!UnifyInPlace(la, lb, s)) return false;
  }
  Term label = s.Apply(node(a).label);

  if (node(a).stub != node(b).stub) {
    // A placeholder takes the content of the real node.
    NodeId real = node(a).stub ? b : a;
    NodeId stub = real == a ? b : a;
    if (stub == a) {
      Node& na = mutable_node(a);
      const Node& nb = node(b);
      na.domain = nb.domain;
      na.table = nb.table;
      na.parents = nb.parents;
      na.origin = nb.origin;
      na.evidence = nb.evidence;
      na.stub = false;
    }
  } else if (!node(a).stub) {
    // Domains intersect; b is then put into a's order.
    {
      const Node& na = node(a);
      const Node& nb = node(b);
      std::vector<bool> keep_a(na.domain.size()), keep_b(nb.domain.size());
      for (std::size_t i = 0; i < na.domain.size(); ++i)
        keep_a[i] = std::find(nb.domain.begin(), nb.domain.end(),
                              na.domain[i]) != nb.domain.end();
      for (std::size_t i = 0; i < nb.domain.size(); ++i)
        keep_b[i] = std::find(na.domain.begin(), na.domain.end(),
                              nb.domain[i]) != na.domain.end();
      if (!RestrictDomain(a, keep_a) || !RestrictDomain(b, keep_b))
        return false;
    }
    {
      const Node& na = node(a);
      const Node& nb = node(b);
      std::vector<std::size_t> order;
      for (const Term& v : na.domain)
        order.push_back(static_cast<std::size_t>(
            std::find(nb.domain.begin(), nb.domain.end(), v) -
            nb.domain.begin()));
      PermuteDomain(*this, b, order);
    }
    if (node(a).parents.size() != node(b).parents.size()) return false;
    for (std::size_t i = 0; i < node(a).parents.size(); ++i) {
      if (!Contains(a) || !Contains(b)) return false;
      NodeId pa = node(a).parents[i];
      NodeId pb = node(b).parents[i];
      if (pa == pb) continue;
      NodeId keep = std::min(pa, pb);
      NodeId drop = std::max(pa, pb);
      if (!Merge(keep, drop, s, hooks)) return false;
    }
    if (!Contains(a) || !Contains(b)) return false;
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.parents != nb.parents) return false;
    if (na.table.size() != nb.table.size()) return false;
    for (std::size_t i = 0; i < na.table.size(); ++i)
      if (std::fabs(na.table[i] - nb.table[i]) > kTableTolerance) return false;
    if (nb.evidence && !SetEvidenceIndex(a, *nb.evidence)) return false;
  }
  Redirect(b, a);
  SetLabel(a, label);
  if (permissive_) return true;
  if (auto cycle = FindCycle()) {
    std::string msg = "merging nodes closes a cycle:";
    for (NodeId id : *cycle) msg += " " + Label(node(id).label);
    throw NetworkError("acyclic", msg);
  }
  return true;
}

std::optional<std::vector<NodeId>> ConstraintNetwork::FindCycle() const {
  auto children = Children();
  std::map<NodeId, int> color;  // 0 white, 1 grey, 2 black
  std::vector<NodeId> stack;
  std::optional<std::vector<NodeId>> found;
  std::function<bool(NodeId)> visit = [&](NodeId u) {
    color[u] = 1;
    stack.push_back(u);
    for (NodeId v : children[u]) {
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        std::vector<NodeId> cyc(it, stack.end());
        auto mn = std::min_element(cyc.begin(), cyc.end());
        std::rotate(cyc.begin(), mn, cyc.end());
        found = std::move(cyc);
        return true;
      }
      if (color[v] == 0 && visit(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (const auto& [id, n] : nodes_)
    if (color[id] == 0 && visit(id)) return found;
  return std::nullopt;
}

std::map<NodeId, std::vector<NodeId>> ConstraintNetwork::Children() const {
  std::map<NodeId, std::vector<NodeId>> out;
  for (const auto& [id, n] : nodes_) {
    out[id];
    for (NodeId p : n.parents) out[p].push_back(id);
  }
  return out;
}

std::vector<NodeId> ConstraintNetwork::TopologicalOrder() const {
  std::map<NodeId, std::size_t> indegree;
  auto children = Children();
  for (const auto& [id, n] : nodes_) indegree[id] = n.parents.size();
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<NodeId>> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push(id);
  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId v : children[u])
      if (--indegree[v] == 0) ready.push(v);
  }
  return order;
}

std::vector<NodeId> ConstraintNetwork::Ancestors(NodeId id) const {
  std::set<NodeId> seen;
  std::vector<NodeId> todo{id};
  while (!todo.empty()) {
    NodeId u = todo.back();
    todo.pop_back();
    if (!seen.insert(u).second) continue;
    for (NodeId p : node(u).parents) todo.push_back(p);
  }
  return {seen.begin(), seen.end()};
}

std::optional<NodeId> PostConstraint(ConstraintNetwork& net,
                                     const Constraint& c, Substitution& s,
                                     UnifyHooks* hooks,
                                     std::optional<SkolemOwner> origin) {
  Term label = s.Apply(c.skolem);
  std::string name = Label(label);
  Term cpt = s.Apply(c.cpt);
  auto parts = SplitCpt(cpt);
  if (!parts)
    throw NetworkError("WF3c", "CPT of " + name + " is not p(Domain, Table, "
                                                  "Parents) when posted");
  auto domain = ListItems(parts->domain);
  if (!domain || !parts->domain.ground())
    throw NetworkError("WF3a", "domain of " + name + " is not a ground list");
  auto table_terms = ListItems(parts->table);
  if (!table_terms || !parts->table.ground())
    throw NetworkError("WF3c", "table of " + name + " is not a ground list");
  std::vector<double> table;
  for (const Term& e : *table_terms) {
    if (!e.is_number())
      throw NetworkError("WF3c", "table of " + name + " has a non-number");
    table.push_back(e.number());
  }
  auto parent_terms = ListItems(parts->parents);
  if (!parent_terms)
    throw NetworkError("WF3b", "parents of " + name + " is not a list");
  Term v = s.Walk(c.var);
  std::vector<NodeId> parents;
  for (const Term& pt : *parent_terms) {
    Term w = s.Walk(pt);
    if (!w.is_var())
      throw NetworkError("WF3b", "parent " + Label(w) + " of " + name +
                                     " is not a random variable");
    if (v.is_var() && w.var_id() == v.var_id())
      throw NetworkError("acyclic", name + " is its own parent");
    auto n = net.NodeOf(w.var_id());
    if (!n)
      throw NetworkError("WF3b", "parent " + Label(w) + " of " + name +
                                     " is not bound to a random variable");
    parents.push_back(*n);
  }
  std::optional<NodeId> existing = net.FindLabel(label);
  NodeId id = net.AddNode(label, *domain, std::move(table),
                          std::move(parents), origin);
  if (existing) {
    if (!net.Merge(*existing, id, s, hooks)) return std::nullopt;
    id = *existing;
  }
  if (v.is_var()) {
    if (auto old = net.NodeOf(v.var_id())) {
      NodeId keep = std::min(*old, id);
      NodeId drop = std::max(*old, id);
      if (!net.Merge(keep, drop, s, hooks)) return std::nullopt;
      id = keep;
    } else {
      net.BindVar(v.var_id(), id);
    }
  } else if (v.ground()) {
    if (!net.SetEvidence(id, v)) return std::nullopt;
  } else {
    const Node& n = net.node(id);
    std::vector<bool> keep(n.domain.size());
    for (std::size_t i = 0; i < n.domain.size(); ++i)
      keep[i] = Unify(v, n.domain[i], s).has_value();
    if (!net.RestrictDomain(id, keep)) return std::nullopt;
  }
  return id;
}

std::optional<NodeId> PostStub(ConstraintNetwork& net, const Constraint& c,
                               Substitution& s) {
  Term label = s.Apply(c.skolem);
  std::optional<NodeId> id = net.FindLabel(label);
  if (!id) {
    Node n;
    n.id = *net.counter();
    n.label = label;
    n.stub = true;
    if (auto parts = SplitCpt(s.Apply(c.cpt)))
      if (auto d = ListItems(parts->domain); d && parts->domain.ground())
        n.domain = *d;
    net.InsertNode(std::move(n));
    id = net.FindLabel(label);
    if (!id) id = *net.counter() - 1;
  }
  Term v = s.Walk(c.var);
  if (!v.is_var()) return id;
  if (auto old = net.NodeOf(v.var_id())) {
    if (*old == *id) return id;
    NodeId keep = std::min(*old, *id);
    if (!net.Merge(keep, std::max(*old, *id), s, nullptr)) return std::nullopt;
    return keep;
  }
  net.BindVar(v.var_id(), *id);
  return id;
}

bool UnifyConstrained(ConstraintNetwork& net, VarId v1, VarId v2,
                      Substitution& s, UnifyHooks* hooks) {
  auto n1 = net.NodeOf(v1);
  auto n2 = net.NodeOf(v2);
  if (n1 && n2) {
    if (*n1 == *n2) return true;
    return net.Merge(std::min(*n1, *n2), std::max(*n1, *n2), s, hooks);
  }
  if (n1) {
    net.BindVar(v2, *n1);
    return true;
  }
  if (n2) {
    net.BindVar(v1, *n2);
    return true;
  }
  return false;
}

bool SetVarEvidence(ConstraintNetwork& net, VarId v, const Term& value) {
  auto n = net.NodeOf(v);
  return n && net.SetEvidence(*n, value);
}

bool ApplyNetSubstitution(ConstraintNetwork& net, const Substitution& s,
                          const SkolemRegistry& registry) {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : net.nodes()) ids.push_back(id);
  for (NodeId id : ids) {
    if (!net.Contains(id)) continue;
    Term label = s.Apply(net.node(id).label);
    net.SetLabel(id, label);
    if (label.is_var() || registry.IsSkolemTerm(label)) continue;
    const Node& n = net.node(id);
    std::vector<bool> keep(n.domain.size());
    for (std::size_t i = 0; i < n.domain.size(); ++i)
      keep[i] = Unify(label, n.domain[i], Substitution()).has_value();
    if (!net.RestrictDomain(id, keep)) return false;
  }
  return true;
}

bool FreezeLabels(ConstraintNetwork& net, const Substitution& s) {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : net.nodes()) ids.push_back(id);
  for (NodeId id : ids) net.SetLabel(id, s.Apply(net.node(id).label));
  // A constrained variable inside a label stands for its node's label.
  std::function<Term(const Term&, std::size_t)> expand =
      [&](const Term& t, std::size_t depth) -> Term {
    if (t.ground()) return t;
    if (t.is_var()) {
      auto n = net.NodeOf(t.var_id());
      if (!n || depth > ids.size()) return t;
      return expand(net.node(*n).label, depth + 1);
    }
    if (!t.is_compound()) return t;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(expand(a, depth));
    return Term::Compound(t.name(), std::move(args));
  };
  for (NodeId id : ids) net.SetLabel(id, expand(net.node(id).label, 0));
  std::unordered_map<Term, NodeId, TermHash> first;
  for (NodeId id : ids) {
    if (!net.Contains(id)) continue;
    const Term& label = net.node(id).label;
    if (!label.ground()) continue;
    auto [it, inserted] = first.try_emplace(label, id);
    if (inserted) continue;
    Substitution scratch;
    if (!net.Merge(it->second, id, scratch, nullptr)) return false;
  }
  return true;
}

std::optional<std::vector<NodeId>> CheckAcyclic(const ConstraintNetwork& net) {
  return net.FindCycle();
}

nlohmann::json NetworkToJson(const ConstraintNetwork& net) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, n] : net.nodes()) {
    nlohmann::json j;
    j["id"] = id;
    j["label"] = FormatTerm(n.label);
    nlohmann::json domain = nlohmann::json::array();
    for (const Term& v : n.domain) domain.push_back(FormatTerm(v));
    j["domain"] = domain;
    j["parents"] = n.parents;
    j["table"] = n.table;
    if (n.evidence) {
      j["evidence"] = FormatTerm(n.domain[*n.evidence]);
    } else {
      j["evidence"] = nullptr;
    }
    nodes.push_back(std::move(j));
  }
  nlohmann::json out;
  out["nodes"] = std::move(nodes);
  return out;
}

}  // namespace clpbn
