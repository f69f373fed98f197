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

// The Bayes-net constraint store.
//
// Nodes are labelled by Skolem terms and carry a domain, a flat CPT and
// optional evidence. CPT layout: for output row r and parent assignment
// (i1..ik) with parent domain sizes n1..nk, the entry sits at
// r * (n1*...*nk) + col with col = ((i1*n2 + i2)*n3 + ...)*nk + ik, so the
// first parent varies slowest.

#ifndef CLPBN_NETWORK_H_
#define CLPBN_NETWORK_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "clpbn/program.h"
#include "clpbn/term.h"
#include "json.hpp"

namespace clpbn {

using NodeId = std::int64_t;

struct Node {
  NodeId id = 0;
  Term label;
  std::vector<Term> domain;
  std::vector<double> table;
  std::vector<NodeId> parents;
  std::optional<std::size_t> evidence;
  // The program constraint this node instantiates, when known.
  std::optional<SkolemOwner> origin;
  // Placeholder created by permissive grounding; has no CPT of its own.
  bool stub = false;

  std::size_t columns() const {
    return domain.empty() ? 0 : table.size() / domain.size();
  }
};

// Aborts a derivation: malformed CPT at posting time, unconstrained parent
// or a cycle in the network.
class NetworkError : public std::runtime_error {
 public:
  NetworkError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ConstraintNetwork {
 public:
  // Networks that exchange nodes must share one id counter.
  ConstraintNetwork();
  explicit ConstraintNetwork(std::shared_ptr<NodeId> counter);

  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  bool Contains(NodeId id) const { return nodes_.count(id) != 0; }
  const Node& node(NodeId id) const;
  Node& mutable_node(NodeId id);
  const std::shared_ptr<NodeId>& counter() const { return counter_; }

  // Permissive networks accept cycles and tables over placeholder parents.
  bool permissive() const { return permissive_; }
  void set_permissive(bool on) { permissive_ = on; }

  // Variable to node binding. `v` should be a walked, unbound variable.
  std::optional<NodeId> NodeOf(VarId v) const;
  void BindVar(VarId v, NodeId n) { binding_[v] = n; }
  const std::unordered_map<VarId, NodeId>& binding() const {
    return binding_;
  }

  // Node carrying a ground label, if any.
  std::optional<NodeId> FindLabel(const Term& label) const;

  // Adds a node. Parents must exist; the table size must match. Throws
  // NetworkError on a malformed table or a cycle.
  NodeId AddNode(Term label, std::vector<Term> domain,
                 std::vector<double> table, std::vector<NodeId> parents,
                 std::optional<SkolemOwner> origin = std::nullopt);
  // Adds a node under a caller-chosen id; used when copying nodes between
  // networks that share a counter.
  void InsertNode(Node n);

  // Relabels a node, keeping the label index current.
  void SetLabel(NodeId id, Term label);

  // Merges node `b` into node `a`: labels unify under `s` (bindings are
  // kept on success), domains intersect, parents merge pairwise, tables
  // restricted to surviving values must agree within 1e-9 and evidence must
  // agree. References to `b` are redirected to `a`. Returns false on
  // failure; the network is then unspecified and should be discarded.
  // Throws NetworkError when the merge closes a cycle.
  bool Merge(NodeId a, NodeId b, Substitution& s, UnifyHooks* hooks);

  // Sets evidence to the domain index of `value`. False when the value is
  // outside the domain or conflicts with existing evidence.
  bool SetEvidence(NodeId id, const Term& value);
  bool SetEvidenceIndex(NodeId id, std::size_t index);
  void ClearEvidence(NodeId id);

  // Keeps the domain values flagged in `keep`: deletes the node's rows and
  // renormalises its columns, and drops the matching slices from children.
  // False when a domain or a surviving column becomes empty or all-zero.
  bool RestrictDomain(NodeId id, const std::vector<bool>& keep);

  // Replaces `from` by `to` in every parent list and binding; erases `from`.
  void Redirect(NodeId from, NodeId to);
  void Erase(NodeId id);

  // A directed cycle, as node ids starting from the smallest, if any.
  std::optional<std::vector<NodeId>> FindCycle() const;

  // Node ids in topological order, parents first, ties by smallest id.
  std::vector<NodeId> TopologicalOrder() const;

  // The node and all its ancestors.
  std::vector<NodeId> Ancestors(NodeId id) const;

  // Children of each node.
  std::map<NodeId, std::vector<NodeId>> Children() const;

 private:
  void IndexLabel(const Node& n);
  void UnindexLabel(const Node& n);

  std::shared_ptr<NodeId> counter_;
  bool permissive_ = false;
  std::map<NodeId, Node> nodes_;
  std::unordered_map<VarId, NodeId> binding_;
  std::unordered_map<Term, NodeId, TermHash> labels_;
};

// post_constraint: instantiates `c` under `s`. The CPT must be p(D,T,P)
// with D, T ground and every member of P a variable bound to a node. The
// constraint variable becomes bound to the new node, merged with an
// existing node of the same ground label or the node already bound to it.
// Returns nullopt on failure (for example, a value bound to the variable
// outside the domain). Throws NetworkError on malformed input or a cycle.
std::optional<NodeId> PostConstraint(ConstraintNetwork& net,
                                     const Constraint& c, Substitution& s,
                                     UnifyHooks* hooks,
                                     std::optional<SkolemOwner> origin = {});

// Binds the constraint variable to a placeholder node named by the Skolem
// term, without parents or table. Used by permissive grounding.
std::optional<NodeId> PostStub(ConstraintNetwork& net, const Constraint& c,
                               Substitution& s);

// unify_constrained: `v1`, `v2` are unbound variables, at least one bound to
// a node. Merges their nodes or shares the one node. Does not make a
// logical binding between the variables.
bool UnifyConstrained(ConstraintNetwork& net, VarId v1, VarId v2,
                      Substitution& s, UnifyHooks* hooks);

// set_evidence on the node bound to variable `v`.
bool SetVarEvidence(ConstraintNetwork& net, VarId v, const Term& value);

// apply_net_substitution: applies `s` to every label. A label that becomes
// a non-Skolem term keeps only the domain values it unifies with.
bool ApplyNetSubstitution(ConstraintNetwork& net, const Substitution& s,
                          const SkolemRegistry& registry);

// Applies `s` to all labels and merges nodes whose ground labels coincide.
bool FreezeLabels(ConstraintNetwork& net, const Substitution& s);

// check_acyclic.
std::optional<std::vector<NodeId>> CheckAcyclic(const ConstraintNetwork& net);

// Renormalises every column of a flat table with `d` rows. False when a
// column sums to zero.
bool NormalizeColumns(std::vector<double>& table, std::size_t d);

// Network export: {"nodes": [{id, label, domain, parents, table,
// evidence}]}, nodes in id order.
nlohmann::json NetworkToJson(const ConstraintNetwork& net);

}  // namespace clpbn

#endif  // CLPBN_NETWORK_H_
