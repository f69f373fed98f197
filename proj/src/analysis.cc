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

#include "clpbn/analysis.h"

#include <set>

namespace clpbn {

PositionMap ConstrainedPositions(const Program& p) {
  PositionMap m;
  for (const PredicateKey& key : p.predicates())
    m[key] = std::vector<bool>(key.second, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& c : p.clauses()) {
      if (!c.head.is_compound()) continue;
      std::set<VarId> constrained;
      for (const Constraint& k : c.constraints)
        if (k.var.is_var()) constrained.insert(k.var.var_id());
      for (const Goal& g : c.body) {
        if (g.kind != Goal::Kind::kLiteral || !g.term.is_compound()) continue;
        auto it = m.find(KeyOf(g.term));
        if (it == m.end()) continue;
        for (std::size_t i = 0; i < g.term.arity(); ++i)
          if (it->second[i] && g.term.arg(i).is_var())
            constrained.insert(g.term.arg(i).var_id());
      }
      std::vector<bool>& flags = m[KeyOf(c.head)];
      for (std::size_t i = 0; i < c.head.arity(); ++i) {
        const Term& a = c.head.arg(i);
        if (!flags[i] && a.is_var() && constrained.count(a.var_id()) != 0) {
          flags[i] = true;
          changed = true;
        }
      }
    }
  }
  return m;
}

bool IsConstrainedPosition(const PositionMap& m, const PredicateKey& key,
                           std::size_t i) {
  auto it = m.find(key);
  return it != m.end() && i < it->second.size() && it->second[i];
}

std::vector<PredicateKey> RandomPredicates(const Program& p) {
  PositionMap m = ConstrainedPositions(p);
  std::vector<PredicateKey> out;
  for (const PredicateKey& key : p.predicates()) {
    bool random = false;
    for (bool b : m[key]) random = random || b;
    for (std::size_t ci : p.ClausesOf(key))
      random = random || !p.clauses()[ci].constraints.empty();
    if (random) out.push_back(key);
  }
  return out;
}

}  // namespace clpbn
