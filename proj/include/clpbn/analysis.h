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

// Static facts about a program used by the validator and the engine.

#ifndef CLPBN_ANALYSIS_H_
#define CLPBN_ANALYSIS_H_

#include <map>
#include <vector>

#include "clpbn/program.h"

namespace clpbn {

// For each user predicate, which argument positions may carry a constrained
// (random) variable. A head argument is constrained when it is a variable
// that is the V of a constraint of the clause, or that occurs at a
// constrained position of a body literal. Computed to a fixpoint; a position
// is constrained if it is so in any clause.
using PositionMap = std::map<PredicateKey, std::vector<bool>>;
PositionMap ConstrainedPositions(const Program& p);

// True if argument `i` of predicate `key` is constrained.
bool IsConstrainedPosition(const PositionMap& m, const PredicateKey& key,
                           std::size_t i);

// Predicates that own at least one constraint directly, or through a
// constrained position. These are the random-variable predicates.
std::vector<PredicateKey> RandomPredicates(const Program& p);

}  // namespace clpbn

#endif  // CLPBN_ANALYSIS_H_
