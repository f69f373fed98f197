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


// Independent reference implementations used as test oracles: exhaustive
// joint enumeration, a random network generator and a plain SLD
// interpreter with cut.

#ifndef CLPBN_TESTS_ORACLES_H_
#define CLPBN_TESTS_ORACLES_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clpbn/engine.h"
#include "clpbn/network.h"
#include "clpbn/program.h"
#include "clpbn/syntax.h"

namespace clpbn::testing {

// Posterior of `target` by summing the full product of node tables over
// every assignment. Columns are renormalised first. Empty when the evidence
// has probability zero.
std::optional<std::vector<double>> BruteForceMarginal(
    const ConstraintNetwork& net, NodeId target);

struct RandomNetOptions {
  std::size_t max_nodes = 12;
  std::size_t max_domain = 4;
  std::size_t max_parents = 3;
  std::size_t max_evidence = 3;
  // Probability that a table entry is forced to zero.
  double zero_entry = 0.05;
};
ConstraintNetwork RandomNetwork(std::mt19937_64& rng,
                                const RandomNetOptions& options = {});

// Answers as printed bindings of the named query variables, in query order,
// with unbound variables renamed _0, _1, ... by first occurrence.
using AnswerRow = std::vector<std::string>;

std::vector<AnswerRow> ReferenceSolve(const Program& p, const Query& q,
                                      std::size_t limit = 0);
std::vector<AnswerRow> EngineSolve(const Program& p, const Query& q,
                                   std::size_t limit = 0);

}  // namespace clpbn::testing

#endif  // CLPBN_TESTS_ORACLES_H_
