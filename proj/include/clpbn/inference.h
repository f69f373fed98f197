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

// Exact inference, sampling and grounding over constraint networks.

#ifndef CLPBN_INFERENCE_H_
#define CLPBN_INFERENCE_H_

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clpbn/engine.h"
#include "clpbn/network.h"
#include "clpbn/program.h"
#include "clpbn/syntax.h"
#include "json.hpp"

namespace clpbn {

class InferenceError : public std::runtime_error {
 public:
  InferenceError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// A nonnegative table over `vars`, row-major with the first variable
// varying slowest.
struct Factor {
  std::vector<NodeId> vars;
  std::vector<std::size_t> card;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

Factor Multiply(const Factor& a, const Factor& b);
Factor SumOut(const Factor& f, NodeId var);
// Keeps the slice var = index and drops `var`.
Factor Reduce(const Factor& f, NodeId var, std::size_t index);

// The node's CPT as a factor over (node, parents...), columns renormalised.
Factor NodeFactor(const ConstraintNetwork& net, NodeId id);

struct Marginal {
  NodeId node = 0;
  std::vector<Term> domain;
  std::vector<double> probs;
};

struct MarginalOptions {
  // Break elimination-order ties by largest node id instead of smallest.
  bool reverse_ties = false;
};

// Posterior of `target` given all evidence in `net`, by variable
// elimination with a min-degree order. Throws InferenceError
// "inconsistent-evidence" when the evidence has probability zero.
Marginal ComputeMarginal(const ConstraintNetwork& net, NodeId target,
                         const MarginalOptions& options = {});

// Normalised joint over all non-evidence nodes in id order, by brute force.
// Throws InferenceError "limit" beyond 2^24 states.
Factor EnumerateJoint(const ConstraintNetwork& net);
Marginal MarginalFromJoint(const ConstraintNetwork& net, const Factor& joint,
                           NodeId target);

// Ancestral samples of every node, as domain indices in topological order.
struct SampleTable {
  std::vector<NodeId> order;
  std::vector<std::vector<std::size_t>> rows;
};
SampleTable SampleNetwork(const ConstraintNetwork& net, std::size_t n,
                          std::uint64_t seed);
// Header of printed labels, then one line per sample.
void WriteSamplesCsv(std::ostream& out, const ConstraintNetwork& net,
                     const SampleTable& samples);

nlohmann::json MarginalToJson(const ConstraintNetwork& net, const Marginal& m);
std::string FormatMarginal(const ConstraintNetwork& net, const Marginal& m);

// Facts added to the program and root queries whose derivations name the
// random variables of interest.
using Population = PopulationText;

// Roots calling every random-variable predicate with fresh arguments. Works
// for range-restricted programs.
std::vector<Query> DefaultRoots(const Program& p);

struct GroundOptions {
  SolveOptions solve;
  // Tolerate cycles and resolve nested random variables to placeholders.
  bool permissive = false;
};

// The network over every ground Skolem term reached from the roots (all
// answers of each), merged by label. Evidence reached by the roots is kept.
ConstraintNetwork GroundProgram(const Program& p, const Population& pop,
                                const GroundOptions& options = {});

// Copies the answer network into `ground` by label, returning the id each
// answer node maps to. Placeholder nodes are replaced by real ones.
std::map<NodeId, NodeId> ImportByLabel(ConstraintNetwork& ground,
                                       const ConstraintNetwork& answer);

struct AgreementEntry {
  std::string variable;
  std::string label;
  Marginal proof;
  Marginal ground;
  double difference = 0.0;
};

struct AgreementReport {
  std::vector<AgreementEntry> entries;
  double max_difference = 0.0;
};

// Marginals of every constrained query variable on the proof network versus
// the full ground network carrying the same evidence.
AgreementReport AgreementCheck(const Program& p, const Query& q,
                               const Population& pop,
                               const SolveOptions& options = {});

nlohmann::json AgreementToJson(const AgreementReport& r);

}  // namespace clpbn

#endif  // CLPBN_INFERENCE_H_
