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

// SLD resolution with a Bayes-net constraint store.
//
// Goals are selected left to right and clauses tried in textual order, with
// chronological backtracking. Unifying a constrained variable routes through
// the network: two constrained variables merge their nodes, an unconstrained
// variable joins the node, and a ground value becomes evidence.

#ifndef CLPBN_ENGINE_H_
#define CLPBN_ENGINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clpbn/network.h"
#include "clpbn/program.h"
#include "clpbn/syntax.h"
#include "clpbn/term.h"

namespace clpbn {

struct SolveOptions {
  // Maximum nesting of clause frames.
  std::size_t depth_limit = 10'000;
  // Maximum number of resolution steps per top-level query.
  std::uint64_t step_limit = 50'000'000;
  // Rewrite ground query arguments at constrained positions into evidence.
  bool preprocess_evidence = true;
  // Permissive grounding: a random-variable predicate called from inside
  // another one is resolved only far enough to name its node, and that node
  // is a placeholder. Cycles are tolerated.
  bool permissive = false;
};

// The depth or step bound was hit. Distinct from failure.
class LimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A runtime error that aborts the derivation: type and instantiation errors
// in builtins, malformed CPTs and cycles.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Answer {
  // Named query variables and their values, in order of first occurrence.
  std::vector<std::pair<std::string, Term>> bindings;
  // Named query variables bound to a node of `network`.
  std::vector<std::pair<std::string, NodeId>> query_nodes;
  // The network with labels instantiated and equal ground labels merged.
  ConstraintNetwork network;
  Substitution substitution;
};

// Rewrites each ground, non-Skolem argument of a query literal that sits at
// a constrained position into a fresh variable followed by `Var = Value`.
Query PreprocessEvidence(const Program& p, const Query& q);

// Lazily enumerates the answers of a query.
class Solver {
 public:
  Solver(const Program& p, const Query& q, SolveOptions options = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  // The next answer, or nullopt when there are no more. Throws
  // LimitExceeded or EngineError.
  std::optional<Answer> Next();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Up to `limit` answers (0 means all).
std::vector<Answer> Solve(const Program& p, const Query& q,
                          std::size_t limit = 0, SolveOptions options = {});

}  // namespace clpbn

#endif  // CLPBN_ENGINE_H_
