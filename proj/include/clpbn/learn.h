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

// Parameter fitting, BIC scoring, cycle removal and structure comparison
// from complete samples.
//
// Ground nodes are pooled by the constraint that produced them and the
// shape of their table, so every instance of one Skolem functor shares its
// parameters.

#ifndef CLPBN_LEARN_H_
#define CLPBN_LEARN_H_

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clpbn/inference.h"
#include "clpbn/program.h"
#include "json.hpp"

namespace clpbn {

class LearnError : public std::runtime_error {
 public:
  LearnError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Printed node labels and printed values.
struct SampleSet {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

SampleSet ReadSamplesCsv(std::istream& in);
SampleSet ToSampleSet(const ConstraintNetwork& net, const SampleTable& samples);

struct TableKey {
  SkolemOwner owner;
  std::vector<Term> domain;
  std::vector<std::size_t> parent_sizes;
};

struct FittedTable {
  TableKey key;
  std::vector<std::string> labels;  // pooled ground nodes
  std::vector<double> counts;
  std::vector<double> table;
};

struct FitOptions {
  double alpha = 1.0;
  GroundOptions ground;
};

struct FitResult {
  // Constraints with a literal table get the fitted table.
  Program program;
  std::vector<FittedTable> tables;
};

FitResult FitCpts(const Program& p, const Population& pop,
                  const SampleSet& samples, const FitOptions& options = {});

struct BicScore {
  double log_likelihood = 0.0;
  std::size_t parameters = 0;
  std::size_t rows = 0;
  double score = 0.0;
};

// Log-likelihood under unsmoothed maximum-likelihood tables minus
// (parameters / 2) ln N.
BicScore ScoreBic(const Program& p, const Population& pop,
                  const SampleSet& samples, const GroundOptions& options = {});

// Drops parent `parent` from a constraint with a literal table, averaging
// the table over that parent, and drops the body literal that only served
// to fetch it. `parent_sizes` are the current parents' domain sizes.
Program RemoveParent(const Program& p, SkolemOwner owner, std::size_t parent,
                     const std::vector<std::size_t>& parent_sizes);

struct RemovalStep {
  SkolemOwner owner;
  std::size_t parent = 0;
  std::string parent_name;
  double score = 0.0;
};

struct CycleRemovalOptions {
  // Pick uniformly among cycle-breaking deletions instead of greedily.
  bool random = false;
  std::uint64_t seed = 0;
  GroundOptions ground;
};

struct CycleRemoval {
  Program program;
  std::vector<RemovalStep> steps;
  double score = 0.0;
};

// Deletes parents until the permissive grounding is acyclic, each time
// taking the deletion with the best resulting BIC.
CycleRemoval RemoveCycles(const Program& p, const Population& pop,
                          const SampleSet& samples,
                          const CycleRemovalOptions& options = {});

struct StructureReport {
  double link_precision = 1.0;
  double link_recall = 1.0;
  double direction_match = 1.0;
  double markov_precision = 1.0;
  double markov_recall = 1.0;
};

StructureReport CompareStructures(const Program& learned, const Program& truth,
                                  const Population& pop,
                                  const GroundOptions& options = {});
StructureReport CompareNetworks(const ConstraintNetwork& learned,
                                const ConstraintNetwork& truth);

nlohmann::json StructureReportToJson(const StructureReport& r);

}  // namespace clpbn

#endif  // CLPBN_LEARN_H_
