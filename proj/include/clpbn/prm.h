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

// Compiles a probabilistic relational model into a program.
//
// Table R with fields f1 (the key) .. fn becomes binary predicates r2..rn
// relating a key to a field value, plus an entity predicate r/1 listing the
// keys. A probabilistic field gets a clause r_i(Key, Field) whose body walks
// the slot chain of each parent, aggregates multi-valued chains and posts
// the field's constraint.

#ifndef CLPBN_PRM_H_
#define CLPBN_PRM_H_

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clpbn/engine.h"
#include "clpbn/program.h"
#include "json.hpp"

namespace clpbn {

class PrmError : public std::runtime_error {
 public:
  PrmError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct SlotStep {
  std::string table;
  std::string field;
};

struct PrmParent {
  std::vector<SlotStep> chain;
  // mean, mode, min or max; required when the chain is multi-valued.
  std::string aggregator;
};

struct PrmField {
  std::string name;
  // Table whose key this field holds, if it is a foreign key.
  std::string references;
  bool probabilistic = false;
  std::vector<Term> domain;
  std::vector<PrmParent> parents;
  std::vector<double> cpt;
};

struct PrmTable {
  std::string name;
  // Variable name used for this table's key in generated clauses.
  std::string key_var;
  // fields[0] is the key.
  std::vector<PrmField> fields;
};

struct PrmSchema {
  std::vector<PrmTable> tables;

  const PrmTable& table(const std::string& name) const;
  // 1-based position of a field, as used in predicate names.
  std::size_t position(const std::string& table, const std::string& field) const;
};

// Per table, rows mapping field names to values; a missing or null cell is a
// missing value.
struct PrmRow {
  std::vector<std::pair<std::string, Term>> cells;
  const Term* get(const std::string& field) const;
};
struct Skeleton {
  std::map<std::string, std::vector<PrmRow>> tables;
};

PrmSchema ParseSchema(const nlohmann::json& j);
Skeleton ParseSkeleton(const nlohmann::json& j);

// Body literals for one slot chain starting at the key of `start`, printed
// with variable names, and the name of the variable holding the final value.
struct ChainTranslation {
  std::vector<std::string> literals;
  std::string value_var;
  bool multi_valued = false;
};
ChainTranslation TranslateSlotChain(const PrmSchema& schema,
                                    const std::string& start,
                                    const std::vector<SlotStep>& chain,
                                    std::map<std::string, int>* used = nullptr);

// The field clauses and observed-cell fallbacks, as program text.
std::string CompileSchemaText(const PrmSchema& schema);

struct CellConstant {
  std::string table;
  std::string key;
  std::string field;
  std::string constant;
};

struct SkeletonFacts {
  std::string text;
  std::vector<CellConstant> cell_constants;
};
SkeletonFacts CompileSkeleton(const PrmSchema& schema, const Skeleton& skeleton);

struct PrmCompilation {
  std::string text;
  Program program;
  std::vector<CellConstant> cell_constants;
};
// Schema clauses plus skeleton facts; the Skolem constants of missing cells
// are registered with the program.
PrmCompilation CompilePrm(const PrmSchema& schema, const Skeleton& skeleton);

struct RoundTripEntry {
  std::string compiled_query;
  std::string reference_query;
  double difference = 0.0;
  bool both_failed = false;
};
struct RoundTripReport {
  std::vector<RoundTripEntry> entries;
  double max_difference = 0.0;
};
// Compares the marginal of the first constrained variable of each compiled
// query with that of its reference query.
RoundTripReport RoundTripCheck(
    const PrmCompilation& compiled, const Program& reference,
    const std::vector<std::pair<std::string, std::string>>& queries,
    const SolveOptions& options = {});

}  // namespace clpbn

#endif  // CLPBN_PRM_H_
