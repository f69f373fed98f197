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

// Reader and printer for the concrete clause syntax:
//
//   grade(Reg, Grade) :-
//     reg(Reg, Course, Student),
//     difficulty(Course, Dif),
//     intelligence(Student, Int),
//     {Grade = grade(Reg) with p([a,b,c], [...], [Dif, Int])}.
//
// `%` starts a line comment and `/* ... */` a block comment.

#ifndef CLPBN_SYNTAX_H_
#define CLPBN_SYNTAX_H_

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "clpbn/program.h"
#include "clpbn/term.h"

namespace clpbn {

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string code;
  int clause = -1;  // clause index, or -1 when not tied to a clause
  SourcePos pos;
  std::string message;

  bool is_error() const { return severity == Severity::kError; }
};

std::string FormatDiagnostic(const Diagnostic& d);

struct ParseResult {
  std::optional<Program> program;
  // Syntax errors; empty when `program` is set.
  std::vector<Diagnostic> diagnostics;
};

ParseResult ParseProgram(std::string_view text);

struct Query {
  std::vector<Goal> goals;
  std::size_t num_vars = 0;
  // Named (non-anonymous) query variables, by local id.
  std::vector<std::pair<std::string, VarId>> named_vars;
  std::vector<std::string> var_names;
};

struct QueryResult {
  std::optional<Query> query;
  std::vector<Diagnostic> diagnostics;
};

// A conjunction of goals terminated by `.`; a leading `?-` is accepted.
QueryResult ParseQuery(std::string_view text);

// Reads a single term (no terminating `.` required).
std::optional<Term> ParseTerm(std::string_view text);

// Builds a clause from a parsed `Head :- Body` or `Head` term whose
// variables are numbered 0..n-1. Throws std::invalid_argument on a malformed
// body element.
Clause ClauseFromTerm(const Term& t, std::vector<std::string> var_names);

struct ValidateOptions {
  // Allowed deviation of a CPT column sum from 1 before warning.
  double tolerance = 1e-6;
};

// Well-formedness check. Error codes: WF1 (constraint variable absent from
// the logical portion), WF2 (Skolem functor owned by more than one
// constraint), WF3a (bad domain), WF3b (bad parent list), WF3c (bad table).
// Warnings: non-normalized-column, shared-skolem-functor.
std::vector<Diagnostic> Validate(const Program& p,
                                 const ValidateOptions& options = {});

// The WF2 part of Validate on its own.
std::vector<Diagnostic> SkolemConflicts(const Program& p);

bool HasErrors(const std::vector<Diagnostic>& ds);

// Facts and root goals describing a population for grounding. Text is a
// sequence of clauses and `?- Goal.` root queries.
struct PopulationText {
  std::vector<Clause> facts;
  std::vector<Query> roots;
};
std::optional<PopulationText> ParsePopulation(std::string_view text,
                                              std::vector<Diagnostic>* diags);

std::string FormatTerm(const Term& t);
// `names` maps variable ids to printed names; unnamed variables print as
// _G<id>.
std::string FormatTerm(const Term& t,
                       const std::unordered_map<VarId, std::string>& names);
std::string FormatClause(const Clause& c);
std::string FormatProgram(const Program& p);
std::string FormatAtom(const std::string& name);
std::string FormatNumber(double v);

}  // namespace clpbn

#endif  // CLPBN_SYNTAX_H_
