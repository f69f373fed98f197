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


// Acceptance gate: one PASS or FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clpbn/inference.h"
#include "clpbn/learn.h"
#include "clpbn/prm.h"
#include "clpbn/syntax.h"
#include "json.hpp"
#include "logic_corpus.h"
#include "oracles.h"
#include "support.h"

namespace clpbn::testing {
namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

void Require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.ok) {
    o.ok = false;
    o.detail = what;
  }
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome PublishedValues() {
  Outcome o;
  auto time_check = [&](const char* file, const char* query,
                        const std::vector<double>& expected) {
    auto start = std::chrono::steady_clock::now();
    Marginal m = QueryMarginal(LoadProgram(file), query);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    double diff = MaxAbsDiff(m.probs, expected);
    Require(o, diff <= 1e-9, std::string(query) + " differs by " + Fmt(diff));
    Require(o, secs < 1.0, std::string(query) + " took " + Fmt(secs) + " s");
  };
  time_check("hmm.clpbn", "caught(0, C).", {0.0, 1.0});
  time_check("school.clpbn", "grade(r2, G).", {0.415, 0.31, 0.275});
  time_check("school.clpbn", "grade(r2, a), intelligence(bob, I).",
             {0.6746987952, 0.3253012048});
  time_check("hmm_fixed.clpbn", "caught(1, C).", {0.0255, 0.9745});
  if (o.ok) o.detail = "four marginals within 1e-9";
  return o;
}

Outcome OracleEquivalence() {
  Outcome o;
  std::mt19937_64 rng(20240);
  double worst = 0.0;
  std::size_t marginals = 0;
  for (int k = 0; k < 200; ++k) {
    ConstraintNetwork net = RandomNetwork(rng);
    std::optional<Factor> joint;
    try {
      joint = EnumerateJoint(net);
    } catch (const InferenceError&) {
    }
    for (const auto& [id, n] : net.nodes()) {
      std::optional<Marginal> ve;
      try {
        ve = ComputeMarginal(net, id);
      } catch (const InferenceError&) {
      }
      Require(o, ve.has_value() == joint.has_value(),
              "engines disagree on impossible evidence in net " + std::to_string(k));
      if (!ve || !joint) continue;
      double d = MaxAbsDiff(ve->probs, MarginalFromJoint(net, *joint, id).probs);
      worst = std::max(worst, d);
      ++marginals;
    }
  }
  Require(o, worst <= 1e-9, "max difference " + Fmt(worst));
  if (o.ok)
    o.detail = std::to_string(marginals) + " marginals, max difference " + Fmt(worst);
  return o;
}

// Query goal text for a node label, with `value` as the node's argument.
using GoalOf = std::function<std::string(const Term& label, const std::string& value)>;

Outcome AgreeAll(const Program& p, const Population& pop, const GoalOf& goal,
                 std::size_t* queries) {
  Outcome o;
  ConstraintNetwork net = GroundProgram(p, pop);
  std::vector<const Node*> nodes;
  for (const auto& [id, n] : net.nodes())
    if (n.origin) nodes.push_back(&n);
  double worst = 0.0;
  for (const Node* target : nodes) {
    std::vector<std::string> evidence = {""};
    for (const Node* e : nodes) {
      if (e == target) continue;
      for (const Term& v : e->domain) evidence.push_back(goal(e->label, FormatTerm(v)) + ", ");
    }
    for (const std::string& ev : evidence) {
      std::string text = ev + goal(target->label, "X") + ".";
      try {
        AgreementReport r = AgreementCheck(p, QueryOf(text), pop);
        Require(o, !r.entries.empty(), text + " produced no marginal");
        worst = std::max(worst, r.max_difference);
        ++*queries;
      } catch (const InferenceError& e) {
        // Zero-probability evidence must be impossible in the ground network too.
        Require(o, e.code() == "inconsistent-evidence", text + ": " + e.what());
      }
    }
  }
  Require(o, worst <= 1e-9, "max difference " + Fmt(worst));
  return o;
}

std::string Arg(const Term& label) { return FormatTerm(label.args()[0]); }

Outcome Agreement() {
  static const std::map<std::string, std::string> kSchool = {
      {"a", "ability"},       {"pop", "popularity"}, {"dif", "difficulty"},
      {"i", "intelligence"},  {"grade", "grade"},    {"sat", "satisfaction"},
      {"rating", "rating"},   {"rank", "ranking"}};
  std::size_t queries = 0;
  Outcome school = AgreeAll(
      LoadProgram("school.clpbn"), LoadPopulation("school.pop"),
      [](const Term& l, const std::string& v) {
        return kSchool.at(l.name()) + "(" + Arg(l) + ", " + v + ")";
      },
      &queries);
  Outcome hmm = AgreeAll(
      LoadProgram("hmm_fixed.clpbn"), LoadPopulation("hmm3.pop"),
      [](const Term& l, const std::string& v) {
        return std::string(l.name() == "c" ? "caught" : "watch") + "(" + Arg(l) + ", " +
               v + ")";
      },
      &queries);
  if (!school.ok) return {false, "school: " + school.detail};
  if (!hmm.ok) return {false, "hmm: " + hmm.detail};
  return {true, std::to_string(queries) + " queries within 1e-9"};
}

std::vector<Diagnostic> Check(const char* file) {
  ParseResult r = ParseProgram(ReadText(DataPath(file)));
  if (!r.program) return r.diagnostics;
  return Validate(*r.program);
}

Outcome Errata() {
  Outcome o;
  auto has_warning = [](const std::vector<Diagnostic>& ds, const std::string& needle) {
    for (const auto& d : ds)
      if (d.code == "non-normalized-column" && d.message.find(needle) != std::string::npos)
        return true;
    return false;
  };
  Require(o, has_warning(Check("school_int_table.clpbn"), "int_table(bob, [0.3, 0.9])"),
          "no warning for int_table(bob)");
  Require(o, has_warning(Check("hmm.clpbn"), "column 3 sums to 0.1"),
          "no warning for the fourth caught column");
  for (const char* f :
       {"school.clpbn", "school_int_table.clpbn", "hmm.clpbn", "hmm_fixed.clpbn"})
    for (const auto& d : Check(f))
      Require(o, d.severity != Diagnostic::Severity::kError,
              std::string(f) + ": " + d.message);
  if (o.ok) o.detail = "both warnings, zero errors on bundled programs";
  return o;
}

Outcome NegativeSuite() {
  Outcome o;
  for (const auto& [file, code] : std::vector<std::pair<std::string, std::string>>{
           {"invalid/wf1.clpbn", "WF1"},
           {"invalid/wf2.clpbn", "WF2"},
           {"invalid/wf3a.clpbn", "WF3a"},
           {"invalid/wf3b.clpbn", "WF3b"},
           {"invalid/wf3c.clpbn", "WF3c"}}) {
    std::vector<std::string> codes;
    for (const auto& d : Check(file.c_str()))
      if (d.severity == Diagnostic::Severity::kError) codes.push_back(d.code);
    Require(o, codes == std::vector<std::string>{code},
            file + " gave " + std::to_string(codes.size()) + " error(s)" +
                (codes.empty() ? "" : ", first " + codes[0]));
  }
  if (o.ok) o.detail = "each fixture gives exactly its code";
  return o;
}

Outcome Sampling() {
  Outcome o;
  ConstraintNetwork net =
      GroundProgram(LoadProgram("school.clpbn"), LoadPopulation("school.pop"));
  NodeId bob = *net.FindLabel(*ParseTerm("i(bob)"));
  SampleTable t = SampleNetwork(net, 100000, 42);
  std::size_t col = std::find(t.order.begin(), t.order.end(), bob) - t.order.begin();
  std::size_t h = 0;
  for (const auto& row : t.rows) h += row[col] == 0 ? 1 : 0;
  double freq = h / 100000.0;
  Require(o, freq >= 0.695 && freq <= 0.705, "freq(h) = " + Fmt(freq));
  std::ostringstream a, b;
  WriteSamplesCsv(a, net, t);
  WriteSamplesCsv(b, net, SampleNetwork(net, 100000, 42));
  Require(o, a.str() == b.str(), "same seed gave different csv");
  if (o.ok) o.detail = "freq(h) = " + std::to_string(freq) + ", csv reproducible";
  return o;
}

Outcome PrmRoundTrip() {
  Outcome o;
  PrmSchema schema =
      ParseSchema(nlohmann::json::parse(ReadText(DataPath("school_schema.json"))));
  ChainTranslation chain = TranslateSlotChain(schema, "student",
                                              {{"registration", "student"},
                                               {"registration", "course"},
                                               {"course", "prof"},
                                               {"professor", "ability"}});
  std::string joined;
  for (const auto& l : chain.literals) joined += (joined.empty() ? "" : ", ") + l;
  Require(o,
          joined == "registration3(RegKey, StudentKey), registration2(RegKey, CourseKey), "
                    "course2(CourseKey, ProfKey), professor2(ProfKey, Ability)",
          "slot chain compiled to " + joined);

  PrmCompilation c = CompilePrm(
      schema,
      ParseSkeleton(nlohmann::json::parse(ReadText(DataPath("school_skeleton_small.json")))));
  const std::vector<std::pair<std::string, std::string>> targets = {
      {"registration4(r1, X)", "grade(r1, X)"},   {"registration4(r2, X)", "grade(r2, X)"},
      {"registration4(r3, X)", "grade(r3, X)"},   {"student2(bob, X)", "intelligence(bob, X)"},
      {"student2(mike, X)", "intelligence(mike, X)"}};
  std::vector<std::pair<std::string, std::string>> queries;
  for (const auto& [cq, rq] : targets) {
    queries.push_back({cq + ".", rq + "."});
    for (const char* reg : {"r1", "r2", "r3"})
      for (const char* v : {"a", "b", "c"}) {
        if (cq.find(reg) != std::string::npos) continue;
        queries.push_back(
            {cq + ", registration4(" + reg + ", " + v + ").",
             rq + ", grade(" + reg + ", " + v + ")."});
      }
  }
  RoundTripReport r = RoundTripCheck(c, LoadProgram("school.clpbn"), queries);
  for (const auto& e : r.entries)
    Require(o, !e.both_failed, e.compiled_query + " failed in both programs");
  Require(o, r.max_difference <= 1e-9, "max difference " + Fmt(r.max_difference));
  if (o.ok)
    o.detail = "slot chain exact, " + std::to_string(r.entries.size()) +
               " queries within 1e-9";
  return o;
}

Outcome Learning() {
  Outcome o;
  Program school = LoadProgram("school.clpbn");
  Population pop = LoadPopulation("school.pop");
  ConstraintNetwork net = GroundProgram(school, pop);
  SampleSet samples = ToSampleSet(net, SampleNetwork(net, 10000, 2024));
  FitResult fit = FitCpts(school, pop, samples);
  double worst = 0.0;
  for (const auto& t : fit.tables) {
    const Node& n = net.node(*net.FindLabel(*ParseTerm(t.labels[0])));
    std::size_t d = n.domain.size(), c = n.columns();
    for (std::size_t j = 0; j < c; ++j) {
      double l1 = 0.0;
      for (std::size_t r = 0; r < d; ++r)
        l1 += std::fabs(n.table[r * c + j] - t.table[r * c + j]);
      worst = std::max(worst, l1);
    }
  }
  Require(o, worst <= 0.05, "worst column L1 " + Fmt(worst));

  SkolemOwner grade = *net.node(*net.FindLabel(*ParseTerm("grade(r1)"))).origin;
  double truth = ScoreBic(school, pop, samples).score;
  double reduced = ScoreBic(RemoveParent(school, grade, 1, {2, 2}), pop, samples).score;
  Require(o, truth > reduced, "BIC without the intelligence parent is not lower");

  Program cyclic = LoadProgram("cyclic.clpbn");
  Population cpop = LoadPopulation("cyclic.pop");
  GroundOptions permissive;
  permissive.permissive = true;
  std::size_t edges = 0;
  ConstraintNetwork before = GroundProgram(cyclic, cpop, permissive);
  for (const auto& [id, n] : before.nodes()) edges += n.parents.size();
  ConstraintNetwork gen = GroundProgram(LoadProgram("cyclic_truth.clpbn"), cpop);
  CycleRemoval removal =
      RemoveCycles(cyclic, cpop, ToSampleSet(gen, SampleNetwork(gen, 2000, 3)));
  Require(o, removal.steps.size() <= edges, "cycle removal took too many steps");
  Require(o, !GroundProgram(removal.program, cpop).FindCycle().has_value(),
          "program still cyclic");
  if (o.ok)
    o.detail = "worst L1 " + Fmt(worst) + ", BIC " + Fmt(truth) + " > " + Fmt(reduced) +
               ", acyclic after " + std::to_string(removal.steps.size()) + " of " +
               std::to_string(edges) + " edges";
  return o;
}

Outcome LogicConformance() {
  Outcome o;
  std::size_t answers = 0;
  for (const LogicCase& c : LogicCorpus()) {
    Program p = ParseOrDie(c.program);
    Query q = QueryOf(c.query);
    auto expected = ReferenceSolve(p, q, c.limit);
    Require(o, EngineSolve(p, q, c.limit) == expected, std::string(c.name) + " differs");
    answers += expected.size();
  }
  if (o.ok)
    o.detail = std::to_string(LogicCorpus().size()) + " programs, " +
               std::to_string(answers) + " answers identical";
  return o;
}

}  // namespace
}  // namespace clpbn::testing

int main() {
  using namespace clpbn::testing;
  struct Criterion {
    int number;
    double budget;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, 4.0, PublishedValues},   {2, 60.0, OracleEquivalence}, {3, 30.0, Agreement},
      {4, 1.0, Errata},        {5, 1.0, NegativeSuite},      {6, 10.0, Sampling},
      {7, 5.0, PrmRoundTrip},  {8, 60.0, Learning},          {9, 10.0, LogicConformance}};
  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.budget) o = {false, "took " + Fmt(secs) + " s"};
    std::printf("%s criterion %d: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", c.number,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
