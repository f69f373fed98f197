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


#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "clpbn/learn.h"
#include "doctest.h"
#include "support.h"

namespace clpbn::testing {
namespace {

struct Fixture {
  Program program;
  Population population;
  ConstraintNetwork net;
};

const Fixture& School() {
  static const Fixture f = [] {
    Fixture out{LoadProgram("school.clpbn"), LoadPopulation("school.pop"), {}};
    out.net = GroundProgram(out.program, out.population);
    return out;
  }();
  return f;
}

SampleSet Draw(const ConstraintNetwork& net, std::size_t n, std::uint64_t seed) {
  return ToSampleSet(net, SampleNetwork(net, n, seed));
}

// Largest L1 distance between a fitted column and the generating column.
double WorstColumnError(const ConstraintNetwork& truth, const FitResult& fit) {
  double worst = 0.0;
  for (const auto& t : fit.tables) {
    const Node& n = truth.node(*truth.FindLabel(*ParseTerm(t.labels[0])));
    std::size_t d = n.domain.size(), c = n.columns();
    REQUIRE(t.table.size() == n.table.size());
    for (std::size_t j = 0; j < c; ++j) {
      double l1 = 0.0;
      for (std::size_t r = 0; r < d; ++r)
        l1 += std::fabs(n.table[r * c + j] - t.table[r * c + j]);
      worst = std::max(worst, l1);
    }
  }
  return worst;
}

SkolemOwner OwnerOf(const ConstraintNetwork& net, const char* label) {
  return *net.node(*net.FindLabel(*ParseTerm(label))).origin;
}

const char* kIndependent =
    "x(T, X) :- item(T), {X = x(T) with p([h,l], [0.6,0.4], [])}.\n"
    "y(T, Y) :- item(T), {Y = y(T) with p([h,l], [0.3,0.7], [])}.\n"
    "item(t1).\n";
const char* kSpurious =
    "x(T, X) :- item(T), {X = x(T) with p([h,l], [0.6,0.4], [])}.\n"
    "y(T, Y) :- item(T), x(T, X), {Y = y(T) with p([h,l], [0.3,0.3,0.7,0.7], [X])}.\n"
    "item(t1).\n";
const char* kItemPop = "?- item(T), x(T, _).\n?- item(T), y(T, _).\n";

TEST_SUITE("learn") {
  TEST_CASE("fitted parameters approach the generator") {
    FitResult fit = FitCpts(School().program, School().population,
                            Draw(School().net, 10000, 11));
    CHECK(!fit.tables.empty());
    CHECK(WorstColumnError(School().net, fit) <= 0.05);
  }

  TEST_CASE("fitted tables are column-stochastic and interior") {
    FitResult fit = FitCpts(School().program, School().population,
                            Draw(School().net, 300, 4));
    for (const auto& t : fit.tables) {
      std::size_t d = t.key.domain.size(), c = t.table.size() / d;
      for (std::size_t j = 0; j < c; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          double v = t.table[r * c + j];
          CHECK(v > 0.0);
          CHECK(v < 1.0);
          s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    ConstraintNetwork refit = GroundProgram(fit.program, School().population);
    CHECK(refit.size() == School().net.size());
  }

  TEST_CASE("column error shrinks with more data") {
    std::vector<double> medians;
    for (std::size_t n : {200u, 1000u, 5000u, 20000u}) {
      std::vector<double> errs;
      for (std::uint64_t seed = 1; seed <= 5; ++seed)
        errs.push_back(WorstColumnError(
            School().net,
            FitCpts(School().program, School().population, Draw(School().net, n, seed))));
      std::nth_element(errs.begin(), errs.begin() + 2, errs.end());
      medians.push_back(errs[2]);
    }
    for (std::size_t k = 1; k < medians.size(); ++k) CHECK(medians[k] <= medians[k - 1]);
  }

  TEST_CASE("true structure outscores grade without intelligence") {
    SampleSet s = Draw(School().net, 10000, 12);
    BicScore truth = ScoreBic(School().program, School().population, s);
    Program reduced =
        RemoveParent(School().program, OwnerOf(School().net, "grade(r1)"), 1, {2, 2});
    BicScore without = ScoreBic(reduced, School().population, s);
    CHECK(without.parameters < truth.parameters);
    CHECK(truth.score > without.score);
  }

  TEST_CASE("removing a parent averages its table") {
    Program p = ParseOrDie(kSpurious);
    ConstraintNetwork net = GroundProgram(p, PopulationOf(kItemPop));
    Program reduced = RemoveParent(p, OwnerOf(net, "y(t1)"), 0, {2});
    ConstraintNetwork after = GroundProgram(reduced, PopulationOf(kItemPop));
    const Node& y = after.node(*after.FindLabel(*ParseTerm("y(t1)")));
    CHECK(y.parents.empty());
    CHECK(MaxAbsDiff(y.table, {0.3, 0.7}) < 1e-12);
  }

  TEST_CASE("degenerate data scores half a parameter") {
    Program p = ParseOrDie(
        "x(T, X) :- item(T), {X = x(T) with p([h,l], [0.5,0.5], [])}.\nitem(t1).\n");
    SampleSet s{{"x(t1)"}, {}};
    for (int i = 0; i < 500; ++i) s.rows.push_back({"h"});
    BicScore b = ScoreBic(p, PopulationOf("?- item(T), x(T, _).\n"), s);
    CHECK(b.log_likelihood == doctest::Approx(0.0));
    CHECK(b.parameters == 1);
    CHECK(b.score == doctest::Approx(-0.5 * std::log(500.0)));
  }

  TEST_CASE("a spurious parent does not help at large n") {
    Population pop = PopulationOf(kItemPop);
    ConstraintNetwork gen = GroundProgram(ParseOrDie(kIndependent), pop);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SampleSet s = Draw(gen, 20000, seed);
      CHECK(ScoreBic(ParseOrDie(kSpurious), pop, s).score <
            ScoreBic(ParseOrDie(kIndependent), pop, s).score);
    }
  }

  TEST_CASE("sample files") {
    std::istringstream in("x(t1),\"y(t1, t2)\"\nh,l\nl,h\n");
    SampleSet s = ReadSamplesCsv(in);
    CHECK(s.columns == std::vector<std::string>{"x(t1)", "y(t1, t2)"});
    CHECK(s.rows.size() == 2);
    Program p = ParseOrDie(kIndependent);
    SampleSet missing{{"x(t1)"}, {{"h"}}};
    try {
      FitCpts(p, PopulationOf(kItemPop), missing);
      FAIL("expected an error");
    } catch (const LearnError& e) {
      CHECK(e.code() == "missing-column");
    }
    SampleSet unknown{{"x(t1)", "y(t1)"}, {{"h", "q"}}};
    CHECK_THROWS_AS(FitCpts(p, PopulationOf(kItemPop), unknown), LearnError);
  }

  TEST_CASE("cycle removal ends acyclic within the edge budget") {
    Program cyclic = LoadProgram("cyclic.clpbn");
    Population pop = LoadPopulation("cyclic.pop");
    ConstraintNetwork gen = GroundProgram(LoadProgram("cyclic_truth.clpbn"), pop);
    GroundOptions permissive;
    permissive.permissive = true;
    ConstraintNetwork before = GroundProgram(cyclic, pop, permissive);
    CHECK(before.FindCycle().has_value());
    std::size_t edges = 0;
    for (const auto& [id, n] : before.nodes()) edges += n.parents.size();

    CycleRemoval r = RemoveCycles(cyclic, pop, Draw(gen, 2000, 3));
    CHECK(!r.steps.empty());
    CHECK(r.steps.size() <= edges);
    ConstraintNetwork after = GroundProgram(r.program, pop);
    CHECK(!after.FindCycle().has_value());
    CHECK(after.size() == 6);
  }

  TEST_CASE("greedy removal beats random removal") {
    const char* program =
        "c(T, C) :- item(T), {C = c(T) with p([h,l], [0.5,0.5], [])}.\n"
        "a(T, A) :- item(T), b(T, B), c(T, C),\n"
        "    {A = a(T) with p([h,l], [0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5], [B, C])}.\n"
        "b(T, B) :- item(T), a(T, A), {B = b(T) with p([h,l], [0.5,0.5,0.5,0.5], [A])}.\n"
        "item(t1).\nitem(t2).\n";
    const char* truth =
        "c(T, C) :- item(T), {C = c(T) with p([h,l], [0.5,0.5], [])}.\n"
        "a(T, A) :- item(T), c(T, C), {A = a(T) with p([h,l], [0.9,0.1,0.1,0.9], [C])}.\n"
        "b(T, B) :- item(T), a(T, A), {B = b(T) with p([h,l], [0.8,0.3,0.2,0.7], [A])}.\n"
        "item(t1).\nitem(t2).\n";
    Population pop = PopulationOf(
        "?- item(T), a(T, _).\n?- item(T), b(T, _).\n?- item(T), c(T, _).\n");
    ConstraintNetwork gen = GroundProgram(ParseOrDie(truth), pop);
    int wins = 0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      SampleSet s = Draw(gen, 3000, 100 + trial);
      CycleRemoval greedy = RemoveCycles(ParseOrDie(program), pop, s);
      REQUIRE(greedy.steps.size() == 1);
      CHECK(greedy.steps[0].parent_name == "B");
      CycleRemovalOptions o;
      o.random = true;
      o.seed = trial;
      CycleRemoval random = RemoveCycles(ParseOrDie(program), pop, s, o);
      CHECK(!GroundProgram(random.program, pop).FindCycle().has_value());
      if (greedy.score >= random.score) ++wins;
    }
    CHECK(wins >= 4);
  }

  TEST_CASE("structure comparison") {
    Population pop = LoadPopulation("cyclic.pop");
    Program truth = LoadProgram("cyclic_truth.clpbn");
    StructureReport same = CompareStructures(truth, truth, pop);
    CHECK(same.link_precision == 1.0);
    CHECK(same.link_recall == 1.0);
    CHECK(same.direction_match == 1.0);
    CHECK(same.markov_recall == 1.0);

    ConstraintNetwork t;
    NodeId a = t.AddNode(*ParseTerm("a"), {Term::Atom("h"), Term::Atom("l")}, {0.5, 0.5}, {});
    t.AddNode(*ParseTerm("b"), {Term::Atom("h"), Term::Atom("l")},
              {0.9, 0.2, 0.1, 0.8}, {a});
    ConstraintNetwork flipped;
    NodeId b = flipped.AddNode(*ParseTerm("b"), {Term::Atom("h"), Term::Atom("l")},
                               {0.5, 0.5}, {});
    flipped.AddNode(*ParseTerm("a"), {Term::Atom("h"), Term::Atom("l")},
                    {0.9, 0.2, 0.1, 0.8}, {b});
    StructureReport r = CompareNetworks(flipped, t);
    CHECK(r.link_recall == 1.0);
    CHECK(r.direction_match == 0.0);
    auto j = StructureReportToJson(r);
    CHECK(j.contains("link_precision"));

    ConstraintNetwork other;
    other.AddNode(*ParseTerm("z"), {Term::Atom("h"), Term::Atom("l")}, {0.5, 0.5}, {});
    try {
      CompareNetworks(other, t);
      FAIL("expected an error");
    } catch (const LearnError& e) {
      CHECK(e.code() == "node-set");
    }
  }
}

}  // namespace
}  // namespace clpbn::testing
