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


#include <set>

#include "clpbn/engine.h"
#include "clpbn/inference.h"
#include "doctest.h"
#include "support.h"

namespace clpbn::testing {
namespace {

std::set<std::string> Labels(const ConstraintNetwork& net) {
  std::set<std::string> out;
  for (const auto& [id, n] : net.nodes()) out.insert(FormatTerm(n.label));
  return out;
}

std::string Binding(const Answer& a, const std::string& name) {
  for (const auto& [n, t] : a.bindings)
    if (n == name) return FormatTerm(t);
  return "";
}

const Program& School() {
  static const Program p = LoadProgram("school.clpbn");
  return p;
}

TEST_SUITE("engine") {
  TEST_CASE("grade query builds the three node network") {
    auto answers = Solve(School(), QueryOf("grade(r2, Grade)."));
    REQUIRE(answers.size() == 1);
    CHECK(Labels(answers[0].network) ==
          std::set<std::string>{"grade(r2)", "dif(c2)", "i(bob)"});
    REQUIRE(answers[0].query_nodes.size() == 1);
    const Node& g = answers[0].network.node(answers[0].query_nodes[0].second);
    CHECK(g.parents.size() == 2);
  }

  TEST_CASE("plain fact query has an empty network") {
    Program p = ParseOrDie("f(a).\n");
    auto answers = Solve(p, QueryOf("f(a)."));
    REQUIRE(answers.size() == 1);
    CHECK(answers[0].network.empty());
  }

  TEST_CASE("hmm recursion depth one") {
    Program p = LoadProgram("hmm.clpbn");
    auto answers = Solve(p, QueryOf("caught(1, C)."));
    REQUIRE(answers.size() == 1);
    CHECK(Labels(answers[0].network) ==
          std::set<std::string>{"c(0)", "p(0)", "p(1)", "c(1)"});
  }

  TEST_CASE("ground query arguments become evidence") {
    auto answers = Solve(School(), QueryOf("grade(r2, a)."));
    REQUIRE(answers.size() == 1);
    auto id = answers[0].network.FindLabel(*ParseTerm("grade(r2)"));
    REQUIRE(id.has_value());
    CHECK(answers[0].network.node(*id).evidence == std::size_t{0});
  }

  TEST_CASE("free query arguments are not evidence") {
    auto answers = Solve(School(), QueryOf("grade(r2, G)."));
    for (const auto& [id, n] : answers.at(0).network.nodes())
      CHECK_FALSE(n.evidence.has_value());
  }

  TEST_CASE("conflicting or impossible evidence fails") {
    CHECK(Solve(School(), QueryOf("intelligence(bob, h), intelligence(bob, l).")).empty());
    CHECK(Solve(School(), QueryOf("grade(r2, z).")).empty());
    CHECK(Solve(School(), QueryOf("intelligence(bob, h), intelligence(bob, h).")).size() == 1);
  }

  TEST_CASE("two references share one node") {
    auto answers = Solve(
        School(), QueryOf("intelligence(bob, I1), intelligence(bob, I2), I1 == I2."));
    REQUIRE(answers.size() == 1);
    CHECK(answers[0].network.size() == 1);
  }

  TEST_CASE("arithmetic and collection builtins") {
    auto answers = Solve(
        School(), QueryOf("X is 3-1, findall(S, student(S), L), mean([1,2,4], M)."));
    REQUIRE(answers.size() == 1);
    CHECK(Binding(answers[0], "X") == "2");
    CHECK(Binding(answers[0], "L") == "[bob, mike]");
    CHECK(Binding(answers[0], "M") == FormatNumber(7.0 / 3));
  }

  TEST_CASE("comparison builtins") {
    Program p = ParseOrDie("k(1).\n");
    CHECK(Solve(p, QueryOf("1 < 2, 2 =< 2, 3 > 2, 3 >= 3, 4 =:= 2*2, 4 =\\= 5.")).size() == 1);
    CHECK(Solve(p, QueryOf("2 < 1.")).empty());
    CHECK_THROWS(Solve(p, QueryOf("X < 1.")));
  }

  TEST_CASE("setof deduplicates random variables") {
    auto answers = Solve(
        School(),
        QueryOf("setof(S, R^(registration(R, c2), satisfaction(R, S)), Sats)."));
    REQUIRE(answers.size() == 1);
    CHECK(answers[0].network.size() >= 2);
    std::string printed = Binding(answers[0], "Sats");
    CHECK(std::count(printed.begin(), printed.end(), ',') == 1);
  }

  TEST_CASE("setof without existential groups by free variables") {
    Program p = ParseOrDie("r(1, a). r(2, b). r(1, c).\n");
    auto answers = Solve(p, QueryOf("setof(X, r(K, X), L)."));
    REQUIRE(answers.size() == 2);
    CHECK(Binding(answers[0], "K") == "1");
    CHECK(Binding(answers[0], "L") == "[a, c]");
    CHECK(Binding(answers[1], "L") == "[b]");
    CHECK(Solve(p, QueryOf("setof(X, r(3, X), L).")).empty());
  }

  TEST_CASE("average builds a deterministic table") {
    auto answers = Solve(School(), QueryOf("rating(c2, R)."));
    REQUIRE(answers.size() == 1);
    const ConstraintNetwork& net = answers[0].network;
    const Node& r = net.node(answers[0].query_nodes.at(0).second);
    REQUIRE(r.parents.size() == 2);
    CHECK(FormatTerm(Term::List(r.domain)) == "[1, 2]");
    // Means 1, 1.5, 1.5, 2 round to 1, 1, 1, 2.
    CHECK(r.table == std::vector<double>{1, 1, 1, 0, 0, 0, 0, 1});
  }

  TEST_CASE("average rejects non numeric input") {
    CHECK_THROWS(Solve(School(), QueryOf("intelligence(bob, I), average([I], C).")));
    CHECK_THROWS(Solve(School(), QueryOf("average([], C).")));
  }

  TEST_CASE("aggregates over ground lists") {
    auto answers = Solve(
        School(), QueryOf("mode([b,a,b], M), min_list([3,1,2], L), max_list([3,1,2], H)."));
    REQUIRE(answers.size() == 1);
    CHECK(Binding(answers[0], "M") == "b");
    CHECK(Binding(answers[0], "L") == "1");
    CHECK(Binding(answers[0], "H") == "3");
  }

  TEST_CASE("answers are produced lazily in order") {
    Program p = ParseOrDie("n(1). n(2). n(3).\n");
    Solver solver(p, QueryOf("n(X)."));
    for (const char* expected : {"1", "2", "3"}) {
      auto a = solver.Next();
      REQUIRE(a.has_value());
      CHECK(Binding(*a, "X") == expected);
    }
    CHECK_FALSE(solver.Next().has_value());
  }

  TEST_CASE("computed tables come from ordinary goals") {
    Program p = LoadProgram("school_int_table.clpbn");
    auto answers = Solve(p, QueryOf("intelligence(bob, I)."));
    REQUIRE(answers.size() == 1);
    Marginal m = ComputeMarginal(answers[0].network, answers[0].query_nodes[0].second);
    CHECK(m.probs[0] == doctest::Approx(0.25));
  }

  TEST_CASE("malformed runtime tables abort") {
    Program p = ParseOrDie(
        "t(X, V) :- tab(X, T), {V = v(X) with T}.\n"
        "tab(a, p([x,y], [0.5], [])).\n");
    CHECK_THROWS(Solve(p, QueryOf("t(a, V).")));
  }

  TEST_CASE("step limit is distinguishable from failure") {
    Program p = ParseOrDie("spin :- spin.\nspin.\n");
    SolveOptions o;
    o.depth_limit = 1u << 20;
    o.step_limit = 10'000;
    CHECK_THROWS_AS(Solve(p, QueryOf("spin."), 0, o), LimitExceeded);
  }
}

}  // namespace
}  // namespace clpbn::testing
