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


#include <map>
#include <sstream>

#include "clpbn/engine.h"
#include "clpbn/inference.h"
#include "doctest.h"
#include "oracles.h"
#include "support.h"

namespace clpbn::testing {
namespace {

Term A(const char* name) { return Term::Atom(name); }

const Program& School() {
  static const Program p = LoadProgram("school.clpbn");
  return p;
}

const Population& SchoolPop() {
  static const Population p = LoadPopulation("school.pop");
  return p;
}

double Sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::map<std::string, int> FunctorCounts(const ConstraintNetwork& net) {
  std::map<std::string, int> out;
  for (const auto& [id, n] : net.nodes()) ++out[n.label.name()];
  return out;
}

TEST_SUITE("inference") {
  TEST_CASE("school marginals") {
    Marginal g = QueryMarginal(School(), "grade(r2, G).");
    CHECK(MaxAbsDiff(g.probs, {0.415, 0.31, 0.275}) < 1e-12);
    Marginal i = QueryMarginal(School(), "grade(r2, a), intelligence(bob, I).");
    CHECK(MaxAbsDiff(i.probs, {0.28 / 0.415, 0.135 / 0.415}) < 1e-12);
  }

  TEST_CASE("hmm marginals") {
    Program hmm = LoadProgram("hmm.clpbn");
    CHECK(MaxAbsDiff(QueryMarginal(hmm, "caught(0, C).").probs, {0.0, 1.0}) < 1e-12);
    Program fixed = LoadProgram("hmm_fixed.clpbn");
    CHECK(MaxAbsDiff(QueryMarginal(fixed, "caught(1, C).").probs, {0.0255, 0.9745}) <
          1e-12);
  }

  TEST_CASE("joint enumeration examples") {
    ConstraintNetwork one;
    one.AddNode(A("i"), {A("h"), A("l")}, {0.7, 0.3}, {});
    CHECK(MaxAbsDiff(EnumerateJoint(one).values, {0.7, 0.3}) < 1e-15);

    ConstraintNetwork two;
    two.AddNode(A("x"), {A("h"), A("l")}, {0.6, 0.4}, {});
    two.AddNode(A("y"), {A("h"), A("l")}, {0.1, 0.9}, {});
    Factor j = EnumerateJoint(two);
    CHECK(Sum(j.values) == doctest::Approx(1.0));
    for (double v : {0.06, 0.54, 0.04, 0.36})
      CHECK(std::count_if(j.values.begin(), j.values.end(),
                          [&](double x) { return std::fabs(x - v) < 1e-12; }) == 1);

    ConstraintNetwork chain;
    NodeId a = chain.AddNode(A("a"), {A("h"), A("l")}, {0.3, 0.7}, {});
    chain.AddNode(A("b"), {A("h"), A("l")}, {1.0, 0.0, 0.0, 1.0}, {a});
    Factor d = EnumerateJoint(chain);
    CHECK(d.values.size() == 4);
    CHECK(d.values[1] == 0.0);
    CHECK(d.values[2] == 0.0);
  }

  TEST_CASE("variable elimination matches enumeration on random networks") {
    std::mt19937_64 rng(2024);
    int compared = 0;
    for (int net_index = 0; net_index < 200; ++net_index) {
      ConstraintNetwork net = RandomNetwork(rng);
      std::optional<Factor> joint;
      try {
        joint = EnumerateJoint(net);
      } catch (const InferenceError& e) {
        CHECK(e.code() == "inconsistent-evidence");
      }
      for (const auto& [id, n] : net.nodes()) {
        auto oracle = BruteForceMarginal(net, id);
        if (!oracle) {
          CHECK_THROWS_AS(ComputeMarginal(net, id), InferenceError);
          continue;
        }
        REQUIRE(joint.has_value());
        Marginal ve = ComputeMarginal(net, id);
        Marginal je = MarginalFromJoint(net, *joint, id);
        CHECK(MaxAbsDiff(ve.probs, je.probs) < 1e-9);
        CHECK(MaxAbsDiff(ve.probs, *oracle) < 1e-9);
        CHECK(Sum(ve.probs) == doctest::Approx(1.0).epsilon(1e-9));
        ++compared;
      }
    }
    CHECK(compared > 500);
  }

  TEST_CASE("elimination order does not matter") {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 100; ++k) {
      ConstraintNetwork net = RandomNetwork(rng);
      for (const auto& [id, n] : net.nodes()) {
        if (!BruteForceMarginal(net, id)) continue;
        MarginalOptions reversed;
        reversed.reverse_ties = true;
        CHECK(MaxAbsDiff(ComputeMarginal(net, id).probs,
                         ComputeMarginal(net, id, reversed).probs) < 1e-9);
      }
    }
  }

  TEST_CASE("impossible evidence is distinguished") {
    ConstraintNetwork net;
    NodeId a = net.AddNode(A("a"), {A("h"), A("l")}, {1.0, 0.0}, {});
    NodeId b = net.AddNode(A("b"), {A("h"), A("l")}, {0.5, 0.5, 0.5, 0.5}, {a});
    net.SetEvidenceIndex(a, 1);
    try {
      ComputeMarginal(net, b);
      FAIL("expected an error");
    } catch (const InferenceError& e) {
      CHECK(e.code() == "inconsistent-evidence");
    }
  }

  TEST_CASE("deterministic networks sample their only assignment") {
    ConstraintNetwork net;
    NodeId a = net.AddNode(A("a"), {A("h"), A("l")}, {0.0, 1.0}, {});
    net.AddNode(A("b"), {A("x"), A("y"), A("z")}, {1, 0, 0, 0, 0, 1}, {a});
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      SampleTable t = SampleNetwork(net, 20, seed);
      for (const auto& row : t.rows) CHECK(row == std::vector<std::size_t>{1, 2});
    }
  }

  TEST_CASE("prior frequency and reproducible csv") {
    ConstraintNetwork net;
    net.AddNode(*ParseTerm("i(bob)"), {A("h"), A("l")}, {0.7, 0.3}, {});
    SampleTable t = SampleNetwork(net, 100000, 5);
    std::size_t h = 0;
    for (const auto& row : t.rows) h += row[0] == 0 ? 1 : 0;
    double freq = static_cast<double>(h) / 100000.0;
    CHECK(freq >= 0.695);
    CHECK(freq <= 0.705);
    std::ostringstream a, b, c;
    WriteSamplesCsv(a, net, SampleNetwork(net, 1000, 5));
    WriteSamplesCsv(b, net, SampleNetwork(net, 1000, 5));
    WriteSamplesCsv(c, net, SampleNetwork(net, 1000, 6));
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
    CHECK(a.str().rfind("i(bob)\n", 0) == 0);
  }

  TEST_CASE("sampling follows the joint") {
    ConstraintNetwork net = GroundProgram(School(), SchoolPop());
    SampleTable t = SampleNetwork(net, 40000, 8);
    NodeId g = *net.FindLabel(*ParseTerm("grade(r2)"));
    std::size_t col = std::find(t.order.begin(), t.order.end(), g) - t.order.begin();
    std::vector<double> freq(3, 0.0);
    for (const auto& row : t.rows) freq[row[col]] += 1.0 / 40000;
    CHECK(MaxAbsDiff(freq, {0.415, 0.31, 0.275}) < 0.01);
  }

  TEST_CASE("sampling refuses evidence") {
    ConstraintNetwork net;
    NodeId a = net.AddNode(A("a"), {A("h"), A("l")}, {0.5, 0.5}, {});
    net.SetEvidenceIndex(a, 0);
    CHECK_THROWS_AS(SampleNetwork(net, 10, 1), InferenceError);
  }

  TEST_CASE("csv header follows topological order") {
    ConstraintNetwork net = GroundProgram(School(), SchoolPop());
    std::ostringstream out;
    WriteSamplesCsv(out, net, SampleNetwork(net, 1, 1));
    std::string header = out.str().substr(0, out.str().find('\n'));
    std::vector<NodeId> order = net.TopologicalOrder();
    std::string expected;
    for (NodeId id : order) {
      std::string label = FormatTerm(net.node(id).label);
      if (label.find(',') != std::string::npos) label = "\"" + label + "\"";
      expected += (expected.empty() ? "" : ",") + label;
    }
    CHECK(header == expected);
  }

  TEST_CASE("school grounding covers every relation") {
    ConstraintNetwork net = GroundProgram(School(), SchoolPop());
    auto counts = FunctorCounts(net);
    CHECK(counts["a"] == 2);
    CHECK(counts["pop"] == 2);
    CHECK(counts["dif"] == 2);
    CHECK(counts["rating"] == 2);
    CHECK(counts["i"] == 2);
    CHECK(counts["rank"] == 2);
    CHECK(counts["grade"] == 3);
    CHECK(counts["sat"] == 3);
    // Each ranking reads the mode of its student's grades.
    CHECK(counts["$mode"] == 2);
    CHECK(net.size() == 20);
  }

  TEST_CASE("empty population grounds to an empty network") {
    Program p = ParseOrDie(
        "alpha(X, A) :- thing(X), {A = a(X) with p([y,n], [0.3,0.7], [])}.\n");
    CHECK(GroundProgram(p, {}).empty());
  }

  TEST_CASE("hmm unrolls to the horizon") {
    ConstraintNetwork net = GroundProgram(LoadProgram("hmm_fixed.clpbn"),
                                          PopulationOf("?- caught(2, _).\n"));
    std::set<std::string> labels;
    for (const auto& [id, n] : net.nodes()) labels.insert(FormatTerm(n.label));
    CHECK(labels == std::set<std::string>{"c(0)", "c(1)", "c(2)", "p(0)", "p(1)", "p(2)"});
  }

  TEST_CASE("agreement with the ground network") {
    for (const char* q : {"grade(r2, a), grade(r1, G).", "intelligence(mike, I).",
                          "grade(r3, c), satisfaction(r1, S), rating(c2, R)."}) {
      CAPTURE(q);
      AgreementReport r = AgreementCheck(School(), QueryOf(q), SchoolPop());
      CHECK(!r.entries.empty());
      CHECK(r.max_difference <= 1e-9);
    }
    AgreementReport prior =
        AgreementCheck(School(), QueryOf("intelligence(bob, I)."), SchoolPop());
    REQUIRE(prior.entries.size() == 1);
    CHECK(MaxAbsDiff(prior.entries[0].proof.probs, {0.7, 0.3}) < 1e-12);
    CHECK(MaxAbsDiff(prior.entries[0].ground.probs, {0.7, 0.3}) < 1e-12);
    AgreementReport hmm = AgreementCheck(LoadProgram("hmm_fixed.clpbn"),
                                         QueryOf("caught(3, C)."),
                                         LoadPopulation("hmm3.pop"));
    CHECK(hmm.max_difference <= 1e-9);
  }

  TEST_CASE("marginal json shape") {
    ConstraintNetwork net;
    Marginal m = QueryMarginal(School(), "grade(r2, G).", &net);
    auto j = MarginalToJson(net, m);
    CHECK(j["node"] == "grade(r2)");
    CHECK(j["domain"].size() == 3);
    CHECK(j["probs"].size() == 3);
    CHECK(FormatMarginal(net, m) == "grade(r2): a=0.415 b=0.31 c=0.275");
  }
}

}  // namespace
}  // namespace clpbn::testing
