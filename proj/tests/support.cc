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


#include "support.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "clpbn/cli.h"
#include "clpbn/engine.h"

namespace clpbn::testing {

std::string DataPath(const std::string& name) {
  return std::string(CLPBN_DATA_DIR) + "/" + name;
}

std::string ReadText(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Program ParseOrDie(const std::string& text) {
  ParseResult r = ParseProgram(text);
  if (!r.program) {
    std::string msg = "parse failed";
    for (const Diagnostic& d : r.diagnostics) msg += "\n" + FormatDiagnostic(d);
    throw std::runtime_error(msg);
  }
  return *r.program;
}

Program LoadProgram(const std::string& name) {
  return ParseOrDie(ReadText(DataPath(name)));
}

Population PopulationOf(const std::string& text) {
  std::vector<Diagnostic> ds;
  auto pop = ParsePopulation(text, &ds);
  if (!pop) throw std::runtime_error("bad population");
  return *pop;
}

Population LoadPopulation(const std::string& name) {
  return PopulationOf(ReadText(DataPath(name)));
}

Query QueryOf(const std::string& text) {
  QueryResult q = ParseQuery(text);
  if (!q.query) throw std::runtime_error("bad query: " + text);
  return *q.query;
}

Marginal QueryMarginal(const Program& p, const std::string& query,
                       ConstraintNetwork* net) {
  std::vector<Answer> answers = Solve(p, QueryOf(query), 1);
  if (answers.empty() || answers[0].query_nodes.empty())
    throw std::runtime_error("no constrained answer for " + query);
  Marginal m = ComputeMarginal(answers[0].network, answers[0].query_nodes[0].second);
  if (net) *net = answers[0].network;
  return m;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

CliRun RunCommand(const std::vector<std::string>& args, const std::string& input) {
  std::vector<const char*> argv{"clpbn"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  CliRun r;
  r.status = RunCli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace clpbn::testing
