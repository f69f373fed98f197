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


// Fixture loading shared by the test binaries.

#ifndef CLPBN_TESTS_SUPPORT_H_
#define CLPBN_TESTS_SUPPORT_H_

#include <string>
#include <vector>

#include "clpbn/inference.h"
#include "clpbn/program.h"
#include "clpbn/syntax.h"

namespace clpbn::testing {

std::string DataPath(const std::string& name);
std::string ReadText(const std::string& path);

// Parses a program, throwing std::runtime_error on syntax errors.
Program ParseOrDie(const std::string& text);
Program LoadProgram(const std::string& name);
Population LoadPopulation(const std::string& name);
Population PopulationOf(const std::string& text);
Query QueryOf(const std::string& text);

// Marginal of the first constrained variable of the first answer.
Marginal QueryMarginal(const Program& p, const std::string& query,
                       ConstraintNetwork* net = nullptr);

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b);

// Runs the command line with `args` (without the program name).
struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};
CliRun RunCommand(const std::vector<std::string>& args,
                  const std::string& input = "");

}  // namespace clpbn::testing

#endif  // CLPBN_TESTS_SUPPORT_H_
