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


// Command-line front end. Results go to `out`, diagnostics and the repl
// prompt to `err`; the repl reads queries from `in`.
//
// Exit status: 0 success, 1 query failure or inconsistent evidence,
// 2 validation errors, 3 usage errors.

#ifndef CLPBN_CLI_H_
#define CLPBN_CLI_H_

#include <iosfwd>

namespace clpbn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitUsage = 3;

int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace clpbn

#endif  // CLPBN_CLI_H_
