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

// Fixed operator table shared by the reader and the printer.

#ifndef CLPBN_SRC_OPERATORS_H_
#define CLPBN_SRC_OPERATORS_H_

#include <string>

namespace clpbn {

enum class OpType { kXfx, kXfy, kYfx, kFx, kFy };

struct OpDef {
  const char* name;
  int priority;
  OpType type;
};

inline const OpDef* FindInfix(const std::string& name) {
  static const OpDef kInfix[] = {
      {":-", 1200, OpType::kXfx}, {",", 1000, OpType::kXfy},
      {"with", 800, OpType::kXfx}, {"=", 700, OpType::kXfx},
      {"is", 700, OpType::kXfx},  {"<", 700, OpType::kXfx},
      {">", 700, OpType::kXfx},   {"=<", 700, OpType::kXfx},
      {">=", 700, OpType::kXfx},  {"=:=", 700, OpType::kXfx},
      {"=\\=", 700, OpType::kXfx}, {"==", 700, OpType::kXfx},
      {"\\==", 700, OpType::kXfx}, {"+", 500, OpType::kYfx},
      {"-", 500, OpType::kYfx},   {"*", 400, OpType::kYfx},
      {"/", 400, OpType::kYfx},   {"//", 400, OpType::kYfx},
      {"mod", 400, OpType::kYfx}, {"^", 200, OpType::kXfy},
  };
  for (const OpDef& d : kInfix)
    if (name == d.name) return &d;
  return nullptr;
}

inline const OpDef* FindPrefix(const std::string& name) {
  static const OpDef kPrefix[] = {
      {":-", 1200, OpType::kFx},
      {"?-", 1200, OpType::kFx},
      {"-", 200, OpType::kFy},
  };
  for (const OpDef& d : kPrefix)
    if (name == d.name) return &d;
  return nullptr;
}

}  // namespace clpbn

#endif  // CLPBN_SRC_OPERATORS_H_
