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

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "clpbn/syntax.h"
#include "operators.h"

namespace clpbn {

namespace {

bool IsSolo(const std::string& s) {
  return s == "[]" || s == "!" || s == ";" || s == "{}";
}

bool IsLetterAtom(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0])))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

bool IsSymbolChar(char c) {
  return std::string_view("+-*/\\^<>=~:.?@#&$").find(c) != std::string_view::npos;
}

bool IsSymbolAtom(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!IsSymbolChar(c)) return false;
  return s != ".";
}

class Printer {
 public:
  explicit Printer(const std::unordered_map<VarId, std::string>* names)
      : names_(names) {}

  void Print(const Term& t, int max_prec, std::string& out) const {
    switch (t.kind()) {
      case Term::Kind::kVar:
        out += VarName(t);
        return;
      case Term::Kind::kInt:
        out += std::to_string(t.int_value());
        return;
      case Term::Kind::kFloat:
        out += FormatNumber(t.float_value());
        return;
      case Term::Kind::kAtom: {
        const std::string& n = t.name();
        bool is_op = FindInfix(n) != nullptr || FindPrefix(n) != nullptr;
        if (is_op && max_prec < 1200 && n != "-" && n != "+") {
          out += "(" + FormatAtom(n) + ")";
        } else {
          out += FormatAtom(n);
        }
        return;
      }
      case Term::Kind::kCompound:
        PrintCompound(t, max_prec, out);
        return;
    }
  }

 private:
  std::string VarName(const Term& t) const {
    if (names_ != nullptr) {
      auto it = names_->find(t.var_id());
      if (it != names_->end()) return it->second;
      return "_G" + std::to_string(t.var_id());
    }
    if (!t.var_name().empty() && t.var_name() != "_") return t.var_name();
    return "_G" + std::to_string(t.var_id());
  }

  void PrintCompound(const Term& t, int max_prec, std::string& out) const {
    const std::string& f = t.name();
    if (t.is_cons()) {
      PrintList(t, out);
      return;
    }
    if (f == "{}" && t.arity() == 1) {
      out += "{";
      Print(t.arg(0), 1200, out);
      out += "}";
      return;
    }
    if (t.arity() == 2) {
      if (const OpDef* op = FindInfix(f)) {
        int p = op->priority;
        int lp = op->type == OpType::kYfx ? p : p - 1;
        int rp = op->type == OpType::kXfy ? p : p - 1;
        bool paren = p > max_prec;
        if (paren) out += "(";
        Print(t.arg(0), lp, out);
        if (f == ",") {
          out += ", ";
        } else if (f == "^") {
          out += "^";
        } else {
          out += " " + f + " ";
        }
        Print(t.arg(1), rp, out);
        if (paren) out += ")";
        return;
      }
    }
    if (t.arity() == 1 && f == "-" && !t.arg(0).is_number()) {
      const OpDef* op = FindPrefix(f);
      bool paren = op->priority > max_prec;
      if (paren) out += "(";
      std::string operand;
      Print(t.arg(0), op->priority, operand);
      if (!operand.empty() && IsSymbolChar(operand[0])) {
        out += "-(" + operand + ")";
      } else {
        out += "-" + operand;
      }
      if (paren) out += ")";
      return;
    }
    out += FormatAtom(f);
    out += "(";
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i > 0) out += ", ";
      Print(t.arg(i), 999, out);
    }
    out += ")";
  }

  void PrintList(const Term& t, std::string& out) const {
    out += "[";
    Term cur = t;
    bool first = true;
    while (cur.is_cons()) {
      if (!first) out += ", ";
      first = false;
      Print(cur.arg(0), 999, out);
      cur = cur.arg(1);
    }
    if (!cur.is_nil()) {
      out += "|";
      Print(cur, 999, out);
    }
    out += "]";
  }

  const std::unordered_map<VarId, std::string>* names_;
};

// Printed names for the variables of one clause, unique within it.
Term GoalTerm(const Clause& c, const Goal& g) {
  if (g.kind != Goal::Kind::kConstraint) return g.term;
  const Constraint& k = c.constraints[g.constraint];
  return Term::Compound(
      "with", {Term::Compound("=", {k.var, k.skolem}), k.cpt});
}

std::unordered_map<VarId, std::string> ClauseVarNames(const Clause& c) {
  std::vector<Term> body;
  for (const Goal& g : c.body) body.push_back(GoalTerm(c, g));
  std::vector<VarId> ids;
  CollectVars(c.head, ids);
  for (const Term& g : body) CollectVars(g, ids);
  std::unordered_map<VarId, std::string> names;
  std::set<std::string> used;
  std::map<VarId, int> counts;
  // Variables occurring once and named "_" print as "_".
  std::function<void(const Term&)> count = [&](const Term& t) {
    if (t.ground()) return;
    if (t.is_var()) {
      ++counts[t.var_id()];
      return;
    }
    for (const Term& a : t.args()) count(a);
  };
  count(c.head);
  for (const Term& g : body) count(g);
  auto source_name = [&](VarId id) -> std::string {
    if (id >= 0 && static_cast<std::size_t>(id) < c.var_names.size())
      return c.var_names[id];
    return {};
  };
  std::function<std::string(const Term&, VarId)> find_name =
      [&](const Term& t, VarId id) -> std::string {
    if (t.is_var()) return t.var_id() == id ? t.var_name() : std::string();
    for (const Term& a : t.args()) {
      std::string n = find_name(a, id);
      if (!n.empty()) return n;
    }
    return {};
  };
  for (VarId id : ids) {
    std::string n = find_name(c.head, id);
    for (std::size_t i = 0; n.empty() && i < body.size(); ++i)
      n = find_name(body[i], id);
    if (n.empty()) n = source_name(id);
    if (n == "_" || n.empty()) {
      if (counts[id] == 1) {
        names[id] = "_";
        continue;
      }
      n = "_V";
    }
    std::string candidate = n;
    for (int k = 1; used.count(candidate) != 0; ++k)
      candidate = n + "_" + std::to_string(k);
    used.insert(candidate);
    names[id] = candidate;
  }
  return names;
}

}  // namespace

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  } else if (s.find('.') == std::string::npos) {
    s.insert(s.find('e'), ".0");
  }
  return s;
}

std::string FormatAtom(const std::string& name) {
  if (IsLetterAtom(name) || IsSolo(name) || IsSymbolAtom(name)) return name;
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out += "'";
  return out;
}

std::string FormatTerm(const Term& t) {
  std::string out;
  Printer(nullptr).Print(t, 1200, out);
  return out;
}

std::string FormatTerm(const Term& t,
                       const std::unordered_map<VarId, std::string>& names) {
  std::string out;
  Printer(&names).Print(t, 1200, out);
  return out;
}

std::string FormatClause(const Clause& c) {
  auto names = ClauseVarNames(c);
  Printer printer(&names);
  std::string out;
  printer.Print(c.head, 999, out);
  if (c.body.empty()) {
    out += ".";
    return out;
  }
  out += " :-";
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    const Goal& g = c.body[i];
    out += "\n    ";
    if (g.kind == Goal::Kind::kConstraint) {
      out += "{";
      printer.Print(GoalTerm(c, g), 1200, out);
      out += "}";
    } else {
      printer.Print(g.term, 999, out);
    }
    out += i + 1 < c.body.size() ? "," : ".";
  }
  return out;
}

std::string FormatProgram(const Program& p) {
  std::string out;
  const Clause* prev = nullptr;
  for (const Clause& c : p.clauses()) {
    if (prev != nullptr && KeyOf(prev->head) != KeyOf(c.head)) out += "\n";
    out += FormatClause(c);
    out += "\n";
    prev = &c;
  }
  return out;
}

}  // namespace clpbn
