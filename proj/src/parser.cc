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
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "clpbn/syntax.h"
#include "operators.h"

namespace clpbn {

namespace {

struct Token {
  enum class Type {
    kAtom,
    kQuotedAtom,
    kVar,
    kInt,
    kFloat,
    kPunct,  // ( ) [ ] { } , |
    kEnd,    // terminating '.'
    kEof,
  };
  Type type;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0.0;
  SourcePos pos;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, SourcePos pos)
      : std::runtime_error(msg), pos(pos) {}
  SourcePos pos;
};

bool IsSymbolChar(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<':
    case '>': case '=': case '~': case ':': case '.': case '?': case '@':
    case '#': case '&': case '$':
      return true;
    default:
      return false;
  }
}

bool IsAlnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token Next() {
    SkipLayout();
    Token tok;
    tok.pos = Pos();
    if (i_ >= text_.size()) {
      tok.type = Token::Type::kEof;
      return tok;
    }
    char c = text_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Number(tok);
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      tok.type = Token::Type::kVar;
      tok.text = TakeWhile(IsAlnum);
      return tok;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      tok.type = Token::Type::kAtom;
      tok.text = TakeWhile(IsAlnum);
      return tok;
    }
    if (c == '\'') return Quoted(tok);
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' ||
        c == '}' || c == ',' || c == '|') {
      Advance();
      tok.type = Token::Type::kPunct;
      tok.text = std::string(1, c);
      if (c == '[' && Peek() == ']') {
        Advance();
        tok.type = Token::Type::kAtom;
        tok.text = "[]";
      } else if (c == '{' && Peek() == '}') {
        Advance();
        tok.type = Token::Type::kAtom;
        tok.text = "{}";
      }
      return tok;
    }
    if (c == '!' || c == ';') {
      Advance();
      tok.type = Token::Type::kAtom;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '.') {
      char n = i_ + 1 < text_.size() ? text_[i_ + 1] : ' ';
      if (std::isspace(static_cast<unsigned char>(n)) || n == '%') {
        Advance();
        tok.type = Token::Type::kEnd;
        return tok;
      }
      if (i_ + 1 >= text_.size()) {
        Advance();
        tok.type = Token::Type::kEnd;
        return tok;
      }
    }
    if (IsSymbolChar(c)) {
      tok.type = Token::Type::kAtom;
      tok.text = TakeWhile(IsSymbolChar);
      return tok;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'",
                      tok.pos);
  }

  // True if the next character (no layout skipped) is '('.
  bool AtOpenParen() const { return i_ < text_.size() && text_[i_] == '('; }

 private:
  SourcePos Pos() const { return {line_, col_}; }
  char Peek() const { return i_ < text_.size() ? text_[i_] : '\0'; }
  void Advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  template <typename Pred>
  std::string TakeWhile(Pred p) {
    std::size_t start = i_;
    while (i_ < text_.size() && p(text_[i_])) Advance();
    return std::string(text_.substr(start, i_ - start));
  }

  void SkipLayout() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else if (c == '%') {
        while (i_ < text_.size() && text_[i_] != '\n') Advance();
      } else if (c == '/' && i_ + 1 < text_.size() && text_[i_ + 1] == '*') {
        SourcePos start = Pos();
        Advance();
        Advance();
        while (i_ + 1 < text_.size() &&
               !(text_[i_] == '*' && text_[i_ + 1] == '/'))
          Advance();
        if (i_ + 1 >= text_.size())
          throw SyntaxError("unterminated block comment", start);
        Advance();
        Advance();
      } else {
        break;
      }
    }
  }

  Token Number(Token& tok) {
    std::size_t start = i_;
    auto digits = [&] {
      while (i_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[i_])))
        Advance();
    };
    digits();
    bool is_float = false;
    if (i_ + 1 < text_.size() && text_[i_] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[i_ + 1]))) {
      is_float = true;
      Advance();
      digits();
    }
    if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
      if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
        is_float = true;
        while (i_ < j) Advance();
        digits();
      }
    }
    std::string s(text_.substr(start, i_ - start));
    if (is_float) {
      tok.type = Token::Type::kFloat;
      tok.fval = std::strtod(s.c_str(), nullptr);
    } else {
      tok.type = Token::Type::kInt;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), tok.ival);
      if (ec != std::errc()) throw SyntaxError("integer out of range", tok.pos);
    }
    tok.text = std::move(s);
    return tok;
  }

  Token Quoted(Token& tok) {
    Advance();
    std::string out;
    while (true) {
      if (i_ >= text_.size()) throw SyntaxError("unterminated quoted atom", tok.pos);
      char c = text_[i_];
      if (c == '\'') {
        if (Peek2() == '\'') {
          out.push_back('\'');
          Advance();
          Advance();
          continue;
        }
        Advance();
        break;
      }
      if (c == '\\' && i_ + 1 < text_.size()) {
        Advance();
        char e = text_[i_];
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        Advance();
        continue;
      }
      out.push_back(c);
      Advance();
    }
    tok.type = Token::Type::kQuotedAtom;
    tok.text = std::move(out);
    return tok;
  }
  char Peek2() const { return i_ + 1 < text_.size() ? text_[i_ + 1] : '\0'; }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Operator-precedence reader over one clause at a time.
class Reader {
 public:
  explicit Reader(std::string_view text) : lex_(text) { Shift(); }

  bool AtEof() const { return tok_.type == Token::Type::kEof; }
  SourcePos pos() const { return tok_.pos; }

  // Reads one term terminated by '.', numbering its variables from zero.
  Term ReadClauseTerm() {
    vars_.clear();
    names_.clear();
    Term t = Parse(1200);
    if (tok_.type != Token::Type::kEnd)
      throw SyntaxError("operator expected before '" + tok_.text + "'",
                        tok_.pos);
    Shift();
    return t;
  }

  Term ReadBareTerm() {
    vars_.clear();
    names_.clear();
    Term t = Parse(1200);
    if (tok_.type == Token::Type::kEnd) Shift();
    if (tok_.type != Token::Type::kEof)
      throw SyntaxError("unexpected trailing input", tok_.pos);
    return t;
  }

  const std::vector<std::string>& var_names() const { return names_; }

 private:
  void Shift() {
    tok_ = lex_.Next();
    // '(' glued to the preceding name opens an argument list.
    glued_paren_ = false;
    if ((tok_.type == Token::Type::kAtom ||
         tok_.type == Token::Type::kQuotedAtom) &&
        lex_.AtOpenParen())
      glued_paren_ = true;
  }

  bool IsPunct(const char* p) const {
    return tok_.type == Token::Type::kPunct && tok_.text == p;
  }

  void Expect(const char* p) {
    if (!IsPunct(p))
      throw SyntaxError(std::string("expected '") + p + "'", tok_.pos);
    Shift();
  }

  Term MakeVar(const std::string& name) {
    if (name == "_") {
      VarId id = static_cast<VarId>(names_.size());
      names_.push_back("_");
      return Term::Var(id, "_");
    }
    auto it = vars_.find(name);
    if (it != vars_.end()) return Term::Var(it->second, name);
    VarId id = static_cast<VarId>(names_.size());
    vars_.emplace(name, id);
    names_.push_back(name);
    return Term::Var(id, name);
  }

  // Whether the current token can start a term.
  bool StartsTerm() const {
    switch (tok_.type) {
      case Token::Type::kEnd:
      case Token::Type::kEof:
        return false;
      case Token::Type::kPunct:
        return tok_.text == "(" || tok_.text == "[" || tok_.text == "{";
      case Token::Type::kAtom:
        return !IsInfixOnly(tok_.text);
      default:
        return true;
    }
  }

  static bool IsInfixOnly(const std::string& name) {
    return FindInfix(name) != nullptr && FindPrefix(name) == nullptr &&
           name != "-" && name != "+";
  }

  Term Parse(int max_prec) {
    int left_prec = 0;
    Term left = ParsePrimary(max_prec, left_prec);
    return ParseInfix(std::move(left), left_prec, max_prec);
  }

  Term ParseInfix(Term left, int left_prec, int max_prec) {
    while (true) {
      std::string op;
      if (tok_.type == Token::Type::kAtom) {
        op = tok_.text;
      } else if (tok_.type == Token::Type::kPunct && tok_.text == ",") {
        op = ",";
      } else {
        break;
      }
      const OpDef* def = FindInfix(op);
      if (def == nullptr || def->priority > max_prec) break;
      int la = def->type == OpType::kYfx ? def->priority : def->priority - 1;
      int ra = def->type == OpType::kXfy ? def->priority : def->priority - 1;
      if (left_prec > la) break;
      Shift();
      Term right = Parse(ra);
      left = Term::Compound(op, {std::move(left), std::move(right)});
      left_prec = def->priority;
    }
    return left;
  }

  Term ParseArgs(const std::string& functor) {
    Shift();  // past '('
    std::vector<Term> args;
    args.push_back(Parse(999));
    while (IsPunct(",")) {
      Shift();
      args.push_back(Parse(999));
    }
    Expect(")");
    return Term::Compound(functor, std::move(args));
  }

  Term ParseList() {
    Shift();  // past '['
    std::vector<Term> items;
    items.push_back(Parse(999));
    while (IsPunct(",")) {
      Shift();
      items.push_back(Parse(999));
    }
    Term tail = Term::Nil();
    if (IsPunct("|")) {
      Shift();
      tail = Parse(999);
    }
    Expect("]");
    return Term::List(items, tail);
  }

  Term ParsePrimary(int max_prec, int& prec) {
    prec = 0;
    Token t = tok_;
    switch (t.type) {
      case Token::Type::kInt:
        Shift();
        return Term::Int(t.ival);
      case Token::Type::kFloat:
        Shift();
        return Term::Float(t.fval);
      case Token::Type::kVar:
        Shift();
        return MakeVar(t.text);
      case Token::Type::kPunct:
        if (t.text == "(") {
          Shift();
          Term inner = Parse(1200);
          Expect(")");
          return inner;
        }
        if (t.text == "[") return ParseList();
        if (t.text == "{") {
          Shift();
          Term inner = Parse(1200);
          Expect("}");
          return Term::Compound("{}", {inner});
        }
        throw SyntaxError("unexpected '" + t.text + "'", t.pos);
      case Token::Type::kQuotedAtom:
        if (glued_paren_) {
          Shift();
          return ParseArgs(t.text);
        }
        Shift();
        return Term::Atom(t.text);
      case Token::Type::kAtom: {
        if (glued_paren_) {
          Shift();
          return ParseArgs(t.text);
        }
        // Negative numeric literal.
        if (t.text == "-") {
          Shift();
          if ((tok_.type == Token::Type::kInt ||
               tok_.type == Token::Type::kFloat) &&
              tok_.pos.line == t.pos.line && tok_.pos.column == t.pos.column + 1) {
            Token n = tok_;
            Shift();
            return n.type == Token::Type::kInt ? Term::Int(-n.ival)
                                               : Term::Float(-n.fval);
          }
          return PrefixOpAfterShift(t, max_prec, prec);
        }
        Shift();
        if (FindPrefix(t.text) != nullptr) {
          return PrefixOpAfterShift(t, max_prec, prec);
        }
        return Term::Atom(t.text);
      }
      case Token::Type::kEnd:
        throw SyntaxError("unexpected end of clause", t.pos);
      case Token::Type::kEof:
        throw SyntaxError("unexpected end of input", t.pos);
    }
    throw SyntaxError("unexpected token", t.pos);
  }

  Term PrefixOpAfterShift(const Token& op, int max_prec, int& prec) {
    const OpDef* def = FindPrefix(op.text);
    if (def == nullptr || !StartsTerm()) {
      prec = 0;
      return Term::Atom(op.text);
    }
    int p = def->priority;
    if (p > max_prec) p = 999;
    int arg_max = def->type == OpType::kFy ? p : p - 1;
    Term arg = Parse(arg_max);
    prec = p;
    return Term::Compound(op.text, {arg});
  }

  Lexer lex_;
  Token tok_;
  bool glued_paren_ = false;
  std::map<std::string, VarId> vars_;
  std::vector<std::string> names_;
};

void FlattenConjunction(const Term& t, std::vector<Term>& out) {
  if (t.is_compound() && t.name() == "," && t.arity() == 2) {
    FlattenConjunction(t.arg(0), out);
    FlattenConjunction(t.arg(1), out);
  } else {
    out.push_back(t);
  }
}

Constraint ConstraintFromTerm(const Term& t) {
  // (V = Sk) with CPT
  if (!(t.is_compound() && t.name() == "with" && t.arity() == 2))
    throw std::invalid_argument("constraint must have the form {V = Sk with CPT}");
  const Term& eq = t.arg(0);
  if (!(eq.is_compound() && eq.name() == "=" && eq.arity() == 2))
    throw std::invalid_argument("constraint must have the form {V = Sk with CPT}");
  Constraint c;
  c.var = eq.arg(0);
  c.skolem = eq.arg(1);
  c.cpt = t.arg(1);
  if (!c.var.is_var())
    throw std::invalid_argument("constraint variable must be a variable");
  if (!c.skolem.is_callable())
    throw std::invalid_argument("Skolem position must be an atom or compound term");
  if (!c.cpt.is_var() && !SplitCpt(c.cpt))
    throw std::invalid_argument("CPT must be a variable or p(Domain, Table, Parents)");
  return c;
}

void AppendGoals(const Term& body, Clause& clause) {
  std::vector<Term> items;
  FlattenConjunction(body, items);
  for (const Term& item : items) {
    Goal g;
    g.term = item;
    g.pos = clause.pos;
    if (item.is_var()) {
      throw std::invalid_argument("variable goals are not supported");
    } else if (item.is_atom() && item.name() == "!") {
      g.kind = Goal::Kind::kCut;
    } else if (item.is_compound() && item.name() == "{}" && item.arity() == 1) {
      std::vector<Term> parts;
      FlattenConjunction(item.arg(0), parts);
      for (const Term& part : parts) {
        Goal cg;
        cg.kind = Goal::Kind::kConstraint;
        cg.term = part;
        cg.pos = clause.pos;
        Constraint c = ConstraintFromTerm(part);
        c.pos = clause.pos;
        cg.constraint = clause.constraints.size();
        clause.constraints.push_back(std::move(c));
        clause.body.push_back(std::move(cg));
      }
      continue;
    } else if (!item.is_callable()) {
      throw std::invalid_argument("goal must be callable");
    } else if (IsBuiltin(item.name(), item.is_compound() ? item.arity() : 0)) {
      g.kind = Goal::Kind::kBuiltin;
    } else {
      g.kind = Goal::Kind::kLiteral;
    }
    clause.body.push_back(std::move(g));
  }
}

}  // namespace

Clause ClauseFromTerm(const Term& t, std::vector<std::string> var_names) {
  Clause c;
  c.num_vars = var_names.size();
  c.var_names = std::move(var_names);
  Term head = t;
  if (t.is_compound() && t.name() == ":-" && t.arity() == 2) {
    head = t.arg(0);
    AppendGoals(t.arg(1), c);
  } else if (t.is_compound() && t.name() == ":-" && t.arity() == 1) {
    throw std::invalid_argument("directives are not supported");
  }
  if (!head.is_callable())
    throw std::invalid_argument("clause head must be an atom or compound term");
  if (head.name() == "{}" || head.name() == "," ||
      IsBuiltin(head.name(), head.is_compound() ? head.arity() : 0))
    throw std::invalid_argument("cannot redefine builtin or constraint " +
                                head.name());
  c.head = head;
  return c;
}

namespace {

Diagnostic SyntaxDiagnostic(const std::string& msg, SourcePos pos,
                            int clause) {
  Diagnostic d;
  d.severity = Diagnostic::Severity::kError;
  d.code = "syntax";
  d.clause = clause;
  d.pos = pos;
  d.message = msg;
  return d;
}

}  // namespace

ParseResult ParseProgram(std::string_view text) {
  ParseResult result;
  std::vector<Clause> clauses;
  try {
    Reader reader(text);
    while (!reader.AtEof()) {
      SourcePos start = reader.pos();
      Term t = reader.ReadClauseTerm();
      try {
        Clause built = ClauseFromTerm(t, reader.var_names());
        built.pos = start;
        for (Goal& g : built.body) g.pos = start;
        for (Constraint& k : built.constraints) k.pos = start;
        clauses.push_back(std::move(built));
      } catch (const std::invalid_argument& e) {
        result.diagnostics.push_back(SyntaxDiagnostic(
            e.what(), start, static_cast<int>(clauses.size())));
        return result;
      }
    }
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(
        SyntaxDiagnostic(e.what(), e.pos, static_cast<int>(clauses.size())));
    return result;
  }
  result.program = Program(std::move(clauses));
  return result;
}

namespace {

Query QueryFromTerm(Term t, const std::vector<std::string>& names) {
  if (t.is_compound() && t.name() == "?-" && t.arity() == 1) t = t.arg(0);
  Clause holder;
  AppendGoals(t, holder);
  if (!holder.constraints.empty())
    throw std::invalid_argument("constraints are not allowed in queries");
  Query q;
  q.goals = std::move(holder.body);
  q.var_names = names;
  q.num_vars = q.var_names.size();
  for (std::size_t i = 0; i < q.var_names.size(); ++i)
    if (q.var_names[i][0] != '_')
      q.named_vars.emplace_back(q.var_names[i], static_cast<VarId>(i));
  return q;
}

}  // namespace

std::optional<PopulationText> ParsePopulation(std::string_view text,
                                              std::vector<Diagnostic>* diags) {
  PopulationText out;
  int index = 0;
  try {
    Reader reader(text);
    while (!reader.AtEof()) {
      SourcePos start = reader.pos();
      Term t = reader.ReadClauseTerm();
      try {
        if (t.is_compound() && t.name() == "?-" && t.arity() == 1) {
          out.roots.push_back(QueryFromTerm(t, reader.var_names()));
        } else {
          Clause c = ClauseFromTerm(t, reader.var_names());
          c.pos = start;
          out.facts.push_back(std::move(c));
        }
      } catch (const std::invalid_argument& e) {
        if (diags) diags->push_back(SyntaxDiagnostic(e.what(), start, index));
        return std::nullopt;
      }
      ++index;
    }
  } catch (const SyntaxError& e) {
    if (diags) diags->push_back(SyntaxDiagnostic(e.what(), e.pos, index));
    return std::nullopt;
  }
  return out;
}

QueryResult ParseQuery(std::string_view text) {
  QueryResult result;
  try {
    Reader reader(text);
    if (reader.AtEof()) {
      result.diagnostics.push_back(
          SyntaxDiagnostic("empty query", reader.pos(), -1));
      return result;
    }
    Term t = reader.ReadClauseTerm();
    if (!reader.AtEof())
      throw SyntaxError("a query must be a single clause", reader.pos());
    result.query = QueryFromTerm(t, reader.var_names());
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(SyntaxDiagnostic(e.what(), e.pos, -1));
  } catch (const std::invalid_argument& e) {
    result.diagnostics.push_back(SyntaxDiagnostic(e.what(), {1, 1}, -1));
  }
  return result;
}

std::optional<Term> ParseTerm(std::string_view text) {
  try {
    Reader reader(text);
    if (reader.AtEof()) return std::nullopt;
    return reader.ReadBareTerm();
  } catch (const SyntaxError&) {
    return std::nullopt;
  }
}

std::string FormatDiagnostic(const Diagnostic& d) {
  std::string out = d.is_error() ? "error" : "warning";
  out += "[" + d.code + "]";
  if (d.pos.line > 0)
    out += " line " + std::to_string(d.pos.line) + ":" +
           std::to_string(d.pos.column);
  if (d.clause >= 0) out += " (clause " + std::to_string(d.clause) + ")";
  out += ": " + d.message;
  return out;
}

}  // namespace clpbn
