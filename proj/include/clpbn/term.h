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

// First-order terms, substitutions and unification.
//
// Terms are immutable values backed by shared nodes, so copying a Term is
// cheap and sharing them between derivations is safe. Variables are
// identified by integer id; the source name is kept only for printing.

#ifndef CLPBN_TERM_H_
#define CLPBN_TERM_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace clpbn {

using VarId = std::int64_t;

class Term {
 public:
  enum class Kind : std::uint8_t { kVar, kAtom, kInt, kFloat, kCompound };

  // The empty list atom.
  Term();

  static Term Var(VarId id, std::string name = {});
  static Term Atom(std::string name);
  static Term Int(std::int64_t value);
  static Term Float(double value);
  static Term Compound(std::string functor, std::vector<Term> args);
  static Term Nil();
  static Term Cons(Term head, Term tail);
  static Term List(const std::vector<Term>& items, Term tail = Nil());

  Kind kind() const { return d_->kind; }
  bool is_var() const { return d_->kind == Kind::kVar; }
  bool is_atom() const { return d_->kind == Kind::kAtom; }
  bool is_int() const { return d_->kind == Kind::kInt; }
  bool is_float() const { return d_->kind == Kind::kFloat; }
  bool is_number() const { return is_int() || is_float(); }
  bool is_compound() const { return d_->kind == Kind::kCompound; }
  bool is_callable() const { return is_atom() || is_compound(); }
  bool is_nil() const { return is_atom() && d_->name == "[]"; }
  bool is_cons() const {
    return is_compound() && d_->args.size() == 2 && d_->name == ".";
  }
  bool ground() const { return d_->ground; }

  VarId var_id() const { return d_->id; }
  const std::string& var_name() const { return d_->name; }
  // Atom name or compound functor.
  const std::string& name() const { return d_->name; }
  std::size_t arity() const { return d_->args.size(); }
  const Term& arg(std::size_t i) const { return d_->args[i]; }
  std::span<const Term> args() const { return d_->args; }
  std::int64_t int_value() const { return d_->id; }
  double float_value() const { return d_->real; }
  // Numeric value of an Int or Float.
  double number() const {
    return is_int() ? static_cast<double>(d_->id) : d_->real;
  }

  // True when both handles point at the same node.
  bool same_node(const Term& other) const { return d_ == other.d_; }

  // Structural identity: variables compare by id.
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  std::size_t hash() const;

 private:
  struct Data {
    Kind kind;
    bool ground;
    std::int64_t id = 0;  // variable id or integer value
    double real = 0.0;
    std::string name;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  std::shared_ptr<const Data> d_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Elements of a proper list, or nullopt if `t` is not a proper list.
std::optional<std::vector<Term>> ListItems(const Term& t);

// Standard order of terms: Var < Number < Atom < Compound. Numbers compare by
// value (Float before Int on ties), compounds by arity, name, then arguments.
int CompareTerms(const Term& a, const Term& b);

// Collects variable ids in order of first occurrence.
void CollectVars(const Term& t, std::vector<VarId>& out);

// Renames every variable id `v` in `t` to `base + v`.
Term OffsetVars(const Term& t, VarId base);

// Monotonic source of fresh variable ids.
class VarSource {
 public:
  explicit VarSource(VarId start = 1'000'000) : next_(start) {}
  VarId Fresh() { return next_++; }
  // Reserves `n` consecutive ids and returns the first.
  VarId Reserve(std::size_t n) {
    VarId base = next_;
    next_ += static_cast<VarId>(n);
    return base;
  }
  VarId peek() const { return next_; }

 private:
  VarId next_;
};

// Triangular substitution with a trail for undoing bindings.
class Substitution {
 public:
  // Follows variable bindings until an unbound variable or a non-variable.
  Term Walk(Term t) const;
  // Applies the substitution everywhere; the result contains no bound
  // variables, so applying twice equals applying once.
  Term Apply(const Term& t) const;

  bool Bound(VarId v) const { return bindings_.count(v) != 0; }
  const Term* Lookup(VarId v) const;
  void Bind(VarId v, Term value);

  std::size_t Mark() const { return trail_.size(); }
  void Undo(std::size_t mark);

  std::size_t size() const { return bindings_.size(); }
  const std::unordered_map<VarId, Term>& bindings() const { return bindings_; }

 private:
  std::unordered_map<VarId, Term> bindings_;
  std::vector<VarId> trail_;
};

// True iff variable `v` occurs in `t` under `s`.
bool OccursIn(VarId v, const Term& t, const Substitution& s);

// Lets a caller intercept variable bindings made during unification.
class UnifyHooks {
 public:
  enum class Result { kDefault, kSucceeded, kFailed };
  virtual ~UnifyHooks() = default;
  // `var` is an unbound variable, `value` is walked. Called before the
  // default occur-checked binding is made.
  virtual Result BindVar(const Term& var, const Term& value,
                         Substitution& s) = 0;
};

// Unifies `a` and `b`, extending `s` in place. Occur-check is always on. On
// failure every binding made by this call is undone.
bool UnifyInPlace(const Term& a, const Term& b, Substitution& s,
                  UnifyHooks* hooks = nullptr);

// Functional form: a most general unifier of a·s and b·s extending `s`.
std::optional<Substitution> Unify(const Term& a, const Term& b,
                                  Substitution s);

// True iff `a` and `b` are equal up to a consistent renaming of variables.
bool IsVariant(const Term& a, const Term& b);

}  // namespace clpbn

#endif  // CLPBN_TERM_H_
