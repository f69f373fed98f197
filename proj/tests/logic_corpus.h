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


// Pure logic programs with queries, run through both the engine and the
// reference interpreter.

#ifndef CLPBN_TESTS_LOGIC_CORPUS_H_
#define CLPBN_TESTS_LOGIC_CORPUS_H_

#include <cstddef>
#include <vector>

namespace clpbn::testing {

struct LogicCase {
  const char* name;
  const char* program;
  const char* query;
  std::size_t limit = 0;  // 0 for all answers
};

inline const std::vector<LogicCase>& LogicCorpus() {
  static const std::vector<LogicCase> kCorpus = {
      {"append-split",
       "append([], L, L).\n"
       "append([H|T], L, [H|R]) :- append(T, L, R).\n",
       "append(X, Y, [1,2,3])."},
      {"member-enumerate",
       "member(X, [X|_]).\n"
       "member(X, [_|T]) :- member(X, T).\n",
       "member(X, [a,b,c])."},
      {"naive-reverse",
       "app([], L, L).\n"
       "app([H|T], L, [H|R]) :- app(T, L, R).\n"
       "nrev([], []).\n"
       "nrev([H|T], R) :- nrev(T, RT), app(RT, [H], R).\n",
       "nrev([1,2,3,4,5], R)."},
      {"ancestor",
       "parent(tom, bob). parent(tom, liz). parent(bob, ann).\n"
       "parent(bob, pat). parent(pat, jim).\n"
       "ancestor(X, Y) :- parent(X, Y).\n"
       "ancestor(X, Y) :- parent(X, Z), ancestor(Z, Y).\n",
       "ancestor(tom, X)."},
      {"max-with-cut",
       "max(X, Y, X) :- X >= Y, !.\n"
       "max(_, Y, Y).\n",
       "max(3, 5, M), max(7, 2, N)."},
      {"memberchk-cut",
       "memberchk(X, [X|_]) :- !.\n"
       "memberchk(X, [_|T]) :- memberchk(X, T).\n",
       "memberchk(X, [a,b,c])."},
      {"cut-prunes-clauses",
       "p(1). p(2). p(3).\n"
       "t(X) :- p(X), !.\n"
       "t(99).\n",
       "t(X)."},
      {"cut-mid-body",
       "r(a). r(b).\n"
       "s(1). s(2).\n"
       "q(X, Y) :- r(X), !, s(Y).\n"
       "q(z, 0).\n",
       "q(X, Y)."},
      {"cut-fail-negation",
       "member(X, [X|_]).\n"
       "member(X, [_|T]) :- member(X, T).\n"
       "absent(X, L) :- member(X, L), !, fail.\n"
       "absent(_, _).\n",
       "member(X, [a,b,c,d]), absent(X, [b,d])."},
      {"factorial",
       "fact(0, 1) :- !.\n"
       "fact(N, F) :- N1 is N - 1, fact(N1, F1), F is N * F1.\n",
       "fact(10, F)."},
      {"fibonacci",
       "fib(0, 0).\n"
       "fib(1, 1).\n"
       "fib(N, F) :- N > 1, A is N - 1, B is N - 2, fib(A, FA), fib(B, FB),\n"
       "    F is FA + FB.\n",
       "fib(12, F)."},
      {"list-length",
       "len([], 0).\n"
       "len([_|T], N) :- len(T, M), N is M + 1.\n",
       "len([a,b,c,d], N)."},
      {"peano-add",
       "add(0, Y, Y).\n"
       "add(s(X), Y, s(Z)) :- add(X, Y, Z).\n",
       "add(X, Y, s(s(s(0))))."},
      {"graph-paths",
       "edge(a, b). edge(a, c). edge(b, d). edge(c, d). edge(d, e).\n"
       "path(X, X, [X]).\n"
       "path(X, Y, [X|P]) :- edge(X, Z), path(Z, Y, P).\n",
       "path(a, e, P)."},
      {"permutations",
       "sel(X, [X|T], T).\n"
       "sel(X, [H|T], [H|R]) :- sel(X, T, R).\n"
       "perm([], []).\n"
       "perm(L, [X|P]) :- sel(X, L, R), perm(R, P).\n",
       "perm([1,2,3], P)."},
      {"if-then-else-by-cut",
       "member(X, [X|_]).\n"
       "member(X, [_|T]) :- member(X, T).\n"
       "sign(N, negative) :- N < 0, !.\n"
       "sign(0, zero) :- !.\n"
       "sign(_, positive).\n",
       "member(N, [-4, 0, 3]), sign(N, S)."},
      {"first-above-threshold",
       "between(L, H, L) :- L =< H.\n"
       "between(L, H, X) :- L < H, L1 is L + 1, between(L1, H, X).\n"
       "first_above(T, X) :- between(1, 10, X), X > T, !.\n",
       "first_above(4, X)."},
      {"partial-structures",
       "same(X, X).\n"
       "wrap(X, f(X, _)).\n",
       "same(f(A, b), f(a, B)), wrap(g(C), W)."},
      {"dedupe-identity",
       "member(X, [X|_]).\n"
       "member(X, [_|T]) :- member(X, T).\n"
       "dedupe([], []).\n"
       "dedupe([H|T], R) :- member(H2, T), H == H2, !, dedupe(T, R).\n"
       "dedupe([H|T], [H|R]) :- dedupe(T, R).\n",
       "dedupe([a,b,a,c,b,X,X], R)."},
      {"bounded-generator",
       "nat(0).\n"
       "nat(s(N)) :- nat(N).\n",
       "nat(N), N \\== 0, N \\== s(0).",
       4},
  };
  return kCorpus;
}

}  // namespace clpbn::testing

#endif  // CLPBN_TESTS_LOGIC_CORPUS_H_
