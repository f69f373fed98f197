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

#include "clpbn/learn.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>

#include "clpbn/syntax.h"

namespace clpbn {

namespace {

using KeyTuple =
    std::tuple<std::size_t, std::size_t, std::string, std::vector<std::size_t>>;

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string DomainKey(const std::vector<Term>& domain) {
  std::string out;
  for (const Term& t : domain) out += FormatTerm(t) + "\x1f";
  return out;
}

// Count tables of every real node in `net`, pooled by table key, in order
// of first appearance.
std::vector<FittedTable> CountTables(const ConstraintNetwork& net,
                                     const SampleSet& samples) {
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < samples.columns.size(); ++i)
    column.emplace(samples.columns[i], i);
  for (const auto& row : samples.rows)
    if (row.size() != samples.columns.size())
      throw LearnError("sample-shape", "sample rows are not rectangular");

  // Per column, each row's value as an index into the node's domain.
  std::map<NodeId, std::vector<std::size_t>> values;
  auto indices = [&](NodeId id) -> const std::vector<std::size_t>& {
    auto it = values.find(id);
    if (it != values.end()) return it->second;
    const Node& n = net.node(id);
    std::string label = FormatTerm(n.label);
    auto c = column.find(label);
    if (c == column.end())
      throw LearnError("missing-column", "no sample column for " + label);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n.domain.size(); ++i)
      index.emplace(FormatTerm(n.domain[i]), i);
    std::vector<std::size_t> out;
    out.reserve(samples.rows.size());
    for (const auto& row : samples.rows) {
      auto v = index.find(row[c->second]);
      if (v == index.end())
        throw LearnError("sample-value", "value " + row[c->second] +
                                             " is not in the domain of " +
                                             label);
      out.push_back(v->second);
    }
    return values.emplace(id, std::move(out)).first->second;
  };

  std::map<KeyTuple, std::size_t> slot;
  std::vector<FittedTable> tables;
  for (const auto& [id, n] : net.nodes()) {
    if (n.stub || !n.origin) continue;
    std::vector<std::size_t> sizes;
    for (NodeId p : n.parents) sizes.push_back(net.node(p).domain.size());
    KeyTuple k{n.origin->clause, n.origin->constraint, DomainKey(n.domain),
               sizes};
    auto [it, inserted] = slot.emplace(k, tables.size());
    if (inserted) {
      FittedTable t;
      t.key = TableKey{*n.origin, n.domain, sizes};
      std::size_t cols = 1;
      for (std::size_t s : sizes) cols *= s;
      t.counts.assign(n.domain.size() * cols, 0.0);
      tables.push_back(std::move(t));
    }
    FittedTable& t = tables[it->second];
    t.labels.push_back(FormatTerm(n.label));
    std::size_t cols = t.counts.size() / n.domain.size();
    const std::vector<std::size_t>& own = indices(id);
    std::vector<const std::vector<std::size_t>*> par;
    for (NodeId p : n.parents) par.push_back(&indices(p));
    for (std::size_t r = 0; r < samples.rows.size(); ++r) {
      std::size_t col = 0;
      for (std::size_t k2 = 0; k2 < par.size(); ++k2)
        col = col * sizes[k2] + (*par[k2])[r];
      t.counts[own[r] * cols + col] += 1.0;
    }
  }
  return tables;
}

Term ConstraintGoalTerm(const Constraint& k) {
  return Term::Compound("with", {Term::Compound("=", {k.var, k.skolem}), k.cpt});
}

void ReplaceCpt(Clause& c, std::size_t index, Term cpt) {
  c.constraints[index].cpt = std::move(cpt);
  for (Goal& g : c.body)
    if (g.kind == Goal::Kind::kConstraint && g.constraint == index)
      g.term = ConstraintGoalTerm(c.constraints[index]);
}

std::vector<Term> NumberTerms(const std::vector<double>& xs) {
  std::vector<Term> out;
  for (double x : xs) out.push_back(Term::Float(x));
  return out;
}

bool Occurs(const Term& t, VarId v) {
  std::vector<VarId> vars;
  CollectVars(t, vars);
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

GroundOptions Permissive(GroundOptions g) {
  g.permissive = true;
  return g;
}

std::string ParentName(const Clause& c, const Term& parent) {
  if (parent.is_var() && parent.var_id() >= 0 &&
      static_cast<std::size_t>(parent.var_id()) < c.var_names.size() &&
      !c.var_names[static_cast<std::size_t>(parent.var_id())].empty())
    return c.var_names[static_cast<std::size_t>(parent.var_id())];
  return FormatTerm(parent);
}

}  // namespace

SampleSet ReadSamplesCsv(std::istream& in) {
  SampleSet s;
  std::string line;
  if (!std::getline(in, line))
    throw LearnError("sample-shape", "samples file is empty");
  s.columns = SplitCsvLine(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = SplitCsvLine(line);
    if (row.size() != s.columns.size())
      throw LearnError("sample-shape", "row " + std::to_string(s.rows.size() + 1) +
                                           " has " + std::to_string(row.size()) +
                                           " cells, expected " +
                                           std::to_string(s.columns.size()));
    s.rows.push_back(std::move(row));
  }
  return s;
}

SampleSet ToSampleSet(const ConstraintNetwork& net, const SampleTable& samples) {
  SampleSet s;
  std::vector<std::vector<std::string>> printed;
  for (NodeId id : samples.order) {
    const Node& n = net.node(id);
    s.columns.push_back(FormatTerm(n.label));
    std::vector<std::string> values;
    for (const Term& v : n.domain) values.push_back(FormatTerm(v));
    printed.push_back(std::move(values));
  }
  s.rows.reserve(samples.rows.size());
  for (const auto& row : samples.rows) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < row.size(); ++k) out.push_back(printed[k][row[k]]);
    s.rows.push_back(std::move(out));
  }
  return s;
}

FitResult FitCpts(const Program& p, const Population& pop,
                  const SampleSet& samples, const FitOptions& options) {
  ConstraintNetwork net = GroundProgram(p, pop, options.ground);
  FitResult out;
  out.tables = CountTables(net, samples);
  std::map<std::pair<std::size_t, std::size_t>, int> per_owner;
  for (FittedTable& t : out.tables) {
    std::size_t d = t.key.domain.size();
    std::size_t cols = t.counts.size() / d;
    t.table.assign(t.counts.size(), 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      double total = 0.0;
      for (std::size_t r = 0; r < d; ++r) total += t.counts[r * cols + c];
      double z = total + options.alpha * static_cast<double>(d);
      for (std::size_t r = 0; r < d; ++r)
        t.table[r * cols + c] =
            z > 0.0 ? (t.counts[r * cols + c] + options.alpha) / z
                    : 1.0 / static_cast<double>(d);
    }
    ++per_owner[{t.key.owner.clause, t.key.owner.constraint}];
  }

  std::vector<Clause> clauses = p.clauses();
  for (const FittedTable& t : out.tables) {
    if (per_owner[{t.key.owner.clause, t.key.owner.constraint}] != 1) continue;
    if (t.key.owner.clause >= clauses.size()) continue;
    Clause& c = clauses[t.key.owner.clause];
    const Constraint& k = c.constraints[t.key.owner.constraint];
    auto parts = SplitCpt(k.cpt);
    if (!parts || !parts->table.ground()) continue;
    auto old = ListItems(parts->table);
    if (!old || old->size() != t.table.size()) continue;
    ReplaceCpt(c, t.key.owner.constraint,
               Term::Compound("p", {parts->domain, Term::List(NumberTerms(t.table)),
                                    parts->parents}));
  }
  out.program = Program(std::move(clauses), p.registry().constants());
  return out;
}

BicScore ScoreBic(const Program& p, const Population& pop,
                  const SampleSet& samples, const GroundOptions& options) {
  ConstraintNetwork net = GroundProgram(p, pop, options);
  BicScore b;
  b.rows = samples.rows.size();
  for (const FittedTable& t : CountTables(net, samples)) {
    std::size_t d = t.key.domain.size();
    std::size_t cols = t.counts.size() / d;
    b.parameters += (d - 1) * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      double total = 0.0;
      for (std::size_t r = 0; r < d; ++r) total += t.counts[r * cols + c];
      for (std::size_t r = 0; r < d; ++r) {
        double n = t.counts[r * cols + c];
        if (n > 0.0) b.log_likelihood += n * std::log(n / total);
      }
    }
  }
  b.score = b.log_likelihood -
            0.5 * static_cast<double>(b.parameters) *
                (b.rows > 0 ? std::log(static_cast<double>(b.rows)) : 0.0);
  return b;
}

Program RemoveParent(const Program& p, SkolemOwner owner, std::size_t parent,
                     const std::vector<std::size_t>& parent_sizes) {
  std::vector<Clause> clauses = p.clauses();
  if (owner.clause >= clauses.size() ||
      owner.constraint >= clauses[owner.clause].constraints.size())
    throw LearnError("no-constraint", "no such constraint");
  Clause& c = clauses[owner.clause];
  const Constraint k = c.constraints[owner.constraint];
  auto parts = SplitCpt(k.cpt);
  if (!parts)
    throw LearnError("computed-cpt", "the CPT of " + FormatTerm(k.skolem) +
                                         " is computed at run time");
  auto domain = ListItems(parts->domain);
  auto table = ListItems(parts->table);
  auto parents = ListItems(parts->parents);
  if (!domain || !table || !parents || !parts->table.ground())
    throw LearnError("computed-cpt", "the CPT of " + FormatTerm(k.skolem) +
                                         " is computed at run time");
  if (parent >= parents->size() || parent_sizes.size() != parents->size())
    throw LearnError("no-parent", "no such parent");
  std::size_t d = domain->size();
  std::size_t cols = 1;
  for (std::size_t s : parent_sizes) cols *= s;
  if (table->size() != d * cols)
    throw LearnError("computed-cpt", "table size does not match its parents");

  // Average the table over the removed parent.
  std::size_t inner = 1;
  for (std::size_t i = parent + 1; i < parent_sizes.size(); ++i)
    inner *= parent_sizes[i];
  std::size_t m = parent_sizes[parent];
  std::size_t new_cols = cols / m;
  std::vector<double> t(d * new_cols, 0.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t col = 0; col < cols; ++col) {
      std::size_t outer = col / (inner * m), low = col % inner;
      t[r * new_cols + outer * inner + low] +=
          (*table)[r * cols + col].number() / static_cast<double>(m);
    }
  Term removed = (*parents)[parent];
  std::vector<Term> kept = *parents;
  kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(parent));
  ReplaceCpt(c, owner.constraint,
             Term::Compound("p", {parts->domain, Term::List(NumberTerms(t)),
                                  Term::List(kept)}));

  if (removed.is_var()) {
    VarId x = removed.var_id();
    auto elsewhere = [&](VarId v, std::size_t skip) {
      if (Occurs(c.head, v)) return true;
      for (std::size_t i = 0; i < c.body.size(); ++i)
        if (i != skip && Occurs(c.body[i].term, v)) return true;
      return false;
    };
    std::vector<std::size_t> users;
    for (std::size_t i = 0; i < c.body.size(); ++i)
      if (Occurs(c.body[i].term, x)) users.push_back(i);
    if (users.size() == 1 && c.body[users[0]].kind == Goal::Kind::kLiteral &&
        !Occurs(c.head, x)) {
      std::vector<VarId> vars;
      CollectVars(c.body[users[0]].term, vars);
      bool droppable = true;
      for (VarId v : vars)
        if (v != x && !elsewhere(v, users[0])) droppable = false;
      if (droppable)
        c.body.erase(c.body.begin() + static_cast<std::ptrdiff_t>(users[0]));
    }
  }
  return Program(std::move(clauses), p.registry().constants());
}

CycleRemoval RemoveCycles(const Program& p, const Population& pop,
                          const SampleSet& samples,
                          const CycleRemovalOptions& options) {
  GroundOptions g = Permissive(options.ground);
  CycleRemoval out;
  out.program = p;
  std::mt19937_64 rng(options.seed);
  std::size_t budget = 0;
  bool first = true;
  while (true) {
    ConstraintNetwork net = GroundProgram(out.program, pop, g);
    if (first) {
      for (const auto& [id, n] : net.nodes()) budget += n.parents.size();
      first = false;
    }
    if (!net.FindCycle()) break;
    struct Candidate {
      SkolemOwner owner;
      std::size_t parent;
      std::vector<std::size_t> sizes;
      std::string name;
    };
    std::vector<Candidate> candidates;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& [id, n] : net.nodes()) {
      if (n.stub || !n.origin) continue;
      for (std::size_t i = 0; i < n.parents.size(); ++i) {
        std::vector<NodeId> anc = net.Ancestors(n.parents[i]);
        if (std::find(anc.begin(), anc.end(), id) == anc.end()) continue;
        if (!seen.insert({n.origin->clause, n.origin->constraint, i}).second)
          continue;
        Candidate cand;
        cand.owner = *n.origin;
        cand.parent = i;
        for (NodeId q : n.parents) cand.sizes.push_back(net.node(q).domain.size());
        const Clause& c = out.program.clauses()[cand.owner.clause];
        auto parents = ListItems(
            SplitCpt(c.constraints[cand.owner.constraint].cpt)
                .value_or(CptParts{Term::Nil(), Term::Nil(), Term::Nil()})
                .parents);
        cand.name = parents && i < parents->size() ? ParentName(c, (*parents)[i])
                                                   : std::to_string(i);
        candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty())
      throw LearnError("no-deletion", "the cycle runs through computed CPTs "
                                      "and cannot be broken");
    if (out.steps.size() >= budget)
      throw LearnError("no-progress", "cycle removal did not terminate");

    std::size_t pick = 0;
    Program chosen;
    double chosen_score = 0.0;
    if (options.random) {
      pick = static_cast<std::size_t>(rng() % candidates.size());
      chosen = RemoveParent(out.program, candidates[pick].owner,
                            candidates[pick].parent, candidates[pick].sizes);
      chosen_score = ScoreBic(chosen, pop, samples, g).score;
    } else {
      bool have = false;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        Program trial = RemoveParent(out.program, candidates[i].owner,
                                     candidates[i].parent, candidates[i].sizes);
        double s = ScoreBic(trial, pop, samples, g).score;
        bool better = !have || s > chosen_score ||
                      (s == chosen_score &&
                       candidates[i].name < candidates[pick].name);
        if (better) {
          have = true;
          pick = i;
          chosen = std::move(trial);
          chosen_score = s;
        }
      }
    }
    out.steps.push_back({candidates[pick].owner, candidates[pick].parent,
                         candidates[pick].name, chosen_score});
    out.program = std::move(chosen);
  }
  out.score = ScoreBic(out.program, pop, samples, g).score;
  return out;
}

StructureReport CompareNetworks(const ConstraintNetwork& learned,
                                const ConstraintNetwork& truth) {
  auto edges = [](const ConstraintNetwork& net) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [id, n] : net.nodes())
      for (NodeId p : n.parents)
        out.insert({FormatTerm(net.node(p).label), FormatTerm(n.label)});
    return out;
  };
  auto labels = [](const ConstraintNetwork& net) {
    std::set<std::string> out;
    for (const auto& [id, n] : net.nodes()) out.insert(FormatTerm(n.label));
    return out;
  };
  if (labels(learned) != labels(truth))
    throw LearnError("node-set", "the two structures have different nodes");
  auto links = [](const std::set<std::pair<std::string, std::string>>& e) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [a, b] : e) out.insert(std::minmax(a, b));
    return out;
  };
  auto markov = [](const ConstraintNetwork& net) {
    std::set<std::pair<std::string, std::string>> out;
    auto children = net.Children();
    for (const auto& [id, n] : net.nodes()) {
      std::set<NodeId> blanket(n.parents.begin(), n.parents.end());
      for (NodeId c : children[id]) {
        blanket.insert(c);
        for (NodeId q : net.node(c).parents) blanket.insert(q);
      }
      blanket.erase(id);
      for (NodeId b : blanket)
        out.insert(std::minmax(FormatTerm(n.label), FormatTerm(net.node(b).label)));
    }
    return out;
  };
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  auto common = [](const auto& a, const auto& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x);
    return n;
  };
  auto le = edges(learned), te = edges(truth);
  auto ll = links(le), tl = links(te);
  auto lm = markov(learned), tm = markov(truth);
  StructureReport r;
  std::size_t shared = common(ll, tl);
  r.link_precision = ratio(shared, ll.size());
  r.link_recall = ratio(shared, tl.size());
  std::size_t same_direction = common(le, te);
  r.direction_match = ratio(same_direction, shared);
  std::size_t shared_mr = common(lm, tm);
  r.markov_precision = ratio(shared_mr, lm.size());
  r.markov_recall = ratio(shared_mr, tm.size());
  return r;
}

StructureReport CompareStructures(const Program& learned, const Program& truth,
                                  const Population& pop,
                                  const GroundOptions& options) {
  return CompareNetworks(GroundProgram(learned, pop, options),
                         GroundProgram(truth, pop, options));
}

nlohmann::json StructureReportToJson(const StructureReport& r) {
  return {{"link_precision", r.link_precision},
          {"link_recall", r.link_recall},
          {"direction_match", r.direction_match},
          {"markov_precision", r.markov_precision},
          {"markov_recall", r.markov_recall}};
}

}  // namespace clpbn
