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

#include "clpbn/prm.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "clpbn/inference.h"
#include "clpbn/syntax.h"

namespace clpbn {

namespace {

using nlohmann::json;

std::string CamelCase(const std::string& s) {
  std::string out;
  bool upper = true;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ') {
      upper = true;
      continue;
    }
    out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                 : c;
    upper = false;
  }
  return out.empty() ? "V" : out;
}

Term ValueFromJson(const json& v) {
  if (v.is_string()) return Term::Atom(v.get<std::string>());
  if (v.is_number_integer()) return Term::Int(v.get<std::int64_t>());
  if (v.is_number()) return Term::Float(v.get<double>());
  throw PrmError("format", "cell values must be strings or numbers, got " +
                               v.dump());
}

std::string Print(const Term& t) { return FormatTerm(t); }

std::string NumberList(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += (i ? ", " : "") + FormatNumber(xs[i]);
  return out + "]";
}

std::string TermList(const std::vector<Term>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + Print(xs[i]);
  return out + "]";
}

std::string Predicate(const PrmSchema& s, const std::string& table,
                      const std::string& field) {
  return table + std::to_string(s.position(table, field));
}

const PrmField& FieldOf(const PrmSchema& s, const std::string& table,
                        const std::string& field) {
  return s.table(table).fields[s.position(table, field) - 1];
}

std::string Fresh(const std::string& base, std::map<std::string, int>& used) {
  int& n = used[base];
  ++n;
  return n == 1 ? base : base + std::to_string(n);
}

std::string AggregatorPredicate(const std::string& agg) {
  if (agg == "mean" || agg == "mode") return agg;
  if (agg == "min") return "min_list";
  if (agg == "max") return "max_list";
  throw PrmError("aggregator", "unknown aggregator " + agg);
}

// Domain of the value a parent contributes, after aggregation.
const std::vector<Term>& ParentDomain(const PrmSchema& s, const PrmTable& t,
                                      const PrmField& f, const PrmParent& p) {
  const SlotStep& last = p.chain.back();
  const PrmField& target = FieldOf(s, last.table, last.field);
  if (!target.probabilistic)
    throw PrmError("slot-chain", "parent " + last.table + "." + last.field +
                                     " of " + t.name + "." + f.name +
                                     " is not probabilistic");
  if (p.aggregator == "mean") {
    bool ok = !target.domain.empty();
    for (std::size_t i = 0; ok && i < target.domain.size(); ++i)
      ok = target.domain[i].is_int() &&
           (i == 0 || target.domain[i].int_value() ==
                          target.domain[i - 1].int_value() + 1);
    if (!ok)
      throw PrmError("aggregator", "mean over " + last.table + "." +
                                       last.field +
                                       " needs consecutive ascending integers");
  }
  return target.domain;
}

}  // namespace

const PrmTable& PrmSchema::table(const std::string& name) const {
  for (const PrmTable& t : tables)
    if (t.name == name) return t;
  throw PrmError("slot-chain", "unknown table " + name);
}

std::size_t PrmSchema::position(const std::string& tname,
                                const std::string& field) const {
  const PrmTable& t = table(tname);
  for (std::size_t i = 0; i < t.fields.size(); ++i)
    if (t.fields[i].name == field) return i + 1;
  throw PrmError("slot-chain", "unknown field " + tname + "." + field);
}

const Term* PrmRow::get(const std::string& field) const {
  for (const auto& [name, value] : cells)
    if (name == field) return &value;
  return nullptr;
}

PrmSchema ParseSchema(const json& j) {
  PrmSchema s;
  try {
    for (const json& jt : j.at("tables")) {
      PrmTable t;
      t.name = jt.at("name").get<std::string>();
      t.key_var = jt.contains("key_var") ? jt["key_var"].get<std::string>()
                                         : CamelCase(t.name) + "Key";
      for (const json& jf : jt.at("fields")) {
        PrmField f;
        f.name = jf.at("name").get<std::string>();
        if (jf.contains("references"))
          f.references = jf["references"].get<std::string>();
        if (jf.contains("domain")) {
          f.probabilistic = true;
          for (const json& v : jf["domain"]) f.domain.push_back(ValueFromJson(v));
          f.cpt = jf.at("cpt").get<std::vector<double>>();
          if (jf.contains("parents"))
            for (const json& jp : jf["parents"]) {
              PrmParent p;
              for (const json& step : jp.at("chain")) {
                if (step.is_array())
                  p.chain.push_back({step.at(0).get<std::string>(),
                                     step.at(1).get<std::string>()});
                else
                  p.chain.push_back({step.at("table").get<std::string>(),
                                     step.at("field").get<std::string>()});
              }
              if (jp.contains("aggregator"))
                p.aggregator = jp["aggregator"].get<std::string>();
              f.parents.push_back(std::move(p));
            }
        }
        t.fields.push_back(std::move(f));
      }
      if (t.fields.empty())
        throw PrmError("format", "table " + t.name + " has no key field");
      if (t.fields[0].probabilistic)
        throw PrmError("format", "key of " + t.name + " cannot be probabilistic");
      s.tables.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw PrmError("format", std::string("schema: ") + e.what());
  }
  for (const PrmTable& t : s.tables)
    for (const PrmField& f : t.fields)
      if (!f.references.empty()) s.table(f.references);
  return s;
}

Skeleton ParseSkeleton(const json& j) {
  Skeleton sk;
  try {
    for (const auto& [name, rows] : j.at("tables").items()) {
      std::vector<PrmRow>& out = sk.tables[name];
      for (const json& jr : rows) {
        PrmRow row;
        for (const auto& [field, value] : jr.items())
          if (!value.is_null()) row.cells.emplace_back(field, ValueFromJson(value));
        out.push_back(std::move(row));
      }
    }
  } catch (const json::exception& e) {
    throw PrmError("format", std::string("skeleton: ") + e.what());
  }
  return sk;
}

ChainTranslation TranslateSlotChain(const PrmSchema& schema,
                                    const std::string& start,
                                    const std::vector<SlotStep>& chain,
                                    std::map<std::string, int>* used) {
  std::map<std::string, int> local;
  if (!used) used = &local;
  const PrmTable& st = schema.table(start);
  (*used)[st.key_var] = std::max((*used)[st.key_var], 1);
  if (chain.empty()) throw PrmError("slot-chain", "empty slot chain");

  ChainTranslation out;
  std::string cur_var = st.key_var;
  std::string cur_table = start;  // the key of this table, when at_key
  bool at_key = true;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const SlotStep& step = chain[k];
    if (!at_key)
      throw PrmError("slot-chain", "slot chain continues past the value of " +
                                       chain[k - 1].table + "." +
                                       chain[k - 1].field);
    const PrmTable& t = schema.table(step.table);
    const PrmField& f = FieldOf(schema, step.table, step.field);
    std::string pred = Predicate(schema, step.table, step.field);
    if (step.table == cur_table) {
      // Key to field.
      std::string next;
      if (!f.references.empty()) {
        next = Fresh(schema.table(f.references).key_var, *used);
        cur_table = f.references;
      } else {
        next = Fresh(CamelCase(f.name), *used);
        at_key = false;
      }
      out.literals.push_back(pred + "(" + cur_var + ", " + next + ")");
      cur_var = next;
    } else if (f.references == cur_table) {
      // Field to key: many rows may point at the current key.
      std::string next = Fresh(t.key_var, *used);
      out.literals.push_back(pred + "(" + next + ", " + cur_var + ")");
      cur_var = next;
      cur_table = t.name;
      out.multi_valued = true;
    } else {
      throw PrmError("slot-chain", "step " + step.table + "." + step.field +
                                       " does not connect to " + cur_table);
    }
  }
  out.value_var = cur_var;
  return out;
}

std::string CompileSchemaText(const PrmSchema& schema) {
  std::ostringstream out;
  for (const PrmTable& t : schema.tables) {
    for (std::size_t i = 1; i < t.fields.size(); ++i) {
      const PrmField& f = t.fields[i];
      if (!f.probabilistic) continue;
      std::string pred = t.name + std::to_string(i + 1);
      std::map<std::string, int> used;
      used[t.key_var] = 1;
      std::string field_var = Fresh(CamelCase(f.name), used);
      std::vector<std::string> body{t.name + "(" + t.key_var + ")"};
      std::vector<std::string> parent_vars;
      std::size_t columns = 1;
      for (const PrmParent& p : f.parents) {
        ChainTranslation c = TranslateSlotChain(schema, t.name, p.chain, &used);
        columns *= ParentDomain(schema, t, f, p).size();
        if (!c.multi_valued && !p.aggregator.empty())
          throw PrmError("aggregator", t.name + "." + f.name +
                                           ": aggregator on a single-valued "
                                           "slot chain");
        if (!c.multi_valued) {
          body.insert(body.end(), c.literals.begin(), c.literals.end());
          parent_vars.push_back(c.value_var);
          continue;
        }
        if (p.aggregator.empty())
          throw PrmError("aggregator", t.name + "." + f.name +
                                           ": multi-valued slot chain needs an "
                                           "aggregator");
        std::string list = Fresh(c.value_var + "List", used);
        std::string agg = Fresh(CamelCase(p.aggregator) + c.value_var, used);
        std::string goal;
        for (std::size_t k = 0; k < c.literals.size(); ++k)
          goal += (k ? ", " : "") + c.literals[k];
        body.push_back("findall(" + c.value_var + ", (" + goal + "), " + list +
                       ")");
        body.push_back(AggregatorPredicate(p.aggregator) + "(" + list + ", " +
                       agg + ")");
        parent_vars.push_back(agg);
      }
      if (f.cpt.size() != f.domain.size() * columns)
        throw PrmError("cpt", t.name + "." + f.name + ": CPT has " +
                                  std::to_string(f.cpt.size()) +
                                  " entries, expected " +
                                  std::to_string(f.domain.size() * columns));
      std::string parents = "[";
      for (std::size_t k = 0; k < parent_vars.size(); ++k)
        parents += (k ? ", " : "") + parent_vars[k];
      parents += "]";
      body.push_back("{" + field_var + " = " + t.name + "_" + f.name + "(" +
                     t.key_var + ") with p(" + TermList(f.domain) + ", " +
                     NumberList(f.cpt) + ", " + parents + ")}");
      body.push_back(pred + "_observed(" + t.key_var + ", " + field_var + ")");
      out << pred << "(" << t.key_var << ", " << field_var << ") :-\n";
      for (std::size_t k = 0; k < body.size(); ++k)
        out << "    " << body[k] << (k + 1 < body.size() ? ",\n" : ".\n");
      out << pred << "_observed(_, _).\n\n";
    }
  }
  return out.str();
}

SkeletonFacts CompileSkeleton(const PrmSchema& schema,
                              const Skeleton& skeleton) {
  for (const auto& [name, rows] : skeleton.tables) schema.table(name);
  std::set<std::string> taken;
  for (const auto& [name, rows] : skeleton.tables)
    for (const PrmRow& r : rows)
      for (const auto& [field, v] : r.cells)
        if (v.is_atom()) taken.insert(v.name());
  int next = 0;
  auto fresh = [&]() {
    std::string c;
    do c = "sk_" + std::to_string(++next);
    while (taken.count(c));
    return c;
  };

  SkeletonFacts out;
  std::ostringstream entities, facts, observed;
  for (const PrmTable& t : schema.tables) {
    auto it = skeleton.tables.find(t.name);
    if (it == skeleton.tables.end()) continue;
    std::set<Term, bool (*)(const Term&, const Term&)> keys(
        [](const Term& a, const Term& b) { return CompareTerms(a, b) < 0; });
    for (const PrmRow& row : it->second) {
      for (const auto& [field, v] : row.cells) schema.position(t.name, field);
      const Term* key = row.get(t.fields[0].name);
      if (!key)
        throw PrmError("missing-key", "a row of " + t.name + " has no key");
      if (!keys.insert(*key).second)
        throw PrmError("duplicate-key",
                       "duplicate key " + Print(*key) + " in " + t.name);
      std::string k = Print(*key);
      entities << t.name << "(" << k << ").\n";
      for (std::size_t i = 1; i < t.fields.size(); ++i) {
        const PrmField& f = t.fields[i];
        std::string pred = t.name + std::to_string(i + 1);
        const Term* v = row.get(f.name);
        if (f.probabilistic) {
          if (!v) {
            out.cell_constants.push_back({t.name, k, f.name, fresh()});
            continue;
          }
          if (std::find(f.domain.begin(), f.domain.end(), *v) == f.domain.end())
            throw PrmError("domain", Print(*v) + " is not in the domain of " +
                                         t.name + "." + f.name);
          observed << pred << "_observed(" << k << ", V) :- !, V = "
                   << Print(*v) << ".\n";
          continue;
        }
        std::string value;
        if (v) {
          value = Print(*v);
        } else {
          value = fresh();
          out.cell_constants.push_back({t.name, k, f.name, value});
        }
        facts << pred << "(" << k << ", " << value << ").\n";
      }
    }
  }
  out.text = entities.str() + "\n" + facts.str() + "\n" + observed.str();
  return out;
}

PrmCompilation CompilePrm(const PrmSchema& schema, const Skeleton& skeleton) {
  PrmCompilation out;
  SkeletonFacts facts = CompileSkeleton(schema, skeleton);
  out.text = facts.text + "\n" + CompileSchemaText(schema);
  out.cell_constants = std::move(facts.cell_constants);
  ParseResult parsed = ParseProgram(out.text);
  if (!parsed.program || HasErrors(parsed.diagnostics)) {
    std::string msg = "compiled program does not parse";
    for (const Diagnostic& d : parsed.diagnostics) msg += "\n" + FormatDiagnostic(d);
    throw PrmError("internal", msg);
  }
  std::set<std::string> constants;
  for (const CellConstant& c : out.cell_constants) constants.insert(c.constant);
  out.program = Program(parsed.program->clauses(), std::move(constants));
  return out;
}

RoundTripReport RoundTripCheck(
    const PrmCompilation& compiled, const Program& reference,
    const std::vector<std::pair<std::string, std::string>>& queries,
    const SolveOptions& options) {
  auto first_marginal = [&](const Program& p, const std::string& text)
      -> std::optional<std::pair<std::vector<Term>, std::vector<double>>> {
    QueryResult q = ParseQuery(text);
    if (!q.query) throw PrmError("format", "cannot parse query " + text);
    std::vector<Answer> answers = Solve(p, *q.query, 1, options);
    if (answers.empty() || answers[0].query_nodes.empty()) return std::nullopt;
    const Answer& a = answers[0];
    Marginal m = ComputeMarginal(a.network, a.query_nodes[0].second);
    return std::make_pair(m.domain, m.probs);
  };
  RoundTripReport report;
  for (const auto& [cq, rq] : queries) {
    RoundTripEntry e;
    e.compiled_query = cq;
    e.reference_query = rq;
    auto a = first_marginal(compiled.program, cq);
    auto b = first_marginal(reference, rq);
    if (!a && !b) {
      e.both_failed = true;
    } else if (!a || !b || a->first.size() != b->first.size()) {
      e.difference = 1.0;
    } else {
      for (std::size_t i = 0; i < a->first.size(); ++i) {
        auto it = std::find(b->first.begin(), b->first.end(), a->first[i]);
        double other = it == b->first.end()
                           ? 0.0
                           : b->second[static_cast<std::size_t>(it - b->first.begin())];
        e.difference = std::max(e.difference, std::fabs(a->second[i] - other));
        if (it == b->first.end()) e.difference = 1.0;
      }
    }
    report.max_difference = std::max(report.max_difference, e.difference);
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace clpbn
