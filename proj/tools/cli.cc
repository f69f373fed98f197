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


#include "clpbn/cli.h"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clpbn/engine.h"
#include "clpbn/inference.h"
#include "clpbn/learn.h"
#include "clpbn/prm.h"
#include "clpbn/syntax.h"
#include "json.hpp"

namespace clpbn {

namespace {

using nlohmann::json;

struct Exit {
  int code;
};

struct Flags {
  std::string format = "text";
  std::uint64_t seed = 0;
  std::size_t limit = 1;
  std::size_t depth = 10'000;
  double tolerance = 1e-6;
  CLI::Option* seed_option = nullptr;

  bool json() const { return format == "json"; }
  SolveOptions solve() const {
    SolveOptions o;
    o.depth_limit = depth;
    return o;
  }
  GroundOptions ground() const {
    GroundOptions g;
    g.solve = solve();
    return g;
  }
};

class Session {
 public:
  Session(std::istream& in, std::ostream& out, std::ostream& err)
      : in_(in), out_(out), err_(err) {}

  std::string ReadFile(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      err_ << "error: cannot read " << path << "\n";
      throw Exit{kExitUsage};
    }
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  }

  json DiagnosticJson(const Diagnostic& d) {
    return {{"code", d.code},
            {"severity", d.is_error() ? "error" : "warning"},
            {"clause", d.clause},
            {"line", d.pos.line},
            {"column", d.pos.column},
            {"message", d.message}};
  }

  // Parses and validates; prints warnings and errors, and exits 2 on errors.
  Program LoadProgram(const std::string& path, const Flags& f) {
    ParseResult parsed = ParseProgram(ReadFile(path));
    std::vector<Diagnostic> ds = parsed.diagnostics;
    if (parsed.program) {
      ValidateOptions vo;
      vo.tolerance = f.tolerance;
      for (Diagnostic& d : Validate(*parsed.program, vo)) ds.push_back(std::move(d));
    }
    for (const Diagnostic& d : ds) err_ << path << ": " << FormatDiagnostic(d) << "\n";
    if (!parsed.program || HasErrors(ds)) throw Exit{kExitInvalid};
    return *parsed.program;
  }

  Population LoadPopulation(const std::string& path) {
    if (path.empty()) return {};
    std::vector<Diagnostic> ds;
    auto pop = ParsePopulation(ReadFile(path), &ds);
    for (const Diagnostic& d : ds) err_ << path << ": " << FormatDiagnostic(d) << "\n";
    if (!pop || HasErrors(ds)) throw Exit{kExitInvalid};
    return *pop;
  }

  SampleSet LoadSamples(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      err_ << "error: cannot read " << path << "\n";
      throw Exit{kExitUsage};
    }
    return ReadSamplesCsv(f);
  }

  Query ParseGoal(const std::string& text) {
    QueryResult q = ParseQuery(text);
    for (const Diagnostic& d : q.diagnostics) err_ << FormatDiagnostic(d) << "\n";
    if (!q.query) throw Exit{kExitUsage};
    return *q.query;
  }

  // Solves and prints up to `limit` answers; false when there are none.
  bool RunQuery(const Program& p, const Query& q, const Flags& f) {
    Solver solver(p, q, f.solve());
    json answers = json::array();
    std::ostringstream text;
    std::size_t count = 0;
    while (f.limit == 0 || count < f.limit) {
      std::optional<Answer> a = solver.Next();
      if (!a) break;
      if (count > 0) text << "\n";
      ++count;
      json bindings = json::object();
      json marginals = json::object();
      std::vector<std::string> constrained;
      for (const auto& [name, id] : a->query_nodes) constrained.push_back(name);
      for (const auto& [name, t] : a->bindings) {
        if (t.is_var()) continue;
        if (std::find(constrained.begin(), constrained.end(), name) !=
            constrained.end())
          continue;
        bindings[name] = FormatTerm(t);
        text << name << " = " << FormatTerm(t) << "\n";
      }
      for (const auto& [name, id] : a->query_nodes) {
        Marginal m = ComputeMarginal(a->network, id);
        marginals[name] = MarginalToJson(a->network, m);
        text << name << " ~ " << FormatMarginal(a->network, m) << "\n";
      }
      if (bindings.empty() && marginals.empty()) text << "yes\n";
      answers.push_back({{"bindings", bindings}, {"marginals", marginals}});
    }
    if (f.json()) {
      out_ << json{{"answers", answers}}.dump(2) << "\n";
    } else if (count == 0) {
      out_ << "no\n";
    } else {
      out_ << text.str();
    }
    return count > 0;
  }

  int Check(const std::string& path, const Flags& f) {
    ParseResult parsed = ParseProgram(ReadFile(path));
    std::vector<Diagnostic> ds = parsed.diagnostics;
    if (parsed.program) {
      ValidateOptions vo;
      vo.tolerance = f.tolerance;
      for (Diagnostic& d : Validate(*parsed.program, vo)) ds.push_back(std::move(d));
    }
    std::size_t errors = 0;
    for (const Diagnostic& d : ds) errors += d.is_error() ? 1 : 0;
    if (f.json()) {
      json list = json::array();
      for (const Diagnostic& d : ds) list.push_back(DiagnosticJson(d));
      out_ << json{{"diagnostics", list},
                   {"errors", errors},
                   {"warnings", ds.size() - errors}}
                  .dump(2)
           << "\n";
    } else {
      for (const Diagnostic& d : ds) err_ << path << ": " << FormatDiagnostic(d) << "\n";
      out_ << errors << " error(s), " << ds.size() - errors << " warning(s)\n";
    }
    return errors > 0 ? kExitInvalid : kExitOk;
  }

  int QueryCommand(const std::string& path, const std::string& goal, const Flags& f) {
    Program p = LoadProgram(path, f);
    return RunQuery(p, ParseGoal(goal), f) ? kExitOk : kExitFailure;
  }

  int Sample(const std::string& path, const std::string& pop_path,
             std::size_t n, const Flags& f) {
    Program p = LoadProgram(path, f);
    ConstraintNetwork net = GroundProgram(p, LoadPopulation(pop_path), f.ground());
    SampleTable samples = SampleNetwork(net, n, f.seed);
    if (f.json()) {
      SampleSet s = ToSampleSet(net, samples);
      out_ << json{{"columns", s.columns}, {"rows", s.rows}}.dump() << "\n";
    } else {
      WriteSamplesCsv(out_, net, samples);
    }
    return kExitOk;
  }

  int Ground(const std::string& path, const std::string& pop_path,
             bool permissive, const Flags& f) {
    Program p = LoadProgram(path, f);
    GroundOptions g = f.ground();
    g.permissive = permissive;
    out_ << NetworkToJson(GroundProgram(p, LoadPopulation(pop_path), g)).dump(2)
         << "\n";
    return kExitOk;
  }

  int CompilePrmCommand(const std::string& schema_path,
                        const std::string& skeleton_path, const Flags& f) {
    json schema, skeleton;
    try {
      schema = json::parse(ReadFile(schema_path));
      skeleton = json::parse(ReadFile(skeleton_path));
    } catch (const json::exception& e) {
      err_ << "error: " << e.what() << "\n";
      throw Exit{kExitInvalid};
    }
    PrmCompilation c = CompilePrm(ParseSchema(schema), ParseSkeleton(skeleton));
    if (f.json()) {
      json cells = json::array();
      for (const CellConstant& k : c.cell_constants)
        cells.push_back({{"table", k.table},
                         {"key", k.key},
                         {"field", k.field},
                         {"constant", k.constant}});
      out_ << json{{"program", c.text}, {"cell_constants", cells}}.dump(2) << "\n";
    } else {
      out_ << c.text;
    }
    return kExitOk;
  }

  int Fit(const std::string& path, const std::string& pop_path,
          const std::string& samples_path, double alpha, const Flags& f) {
    Program p = LoadProgram(path, f);
    FitOptions o;
    o.alpha = alpha;
    o.ground = f.ground();
    FitResult r = FitCpts(p, LoadPopulation(pop_path), LoadSamples(samples_path), o);
    if (f.json()) {
      json tables = json::array();
      for (const FittedTable& t : r.tables) {
        std::vector<std::string> domain;
        for (const Term& v : t.key.domain) domain.push_back(FormatTerm(v));
        tables.push_back({{"clause", t.key.owner.clause},
                          {"constraint", t.key.owner.constraint},
                          {"domain", domain},
                          {"parent_sizes", t.key.parent_sizes},
                          {"nodes", t.labels},
                          {"counts", t.counts},
                          {"table", t.table}});
      }
      out_ << json{{"program", FormatProgram(r.program)}, {"tables", tables}}.dump(2)
           << "\n";
    } else {
      out_ << FormatProgram(r.program);
    }
    return kExitOk;
  }

  int Score(const std::string& path, const std::string& pop_path,
            const std::string& samples_path, const Flags& f) {
    Program p = LoadProgram(path, f);
    BicScore b = ScoreBic(p, LoadPopulation(pop_path), LoadSamples(samples_path),
                          f.ground());
    if (f.json()) {
      out_ << json{{"bic", b.score},
                   {"log_likelihood", b.log_likelihood},
                   {"parameters", b.parameters},
                   {"rows", b.rows}}
                  .dump(2)
           << "\n";
    } else {
      out_ << "bic " << FormatNumber(b.score) << "\n"
           << "log_likelihood " << FormatNumber(b.log_likelihood) << "\n"
           << "parameters " << b.parameters << "\n"
           << "rows " << b.rows << "\n";
    }
    return kExitOk;
  }

  int Compare(const std::string& learned, const std::string& truth,
              const std::string& pop_path, const Flags& f) {
    Program a = LoadProgram(learned, f);
    Program b = LoadProgram(truth, f);
    StructureReport r = CompareStructures(a, b, LoadPopulation(pop_path), f.ground());
    json j = StructureReportToJson(r);
    if (f.json()) {
      out_ << j.dump(2) << "\n";
    } else {
      for (const auto& [k, v] : j.items())
        out_ << k << " " << FormatNumber(v.get<double>()) << "\n";
    }
    return kExitOk;
  }

  int Agree(const std::string& path, const std::string& goal,
            const std::string& pop_path, const Flags& f) {
    Program p = LoadProgram(path, f);
    AgreementReport r =
        AgreementCheck(p, ParseGoal(goal), LoadPopulation(pop_path), f.solve());
    if (f.json()) {
      out_ << AgreementToJson(r).dump(2) << "\n";
    } else {
      for (const AgreementEntry& e : r.entries) {
        out_ << e.variable << " ~ " << e.label << ":";
        for (std::size_t i = 0; i < e.proof.domain.size(); ++i)
          out_ << " " << FormatTerm(e.proof.domain[i]) << "="
               << FormatNumber(e.proof.probs[i]) << "/"
               << FormatNumber(e.ground.probs[i]);
        out_ << " difference " << FormatNumber(e.difference) << "\n";
      }
      out_ << "max difference " << FormatNumber(r.max_difference) << "\n";
    }
    return r.max_difference <= 1e-9 ? kExitOk : kExitFailure;
  }

  int RemoveCyclesCommand(const std::string& path, const std::string& pop_path,
                          const std::string& samples_path, bool random,
                          const Flags& f) {
    Program p = LoadProgram(path, f);
    CycleRemovalOptions o;
    o.random = random;
    o.seed = f.seed;
    o.ground = f.ground();
    CycleRemoval r =
        RemoveCycles(p, LoadPopulation(pop_path), LoadSamples(samples_path), o);
    if (f.json()) {
      json steps = json::array();
      for (const RemovalStep& s : r.steps)
        steps.push_back({{"clause", s.owner.clause},
                         {"constraint", s.owner.constraint},
                         {"parent", s.parent},
                         {"parent_name", s.parent_name},
                         {"bic", s.score}});
      out_ << json{{"program", FormatProgram(r.program)},
                   {"steps", steps},
                   {"bic", r.score}}
                  .dump(2)
           << "\n";
    } else {
      for (const RemovalStep& s : r.steps)
        err_ << "removed parent " << s.parent_name << " of clause "
             << s.owner.clause << " (bic " << FormatNumber(s.score) << ")\n";
      out_ << FormatProgram(r.program);
    }
    return kExitOk;
  }

  int Repl(const std::string& path, const Flags& f) {
    Program p = LoadProgram(path, f);
    std::string buffer, line;
    err_ << "?- " << std::flush;
    while (std::getline(in_, line)) {
      buffer += line + "\n";
      std::string trimmed = buffer;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
      if (trimmed.empty()) {
        buffer.clear();
        err_ << "?- " << std::flush;
        continue;
      }
      if (trimmed.back() != '.') {
        err_ << "|  " << std::flush;
        continue;
      }
      buffer.clear();
      if (trimmed == "halt." || trimmed == "?- halt.") return kExitOk;
      try {
        QueryResult q = ParseQuery(trimmed);
        for (const Diagnostic& d : q.diagnostics) err_ << FormatDiagnostic(d) << "\n";
        if (q.query) RunQuery(p, *q.query, f);
      } catch (const std::exception& e) {
        ReportError(e);
      }
      err_ << "?- " << std::flush;
    }
    return kExitOk;
  }

  // Prints a library error and returns its exit status.
  int ReportError(const std::exception& e) {
    std::string code = "error";
    int status = kExitFailure;
    if (auto* x = dynamic_cast<const InferenceError*>(&e)) {
      code = x->code();
    } else if (auto* x2 = dynamic_cast<const EngineError*>(&e)) {
      code = x2->code();
    } else if (auto* x3 = dynamic_cast<const NetworkError*>(&e)) {
      code = x3->code();
    } else if (auto* x4 = dynamic_cast<const LearnError*>(&e)) {
      code = x4->code();
    } else if (auto* x5 = dynamic_cast<const PrmError*>(&e)) {
      code = x5->code();
      status = kExitInvalid;
    } else if (dynamic_cast<const LimitExceeded*>(&e)) {
      code = "limit-exceeded";
    }
    err_ << "error[" << code << "]: " << e.what() << "\n";
    return status;
  }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
};

void AddFlags(CLI::App* sub, Flags& f) {
  sub->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  f.seed_option = sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--limit", f.limit, "Maximum number of answers (0 for all)");
  sub->add_option("--depth", f.depth, "Maximum resolution depth");
  sub->add_option("--tolerance", f.tolerance,
                  "Allowed deviation of a CPT column sum from 1");
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic logic programs with Bayesian network constraints",
               "clpbn"};
  app.require_subcommand(1);

  // Each subcommand owns its flags so that they may follow the subcommand.
  std::vector<Flags> flags(11);
  std::string program, program2, goal, population, samples, schema, skeleton;
  std::size_t count = 0;
  double alpha = 1.0;
  bool permissive = false, random = false;

  auto* check = app.add_subcommand("check", "Validate a program");
  check->add_option("program", program)->required();
  AddFlags(check, flags[0]);

  auto* query = app.add_subcommand("query", "Answer a query with marginals");
  query->add_option("program", program)->required();
  query->add_option("-q,--query", goal, "Goal, terminated by '.'")->required();
  AddFlags(query, flags[1]);

  auto* sample = app.add_subcommand("sample", "Draw samples of the ground network");
  sample->add_option("program", program)->required();
  sample->add_option("-n", count, "Number of samples")->required();
  sample->add_option("--population", population, "Facts and root queries");
  AddFlags(sample, flags[2]);
  flags[2].seed_option->required();

  auto* ground = app.add_subcommand("ground", "Print the ground network as JSON");
  ground->add_option("program", program)->required();
  ground->add_option("--population", population, "Facts and root queries");
  ground->add_flag("--permissive", permissive, "Allow cycles");
  AddFlags(ground, flags[3]);

  auto* compile = app.add_subcommand("compile-prm", "Compile a relational model");
  compile->add_option("--schema", schema)->required();
  compile->add_option("--skeleton", skeleton)->required();
  AddFlags(compile, flags[4]);

  auto* fit = app.add_subcommand("fit", "Fit CPTs from samples");
  fit->add_option("program", program)->required();
  fit->add_option("--samples", samples, "Samples CSV")->required();
  fit->add_option("--population", population, "Facts and root queries");
  fit->add_option("--alpha", alpha, "Pseudo-count per table entry");
  AddFlags(fit, flags[5]);

  auto* score = app.add_subcommand("score", "BIC score of a program on samples");
  score->add_option("program", program)->required();
  score->add_option("--samples", samples, "Samples CSV")->required();
  score->add_option("--population", population, "Facts and root queries");
  AddFlags(score, flags[6]);

  auto* compare = app.add_subcommand("compare", "Compare two network structures");
  compare->add_option("learned", program)->required();
  compare->add_option("truth", program2)->required();
  compare->add_option("--population", population, "Facts and root queries");
  AddFlags(compare, flags[7]);

  auto* agree = app.add_subcommand(
      "agree", "Compare query marginals with the full ground network");
  agree->add_option("program", program)->required();
  agree->add_option("-q,--query", goal, "Goal, terminated by '.'")->required();
  agree->add_option("--population", population, "Facts and root queries");
  AddFlags(agree, flags[8]);

  auto* repl = app.add_subcommand("repl", "Interactive queries");
  repl->add_option("program", program)->required();
  AddFlags(repl, flags[9]);

  auto* cycles = app.add_subcommand("remove-cycles",
                                    "Delete parents until the grounding is acyclic");
  cycles->add_option("program", program)->required();
  cycles->add_option("--samples", samples, "Samples CSV")->required();
  cycles->add_option("--population", population, "Facts and root queries");
  cycles->add_flag("--random", random, "Delete random cycle edges");
  AddFlags(cycles, flags[10]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int status = app.exit(e, out, err);
    return status == 0 ? kExitOk : kExitUsage;
  }

  Session s(in, out, err);
  try {
    if (check->parsed()) return s.Check(program, flags[0]);
    if (query->parsed()) return s.QueryCommand(program, goal, flags[1]);
    if (sample->parsed()) return s.Sample(program, population, count, flags[2]);
    if (ground->parsed()) return s.Ground(program, population, permissive, flags[3]);
    if (compile->parsed()) return s.CompilePrmCommand(schema, skeleton, flags[4]);
    if (fit->parsed()) return s.Fit(program, population, samples, alpha, flags[5]);
    if (score->parsed()) return s.Score(program, population, samples, flags[6]);
    if (compare->parsed()) return s.Compare(program, program2, population, flags[7]);
    if (agree->parsed()) return s.Agree(program, goal, population, flags[8]);
    if (repl->parsed()) return s.Repl(program, flags[9]);
    if (cycles->parsed())
      return s.RemoveCyclesCommand(program, population, samples, random, flags[10]);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    return s.ReportError(e);
  }
  return kExitUsage;
}

}  // namespace clpbn
