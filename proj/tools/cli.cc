// Copyright 2026 The SBFL Engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sbfl/elo.h"
#include "sbfl/error.h"
#include "sbfl/formula.h"
#include "sbfl/ingestion.h"
#include "sbfl/interactive.h"
#include "sbfl/ranking.h"
#include "sbfl/service.h"
#include "sbfl/spectrum.h"

namespace sbfl {
namespace {

namespace fs = std::filesystem;

// Raised for bad flag combinations the parser cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string spectrum;
  std::string coverage;
  std::string tests;
  std::string formula = "OCHIAI";
  std::string granularity;
  std::string tiebreak = "LINE_ASC";
};

struct LoadedInput {
  Spectrum spectrum;
  std::optional<CallGraph> call_graph;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kInvalidArgument, path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFileAtomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out.flush()) throw std::runtime_error(tmp + ": write failed");
  }
  fs::rename(tmp, path);
}

// Re-raises a library error with the file it came from.
template <typename Fn>
auto WithFile(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(path + ": ", 0) == 0) throw;
    throw Error(e.code(), path + ": " + what);
  }
}

void AddInputFlags(CLI::App& cmd, InputOptions& opt) {
  cmd.add_option("--spectrum", opt.spectrum, "Canonical spectrum document");
  cmd.add_option("--coverage", opt.coverage,
                 "Manifest of '<test name>\\t<lcov file>' lines");
  cmd.add_option("--tests", opt.tests, "JUnit XML report");
  cmd.add_option("--formula", opt.formula, "Built-in name or expression")
      ->capture_default_str();
  cmd.add_option("--granularity", opt.granularity,
                 "STATEMENT, METHOD, CLASS, FILE or PACKAGE (default: finest present)");
  cmd.add_option("--tiebreak", opt.tiebreak,
                 "INPUT_ORDER, NAME_ASC, LINE_ASC or AVERAGE_RANK")
      ->capture_default_str();
}

LoadedInput LoadInput(const InputOptions& opt, std::ostream& err) {
  const bool have_spectrum = !opt.spectrum.empty();
  const bool have_coverage = !opt.coverage.empty() || !opt.tests.empty();
  if (have_spectrum == have_coverage) {
    throw UsageError("give exactly one of --spectrum or --coverage with --tests");
  }
  if (have_spectrum) {
    SpectrumDocument doc =
        WithFile(opt.spectrum, [&] { return ParseCanonical(ReadFile(opt.spectrum)); });
    for (const std::string& w : doc.warnings) err << "warning: " << opt.spectrum << ": " << w << "\n";
    return {std::move(doc.spectrum), std::move(doc.call_graph)};
  }
  if (opt.coverage.empty() || opt.tests.empty()) {
    throw UsageError("--coverage and --tests must be given together");
  }

  const auto tests = WithFile(opt.tests, [&] { return ParseJUnit(ReadFile(opt.tests)); });
  const auto manifest =
      WithFile(opt.coverage, [&] { return ParseManifest(ReadFile(opt.coverage)); });
  const fs::path base = fs::path(opt.coverage).parent_path();
  std::vector<std::pair<std::string, LcovCoverage>> streams;
  for (const ManifestEntry& entry : manifest) {
    fs::path lcov = entry.lcov_path;
    if (lcov.is_relative()) lcov = base / lcov;
    const std::string path = lcov.string();
    streams.emplace_back(entry.test_name,
                         WithFile(path, [&] { return ParseLcov(ReadFile(path)); }));
  }
  AssembledSpectrum assembled = AssembleSpectrum(tests, streams);
  for (const std::string& w : assembled.warnings) err << "warning: " << w << "\n";
  return {std::move(assembled.spectrum), std::nullopt};
}

ElementKind ResolveGranularity(const InputOptions& opt, const Spectrum& spectrum) {
  if (opt.granularity.empty()) {
    const auto finest = spectrum.FinestKind();
    if (!finest) throw Error(ErrorCode::kNoSuchGranularity, "spectrum has no elements");
    return *finest;
  }
  const auto kind = ParseKind(opt.granularity);
  if (!kind) throw UsageError("unknown granularity '" + opt.granularity + "'");
  return *kind;
}

TieBreak ResolveTieBreak(const InputOptions& opt) {
  const auto tiebreak = ParseTieBreak(opt.tiebreak);
  if (!tiebreak) throw UsageError("unknown tie-break '" + opt.tiebreak + "'");
  return *tiebreak;
}

Formula ResolveFormula(const InputOptions& opt) {
  try {
    return Formula::FromNameOrExpression(opt.formula);
  } catch (const Error& e) {
    throw Error(e.code(), "--formula: " + std::string(e.what()));
  }
}

std::string Location(const SourceLocation& loc) {
  if (loc.start_line <= 0) return loc.path;
  std::string out = loc.path + ":" + std::to_string(loc.start_line);
  if (loc.end_line != loc.start_line) out += "-" + std::to_string(loc.end_line);
  return out;
}

std::string Fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string RankText(double rank) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", rank);
  return buf;
}

void PrintTable(const RankedReport& report, const Spectrum& spectrum,
                std::size_t count, std::ostream& out) {
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"rank", "score", "element", "location"});
  for (std::size_t i = 0; i < count; ++i) {
    const RankedEntry& e = report.entries[i];
    const CodeElement& el = spectrum.element(e.element);
    rows.push_back({RankText(e.rank), Fixed4(e.score), el.name, Location(el.location)});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
}

int CmdRank(const InputOptions& opt, std::optional<std::size_t> top,
            const std::string& format, std::ostream& out, std::ostream& err) {
  const Formula formula = ResolveFormula(opt);
  const TieBreak tiebreak = ResolveTieBreak(opt);
  LoadedInput input = LoadInput(opt, err);
  const ElementKind granularity = ResolveGranularity(opt, input.spectrum);
  if (input.spectrum.failing_count() == 0) {
    err << "warning: no failing tests; every score is 0\n";
  }

  if (format == "canonical") {
    const Session session(std::move(input.spectrum), formula, granularity, tiebreak,
                          std::move(input.call_graph));
    out << RankingJson(session, top);
    return kExitOk;
  }
  const RankedReport report = Rank(input.spectrum, formula, granularity, tiebreak);
  const std::size_t count =
      top ? std::min(*top, report.entries.size()) : report.entries.size();
  PrintTable(report, input.spectrum, count, out);
  return kExitOk;
}

int CmdExplain(const InputOptions& opt, const std::string& name, std::ostream& out,
               std::ostream& err) {
  const Formula formula = ResolveFormula(opt);
  const LoadedInput input = LoadInput(opt, err);
  const Spectrum& spectrum = input.spectrum;

  std::optional<ElementId> target;
  for (const CodeElement& el : spectrum.elements()) {
    if (el.name != name) continue;
    if (target) {
      throw Error(ErrorCode::kInvalidArgument, "element name '" + name + "' is ambiguous");
    }
    target = el.id;
  }
  if (!target) throw Error(ErrorCode::kUnknownElement, "no element named '" + name + "'");

  const Explanation x = Explain(spectrum, formula, *target);
  const CodeElement& el = spectrum.element(*target);
  const Totals totals = spectrum.totals();
  out << "element:  " << el.name << " (" << KindName(el.kind) << ") "
      << Location(el.location) << "\n";
  out << "formula:  " << formula.name();
  if (formula.builtin()) out << " = " << x.formula_text;
  out << "\n";
  out << "metrics:  ef=" << x.metrics.ef << " ep=" << x.metrics.ep
      << " nf=" << x.metrics.nf << " np=" << x.metrics.np << "  (F=" << totals.failing
      << " P=" << totals.passing << ")\n";
  if (x.aggregator) {
    out << "aggregate: " << AggregatorName(*x.aggregator) << " over "
        << x.descendants.size() << " element(s)\n";
    for (const auto& [id, score] : x.descendants) {
      out << "  " << spectrum.element(id).name << "  " << Fixed4(score) << "\n";
    }
  }
  out << "trace:    " << x.trace << "\n";
  out << "score:    " << Fixed4(x.score) << "\n";
  out << "failing tests covering it (" << x.failing_tests.size() << "):\n";
  for (TestId t : x.failing_tests) out << "  " << spectrum.test(t).name << "\n";
  out << "passing tests covering it: " << x.passing_count << "\n";
  if (!x.note.empty()) out << "note:     " << x.note << "\n";
  return kExitOk;
}

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void StopServer(int) {
  if (HttpServer* s = g_server.load()) s->Stop();
}

int CmdServe(std::string data_dir, int port, const std::string& host,
             std::ostream& out, std::ostream& err) {
  if (data_dir.empty()) {
    if (const char* env = std::getenv("SBFL_DATA_DIR")) data_dir = env;
  }
  if (data_dir.empty()) throw UsageError("--data-dir is required (or set SBFL_DATA_DIR)");

  SessionStore store(data_dir);
  for (const std::string& w : store.load_warnings()) err << "warning: " << w << "\n";
  HttpServer server(store);
  g_server = &server;
  auto old_int = std::signal(SIGINT, StopServer);
  auto old_term = std::signal(SIGTERM, StopServer);
  const bool ok = server.Listen(host, port, [&](int bound) {
    out << "serving " << data_dir << " on http://" << host << ":" << bound << std::endl;
  });
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  g_server = nullptr;
  if (!ok) {
    err << "sbfl: cannot listen on " << host << ":" << port << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

EloPool LoadPool(const std::string& path) {
  return WithFile(path, [&] { return EloPool::Parse(ReadFile(path)); });
}

int CmdEloInit(const std::string& pool_path, const std::string& items_path,
               const EloParams& params, std::ostream& out) {
  EloPool pool(params);
  std::istringstream items(ReadFile(items_path));
  std::string line;
  while (std::getline(items, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    pool.AddItem(line);
  }
  WriteFileAtomic(pool_path, pool.Serialize());
  out << "created " << pool_path << " with " << pool.items().size() << " item(s)\n";
  return kExitOk;
}

void PrintStandings(const EloPool& pool, std::ostream& out) {
  int place = 0;
  for (const Standing& s : pool.Standings()) {
    char rating[64];
    std::snprintf(rating, sizeof(rating), "%.2f", s.rating);
    out << ++place << "\t" << rating << "\t" << s.matches_played << "\t"
        << pool.item(s.id).label << "\n";
  }
}

int CmdEloVote(const std::string& pool_path, std::istream& in, std::ostream& out,
               std::ostream& err) {
  EloPool pool = LoadPool(pool_path);
  pool.NextPair();  // Fails early on pools too small to vote.
  std::string line;
  for (;;) {
    const auto [a, b] = pool.NextPair();
    out << "[a] " << pool.item(a).label << "\n[b] " << pool.item(b).label
        << "\nwhich is better? (a/b/draw, q to stop): " << std::flush;
    if (!std::getline(in, line)) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    MatchResult result;
    if (line == "a") {
      result = MatchResult::kWinA;
    } else if (line == "b") {
      result = MatchResult::kWinB;
    } else if (line == "draw" || line == "d") {
      result = MatchResult::kDraw;
    } else if (line == "q") {
      break;
    } else {
      err << "answer a, b, draw or q\n";
      continue;
    }
    pool.RecordMatch(a, b, result);
    WriteFileAtomic(pool_path, pool.Serialize());
  }
  out << "\n";
  PrintStandings(pool, out);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Spectrum-based fault localization engine", "sbfl"};
  app.require_subcommand(1);

  InputOptions rank_opt;
  std::optional<std::size_t> top;
  std::string format = "table";
  CLI::App* rank = app.add_subcommand("rank", "Rank code elements by suspiciousness");
  AddInputFlags(*rank, rank_opt);
  rank->add_option("--top", top, "Print only the first n entries");
  rank->add_option("--format", format, "table or canonical")
      ->check(CLI::IsMember({"table", "canonical"}))
      ->capture_default_str();

  InputOptions explain_opt;
  std::string element_name;
  CLI::App* explain = app.add_subcommand("explain", "Explain one element's score");
  AddInputFlags(*explain, explain_opt);
  explain->add_option("--element", element_name, "Element name")->required();

  std::string data_dir;
  int port = 8080;
  std::string host = "127.0.0.1";
  CLI::App* serve = app.add_subcommand("serve", "Run the session service");
  serve->add_option("--data-dir", data_dir, "Session directory (default: $SBFL_DATA_DIR)");
  serve->add_option("--port", port, "TCP port, 0 for any")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();

  std::string pool_path;
  std::string items_path;
  EloParams params;
  CLI::App* elo = app.add_subcommand("elo", "Pairwise Elo voting");
  elo->add_option("--pool", pool_path, "Pool file")->required();
  elo->require_subcommand(1);
  CLI::App* init = elo->add_subcommand("init", "Create a pool from an items file");
  init->add_option("--items", items_path, "One label per line")->required();
  init->add_option("--seed", params.seed, "Matchmaking seed")->capture_default_str();
  init->add_option("--k", params.k, "Update factor K")->capture_default_str();
  init->add_option("--c", params.c, "Logistic scale c")->capture_default_str();
  CLI::App* vote = elo->add_subcommand("vote", "Vote on pairs read from standard input");
  CLI::App* standings = elo->add_subcommand("standings", "Print current standings");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*rank) return CmdRank(rank_opt, top, format, out, err);
    if (*explain) return CmdExplain(explain_opt, element_name, out, err);
    if (*serve) return CmdServe(data_dir, port, host, out, err);
    if (*init) return CmdEloInit(pool_path, items_path, params, out);
    if (*vote) return CmdEloVote(pool_path, in, out, err);
    if (*standings) {
      PrintStandings(LoadPool(pool_path), out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "sbfl: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "sbfl: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sbfl: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace sbfl
