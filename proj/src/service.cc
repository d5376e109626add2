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

#include "sbfl/service.h"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "sbfl/error.h"
#include "sbfl/ingestion.h"

namespace sbfl {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[noreturn]] void Schema(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::kSchemaError, path + ": " + reason);
}

Json ParseJson(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    Schema(what, std::string("not valid JSON (") + e.what() + ")");
  }
}

const Json& Require(const Json& object, const std::string& key,
                    const std::string& where) {
  if (!object.is_object()) Schema(where, "expected an object");
  const auto it = object.find(key);
  if (it == object.end()) Schema(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

std::string RequireString(const Json& object, const std::string& key,
                          const std::string& where) {
  const Json& v = Require(object, key, where);
  if (!v.is_string()) Schema(where.empty() ? key : where + "." + key, "expected a string");
  return v.get<std::string>();
}

ElementKind RequireKind(const Json& object, const std::string& key,
                        const std::string& where) {
  const std::string text = RequireString(object, key, where);
  const auto kind = ParseKind(text);
  if (!kind) Schema(key, "unknown granularity '" + text + "'");
  return *kind;
}

TieBreak RequireTieBreak(const Json& object, const std::string& key,
                         const std::string& where) {
  const std::string text = RequireString(object, key, where);
  const auto tiebreak = ParseTieBreak(text);
  if (!tiebreak) Schema(key, "unknown tie-break '" + text + "'");
  return *tiebreak;
}

ElementId RequireElementId(const Json& value, const std::string& path) {
  if (!value.is_number_unsigned() || value.get<std::uint64_t>() > UINT32_MAX) {
    Schema(path, "expected an element id");
  }
  return ElementId{value.get<std::uint32_t>()};
}

Json MetricsJson(const BasicMetrics& m) {
  Json j;
  j["ef"] = m.ef;
  j["ep"] = m.ep;
  j["nf"] = m.nf;
  j["np"] = m.np;
  return j;
}

Json RankValue(double rank) {
  const auto whole = static_cast<std::int64_t>(rank);
  if (static_cast<double>(whole) == rank) return Json(whole);
  return Json(rank);
}

Json ActionJson(const FeedbackAction& a) {
  Json j;
  j["sequence"] = a.sequence;
  j["element"] = a.element.value;
  j["verdict"] = std::string(VerdictName(a.verdict));
  return j;
}

Json RankingObject(const Session& session, std::optional<std::size_t> limit) {
  const RankedReport& report = session.ranking();
  const Spectrum& spectrum = session.spectrum();

  std::unordered_map<ElementId, double> base;
  for (const RankedEntry& e : session.base_ranking().entries) {
    base.emplace(e.element, e.score);
  }

  Json j;
  j["formula"] = report.formula.name();
  j["granularity"] = std::string(KindName(report.granularity));
  j["tiebreak"] = std::string(TieBreakName(report.tiebreak));
  Json warnings = Json::array();
  if (report.no_failing_tests) warnings.push_back("no failing tests: every score is 0");
  j["warnings"] = warnings;
  j["concluded"] = session.concluded();
  j["pinned"] = session.pinned() ? Json(session.pinned()->value) : Json(nullptr);
  j["dirty"] = session.dirty();
  j["feedback_count"] = session.log().size();
  j["total"] = report.entries.size();

  Json entries = Json::array();
  const std::size_t count =
      limit ? std::min(*limit, report.entries.size()) : report.entries.size();
  for (std::size_t i = 0; i < count; ++i) {
    const RankedEntry& e = report.entries[i];
    const CodeElement& element = spectrum.element(e.element);
    const Rgb color = ColorScale(e.score);
    Json row;
    row["rank"] = RankValue(e.rank);
    row["element"] = e.element.value;
    row["name"] = element.name;
    row["kind"] = std::string(KindName(element.kind));
    row["path"] = element.location.path;
    row["start_line"] = element.location.start_line;
    row["end_line"] = element.location.end_line;
    row["score"] = e.score;
    row["base_score"] = base.at(e.element);
    row["multiplier"] = session.multiplier(e.element);
    row["tie_group"] = e.tie_group;
    row["color"] = Json::array({color.r, color.g, color.b});
    row["metrics"] = MetricsJson(e.metrics);
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

Json SessionObject(const std::string& id, const Session& session, std::uint64_t seed) {
  Json j;
  j["version"] = std::string(kSessionVersion);
  j["id"] = id;
  j["formula"] = session.formula().name();
  j["granularity"] = std::string(KindName(session.granularity()));
  j["tiebreak"] = std::string(TieBreakName(session.tiebreak()));
  j["seed"] = seed;
  j["dirty"] = session.dirty();
  Json log = Json::array();
  for (const FeedbackAction& a : session.log()) log.push_back(ActionJson(a));
  j["feedback"] = std::move(log);
  j["spectrum"] = Json::parse(ExportCanonical(session.spectrum(), session.call_graph()));
  return j;
}

std::uint64_t SeedOf(const Json& j) {
  const auto it = j.find("seed");
  if (it == j.end() || !it->is_number_unsigned()) Schema("session.seed", "expected unsigned integer");
  return it->get<std::uint64_t>();
}

std::unique_ptr<Session> SessionFromObject(const Json& j) {
  const std::string version = RequireString(j, "version", "session");
  if (version != kSessionVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported session version '" + version + "'");
  }
  SpectrumDocument doc = ParseCanonical(Require(j, "spectrum", "session").dump());
  auto session = std::make_unique<Session>(
      std::move(doc.spectrum),
      Formula::FromNameOrExpression(RequireString(j, "formula", "session")),
      RequireKind(j, "granularity", "session"),
      RequireTieBreak(j, "tiebreak", "session"), std::move(doc.call_graph));

  const Json& log = Require(j, "feedback", "session");
  if (!log.is_array()) Schema("session.feedback", "expected an array");
  for (std::size_t i = 0; i < log.size(); ++i) {
    const std::string where = "session.feedback[" + std::to_string(i) + "]";
    const Json& a = log[i];
    const Json& seq = Require(a, "sequence", where);
    if (!seq.is_number_unsigned()) Schema(where + ".sequence", "expected an integer");
    const std::string verdict_text = RequireString(a, "verdict", where);
    const auto verdict = ParseVerdict(verdict_text);
    if (!verdict) Schema(where + ".verdict", "unknown verdict '" + verdict_text + "'");
    session->ApplyFeedback(FeedbackAction{
        RequireElementId(Require(a, "element", where), where + ".element"),
        *verdict, seq.get<std::uint64_t>()});
  }
  if (const auto dirty = j.find("dirty"); dirty != j.end() && dirty->is_boolean() &&
                                          dirty->get<bool>()) {
    session->MarkDirty();
  }
  return session;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession: return 404;
    case ErrorCode::kSessionConcluded: return 409;
    default: return 400;
  }
}

HttpResponse ErrorResponse(int status, std::string_view kind, const std::string& message) {
  Json j;
  j["error"] = std::string(kind);
  j["message"] = message;
  return {status, j.dump(2) + "\n"};
}

std::vector<std::string_view> Segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) out.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

}  // namespace

std::string RankingJson(const Session& session, std::optional<std::size_t> limit) {
  return RankingObject(session, limit).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SessionStore

SessionStore::SessionStore(fs::path data_dir, std::uint64_t seed)
    : data_dir_(std::move(data_dir)), seed_(seed) {
  fs::create_directories(data_dir_ / "sessions");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data_dir_ / "sessions")) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    try {
      const Json j = ParseJson(ReadFile(file), file.filename().string());
      auto e = std::make_unique<Entry>();
      e->id = RequireString(j, "id", "session");
      if (e->id != file.stem().string()) {
        Schema("session.id", "does not match file name");
      }
      e->session = SessionFromObject(j);
      e->seed = SeedOf(j);
      entries_.emplace(e->id, std::move(e));
    } catch (const std::exception& ex) {
      load_warnings_.push_back(file.filename().string() + ": " + ex.what());
    }
  }
}

fs::path SessionStore::SessionPath(const std::string& id) const {
  return data_dir_ / "sessions" / (id + ".json");
}

SessionStore::Entry& SessionStore::Find(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + id + "'");
  }
  return *it->second;
}

std::string SessionStore::NextId() {
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, SplitMix64(seed_ + counter_++));
    if (!entries_.count(buf) && !fs::exists(SessionPath(buf))) return buf;
  }
}

void SessionStore::Persist(const Entry& entry) const {
  const fs::path path = SessionPath(entry.id);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << SessionObject(entry.id, *entry.session, entry.seed).dump(2) << "\n";
    out.flush();
    if (!out) {
      throw std::runtime_error("cannot write session file " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string SessionStore::Insert(std::unique_ptr<Session> session, std::uint64_t seed) {
  std::unique_lock lock(mu_);
  auto e = std::make_unique<Entry>();
  e->id = NextId();
  e->session = std::move(session);
  e->seed = seed;
  Persist(*e);
  const std::string id = e->id;
  entries_.emplace(id, std::move(e));
  return id;
}

std::string SessionStore::CreateSession(const CreateSessionRequest& request) {
  // Validate everything before an id is spent.
  Formula formula = Formula::FromNameOrExpression(request.formula);
  SpectrumDocument doc = ParseCanonical(request.spectrum_document);
  auto session = std::make_unique<Session>(std::move(doc.spectrum), std::move(formula),
                                           request.granularity, request.tiebreak,
                                           std::move(doc.call_graph));
  return Insert(std::move(session), seed_);
}

std::vector<std::string> SessionStore::SessionIds() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, unused] : entries_) out.push_back(id);
  return out;
}

std::string SessionStore::GetRanking(const std::string& id,
                                     std::optional<std::size_t> limit) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  return RankingJson(*e.session, limit);
}

std::string SessionStore::PostFeedback(const std::string& id, ElementId element,
                                       Verdict verdict) {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  e.session->ApplyFeedback(element, verdict);
  Persist(e);
  return RankingJson(*e.session);
}

std::string SessionStore::PostUndo(const std::string& id) {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  e.session->Undo();
  Persist(e);
  return RankingJson(*e.session);
}

std::string SessionStore::PostReanalyze(const std::string& id,
                                        const std::string& spectrum_document) {
  Entry& e = Find(id);
  SpectrumDocument doc = ParseCanonical(spectrum_document);
  std::lock_guard lock(e.mu);
  const auto skipped = e.session->Reanalyze(std::move(doc.spectrum),
                                            std::move(doc.call_graph));
  Persist(e);
  Json j = RankingObject(*e.session, std::nullopt);
  Json list = Json::array();
  for (const FeedbackAction& a : skipped) list.push_back(ActionJson(a));
  j["skipped"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string SessionStore::GetExplanation(const std::string& id, ElementId element) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  const Session& s = *e.session;
  const Explanation x = Explain(s.spectrum(), s.formula(), element);
  const CodeElement& code = s.spectrum().element(element);

  Json j;
  j["element"] = element.value;
  j["name"] = code.name;
  j["kind"] = std::string(KindName(code.kind));
  j["path"] = code.location.path;
  j["start_line"] = code.location.start_line;
  j["end_line"] = code.location.end_line;
  j["formula"] = s.formula().name();
  j["formula_text"] = x.formula_text;
  j["metrics"] = MetricsJson(x.metrics);
  j["trace"] = x.trace;
  j["score"] = x.score;
  j["multiplier"] = s.multiplier(element);
  j["adjusted_score"] = x.score * s.multiplier(element);
  Json failing = Json::array();
  for (TestId t : x.failing_tests) {
    Json row;
    row["id"] = t.value;
    row["name"] = s.spectrum().test(t).name;
    failing.push_back(std::move(row));
  }
  j["failing_tests"] = std::move(failing);
  j["passing_count"] = x.passing_count;
  j["aggregator"] = x.aggregator ? Json(std::string(AggregatorName(*x.aggregator)))
                                 : Json(nullptr);
  Json descendants = Json::array();
  for (const auto& [d, score] : x.descendants) {
    Json row;
    row["element"] = d.value;
    row["score"] = score;
    descendants.push_back(std::move(row));
  }
  j["descendants"] = std::move(descendants);
  j["note"] = x.note;
  return j.dump(2) + "\n";
}

std::string SessionStore::GetHierarchy(const std::string& id) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  const Session& s = *e.session;
  const Spectrum& spectrum = s.spectrum();

  std::unordered_map<ElementId, double> scores;
  auto collect = [&](const RankedReport& report) {
    for (const RankedEntry& r : report.entries) scores.emplace(r.element, r.score);
  };
  collect(s.ranking());
  for (int k = 0; k <= static_cast<int>(ElementKind::kPackage); ++k) {
    const auto kind = static_cast<ElementKind>(k);
    if (kind == s.granularity() || !spectrum.HasKind(kind)) continue;
    if (IsCoarser(kind, s.granularity())) {
      collect(Aggregate(s.ranking(), spectrum, kind));
    } else {
      try {
        collect(Rank(spectrum, s.formula(), kind, s.tiebreak()));
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kNoSuchGranularity) throw;
      }
    }
  }

  const auto& elements = spectrum.elements();
  std::function<Json(std::size_t)> node = [&](std::size_t index) {
    const CodeElement& c = elements[index];
    Json j;
    j["element"] = c.id.value;
    j["name"] = c.name;
    j["kind"] = std::string(KindName(c.kind));
    j["path"] = c.location.path;
    j["start_line"] = c.location.start_line;
    j["end_line"] = c.location.end_line;
    if (const auto it = scores.find(c.id); it != scores.end()) {
      const Rgb color = ColorScale(it->second);
      j["score"] = it->second;
      j["color"] = Json::array({color.r, color.g, color.b});
    } else {
      j["score"] = nullptr;
      j["color"] = nullptr;
    }
    Json children = Json::array();
    for (std::uint32_t child : spectrum.ChildrenOf(index)) children.push_back(node(child));
    j["children"] = std::move(children);
    return j;
  };
  Json roots = Json::array();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!elements[i].parent) roots.push_back(node(i));
  }
  Json j;
  j["granularity"] = std::string(KindName(s.granularity()));
  j["roots"] = std::move(roots);
  return j.dump(2) + "\n";
}

std::string SessionStore::ExportSession(const std::string& id) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  Json j;
  j["version"] = std::string(kSessionExportVersion);
  j["session"] = SessionObject(e.id, *e.session, e.seed);
  j["report"] = RankingObject(*e.session, std::nullopt);
  return j.dump(2) + "\n";
}

std::string SessionStore::ImportSession(const std::string& export_document) {
  const Json j = ParseJson(export_document, "export");
  const std::string version = RequireString(j, "version", "");
  if (version != kSessionExportVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported export version '" + version + "'");
  }
  const Json& object = Require(j, "session", "");
  auto session = SessionFromObject(object);
  if (RankingObject(*session, std::nullopt).dump() != Require(j, "report", "").dump()) {
    Schema("report", "does not match the replayed session");
  }
  return Insert(std::move(session), SeedOf(object));
}

// ---------------------------------------------------------------------------
// ServiceRouter

HttpResponse ServiceRouter::Handle(std::string_view method, std::string_view path,
                                   const std::map<std::string, std::string>& query,
                                   const std::string& body) {
  try {
    const auto seg = Segments(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto created = [](const std::string& id) {
      Json j;
      j["id"] = id;
      j["url"] = "/api/sessions/" + id;
      return HttpResponse{201, j.dump(2) + "\n"};
    };

    if (seg.size() == 2 && seg[0] == "api" && seg[1] == "formulas" && get) {
      Json list = Json::array();
      for (const BuiltinInfo& b : ListBuiltins()) {
        Json row;
        row["name"] = b.name;
        row["definition"] = b.definition;
        list.push_back(std::move(row));
      }
      return {200, list.dump(2) + "\n"};
    }
    if (seg.size() < 2 || seg[0] != "api" || seg[1] != "sessions") {
      return ErrorResponse(404, "NotFound", "no route for " + std::string(path));
    }
    if (seg.size() == 2 && post) {
      const Json j = ParseJson(body, "body");
      CreateSessionRequest request;
      request.spectrum_document = Require(j, "spectrum", "").dump();
      request.formula = RequireString(j, "formula", "");
      request.granularity = j.contains("granularity")
                                ? RequireKind(j, "granularity", "")
                                : ElementKind::kStatement;
      request.tiebreak = j.contains("tiebreak") ? RequireTieBreak(j, "tiebreak", "")
                                                : TieBreak::kLineAsc;
      return created(store_.CreateSession(request));
    }
    if (seg.size() == 2 && get) {
      Json ids = Json::array();
      for (const std::string& id : store_.SessionIds()) ids.push_back(id);
      return {200, ids.dump(2) + "\n"};
    }
    if (seg.size() == 3 && seg[2] == "import" && post) {
      return created(store_.ImportSession(body));
    }
    if (seg.size() >= 4) {
      const std::string id(seg[2]);
      const std::string_view op = seg[3];
      if (seg.size() == 4 && op == "ranking" && get) {
        std::optional<std::size_t> limit;
        if (const auto it = query.find("limit"); it != query.end()) {
          std::size_t n = 0;
          const auto& text = it->second;
          const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
          if (ec != std::errc() || ptr != text.data() + text.size()) {
            Schema("limit", "expected a non-negative integer");
          }
          limit = n;
        }
        return {200, store_.GetRanking(id, limit)};
      }
      if (seg.size() == 4 && op == "feedback" && post) {
        const Json j = ParseJson(body, "body");
        const std::string verdict_text = RequireString(j, "verdict", "");
        const auto verdict = ParseVerdict(verdict_text);
        if (!verdict) Schema("verdict", "unknown verdict '" + verdict_text + "'");
        return {200, store_.PostFeedback(
                         id, RequireElementId(Require(j, "element", ""), "element"),
                         *verdict)};
      }
      if (seg.size() == 4 && op == "undo" && post) {
        return {200, store_.PostUndo(id)};
      }
      if (seg.size() == 4 && op == "reanalyze" && post) {
        const Json j = ParseJson(body, "body");
        return {200, store_.PostReanalyze(id, Require(j, "spectrum", "").dump())};
      }
      if (seg.size() == 5 && op == "explanation" && get) {
        std::uint32_t element = 0;
        const auto text = seg[4];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), element);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
          Schema("element", "expected an element id");
        }
        return {200, store_.GetExplanation(id, ElementId{element})};
      }
      if (seg.size() == 4 && op == "hierarchy" && get) {
        return {200, store_.GetHierarchy(id)};
      }
      if (seg.size() == 4 && op == "export" && get) {
        return {200, store_.ExportSession(id)};
      }
    }
    return ErrorResponse(404, "NotFound",
                         "no route for " + std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return ErrorResponse(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "Internal", e.what());
  }
}

// ---------------------------------------------------------------------------
// HttpServer

struct HttpServer::Impl {
  explicit Impl(SessionStore& store) : router(store) {}
  ServiceRouter router;
  httplib::Server server;
};

HttpServer::HttpServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [key, value] : req.params) query.emplace(key, value);
    HttpResponse r = impl_->router.Handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

HttpServer::~HttpServer() = default;

bool HttpServer::Listen(const std::string& host, int port,
                        const std::function<void(int)>& on_ready) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) return false;
  } else if (!impl_->server.bind_to_port(host, port)) {
    return false;
  }
  if (on_ready) on_ready(bound);
  return impl_->server.listen_after_bind();
}

void HttpServer::Stop() { impl_->server.stop(); }

}  // namespace sbfl
