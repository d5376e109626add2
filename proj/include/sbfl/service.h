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

// Local session service.
//
// Sessions are persisted as replayable logs, one JSON file per session under
// <data dir>/sessions/<id>.json, rewritten atomically after every mutating
// request. Loading a file replays its feedback log over the embedded spectrum.
//
// HTTP routes (JSON bodies; spectra use the canonical document layout):
//
//   POST /api/sessions                       create   -> 201 {"id", "url"}
//   GET  /api/sessions                       list ids
//   POST /api/sessions/import                import an export -> 201 {"id", "url"}
//   GET  /api/sessions/<id>/ranking[?limit=n]
//   POST /api/sessions/<id>/feedback         {"element", "verdict"}
//   POST /api/sessions/<id>/undo
//   POST /api/sessions/<id>/reanalyze        {"spectrum"}
//   GET  /api/sessions/<id>/explanation/<element id>
//   GET  /api/sessions/<id>/export
//   GET  /api/formulas                       built-in catalog
//
// Status codes: 200/201 success, 400 validation, 404 unknown session or
// route, 409 feedback on a concluded session, 500 anything unexpected.

#ifndef SBFL_SERVICE_H_
#define SBFL_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sbfl/interactive.h"
#include "sbfl/ranking.h"

namespace sbfl {

inline constexpr std::string_view kSessionVersion = "sbfl-session/1";
inline constexpr std::string_view kSessionExportVersion = "sbfl-session-export/1";

struct CreateSessionRequest {
  // Canonical spectrum document text.
  std::string spectrum_document;
  // Built-in name or expression.
  std::string formula;
  ElementKind granularity = ElementKind::kStatement;
  TieBreak tiebreak = TieBreak::kLineAsc;
};

// Thread-safe. Requests on one session are serialized; different sessions
// proceed in parallel. All returned strings are JSON.
class SessionStore {
 public:
  // Creates <data_dir>/sessions if needed and loads every session found
  // there. Ids for new sessions derive from `seed`.
  explicit SessionStore(std::filesystem::path data_dir, std::uint64_t seed = 0);

  std::string CreateSession(const CreateSessionRequest& request);
  std::vector<std::string> SessionIds() const;

  std::string GetRanking(const std::string& id,
                         std::optional<std::size_t> limit = std::nullopt) const;
  std::string PostFeedback(const std::string& id, ElementId element, Verdict verdict);
  std::string PostUndo(const std::string& id);
  std::string PostReanalyze(const std::string& id, const std::string& spectrum_document);
  std::string GetExplanation(const std::string& id, ElementId element) const;
  // Every element as a tree following parent links, roots in registry order.
  // Session-granularity nodes carry their adjusted score, coarser nodes the
  // MAX over it, finer nodes their unadjusted score (null when unscorable).
  std::string GetHierarchy(const std::string& id) const;
  // Self-contained: session state, spectrum, log and the current report.
  std::string ExportSession(const std::string& id) const;
  // Replays an export into a new session. The replayed report must match the
  // exported one (kSchemaError otherwise). Returns the new id.
  std::string ImportSession(const std::string& export_document);

  // Problems met while loading sessions from disk; those files are skipped.
  const std::vector<std::string>& load_warnings() const { return load_warnings_; }
  std::filesystem::path SessionPath(const std::string& id) const;

 private:
  struct Entry {
    std::mutex mu;
    std::string id;
    std::unique_ptr<Session> session;
    std::uint64_t seed = 0;
  };

  Entry& Find(const std::string& id) const;
  std::string NextId();
  std::string Insert(std::unique_ptr<Session> session, std::uint64_t seed);
  void Persist(const Entry& entry) const;

  std::filesystem::path data_dir_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
  std::vector<std::string> load_warnings_;
};

// Serialized report as served by the ranking endpoints. `limit` truncates the
// entry list; "total" still counts every entry.
std::string RankingJson(const Session& session,
                        std::optional<std::size_t> limit = std::nullopt);

struct HttpResponse {
  int status = 200;
  std::string body;
};

// Routes one request to the store; no network involved.
class ServiceRouter {
 public:
  explicit ServiceRouter(SessionStore& store) : store_(store) {}

  HttpResponse Handle(std::string_view method, std::string_view path,
                      const std::map<std::string, std::string>& query,
                      const std::string& body);

 private:
  SessionStore& store_;
};

// Blocks serving HTTP on host:port until Stop() is called from another
// thread. `on_ready` runs once the socket is bound, with the bound port.
class HttpServer {
 public:
  explicit HttpServer(SessionStore& store);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port. Returns false if binding failed.
  bool Listen(const std::string& host, int port,
              const std::function<void(int)>& on_ready = {});
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sbfl

#endif  // SBFL_SERVICE_H_
