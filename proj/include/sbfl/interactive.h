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

// Interactive fault localization: developer verdicts adjust per-element
// multipliers over a fixed base ranking.
//
// Update rule (call-graph edges are treated as undirected, radius 2):
//   NOT_FAULTY          element -> 0;   neighbor at h hops *= 0.5^h
//   SUSPICIOUS_CONTEXT  element *= 2;   neighbor at h hops *= 1 + 0.5^h
//   FAULT_FOUND         element pinned to rank 1; session concluded
//
// The multipliers are a pure function of the feedback log, so undo and
// reanalysis are implemented as a replay from scratch.

#ifndef SBFL_INTERACTIVE_H_
#define SBFL_INTERACTIVE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "sbfl/call_graph.h"
#include "sbfl/formula.h"
#include "sbfl/ranking.h"
#include "sbfl/spectrum.h"

namespace sbfl {

enum class Verdict { kNotFaulty, kSuspiciousContext, kFaultFound };

std::string_view VerdictName(Verdict verdict);
std::optional<Verdict> ParseVerdict(std::string_view text);

struct FeedbackAction {
  ElementId element;
  Verdict verdict = Verdict::kNotFaulty;
  std::uint64_t sequence = 0;
  bool operator==(const FeedbackAction&) const = default;
};

inline constexpr double kHopDecay = 0.5;
inline constexpr int kPropagationRadius = 2;

// Single writer. Copy the ranking to hand a snapshot to readers.
class Session {
 public:
  Session(Spectrum spectrum, Formula formula, ElementKind granularity,
          TieBreak tiebreak, std::optional<CallGraph> call_graph = std::nullopt);

  const RankedReport& ranking() const { return ranking_; }
  const RankedReport& base_ranking() const { return base_; }

  // Appends with the next sequence number. Throws kUnknownElement when the
  // element is not at the session granularity, kSessionConcluded after
  // FAULT_FOUND.
  const RankedReport& ApplyFeedback(ElementId element, Verdict verdict);
  // As above with an explicit sequence, which must exceed the last one.
  const RankedReport& ApplyFeedback(const FeedbackAction& action);

  // Drops the last action and replays the rest. Throws kEmptyLog.
  const RankedReport& Undo();

  // Swaps in a new spectrum and replays the log against it. Actions whose
  // element no longer exists at the session granularity are removed from the
  // log and returned. Without `call_graph`, the current graph is kept minus
  // edges that no longer resolve.
  std::vector<FeedbackAction> Reanalyze(
      Spectrum spectrum, std::optional<CallGraph> call_graph = std::nullopt);

  void MarkDirty() { dirty_ = true; }
  bool dirty() const { return dirty_; }

  const std::vector<FeedbackAction>& log() const { return log_; }
  // Only elements whose multiplier differs from 1 are listed.
  const std::map<ElementId, double>& multipliers() const { return multipliers_; }
  double multiplier(ElementId element) const;
  bool concluded() const { return pinned_.has_value(); }
  std::optional<ElementId> pinned() const { return pinned_; }

  const Spectrum& spectrum() const { return spectrum_; }
  const Formula& formula() const { return formula_; }
  ElementKind granularity() const { return granularity_; }
  TieBreak tiebreak() const { return tiebreak_; }
  const std::optional<CallGraph>& call_graph() const { return call_graph_; }

 private:
  void Validate(const FeedbackAction& action) const;
  void ApplyMultipliers(const FeedbackAction& action);
  void Replay();
  void Rerank();

  Spectrum spectrum_;
  Formula formula_;
  ElementKind granularity_;
  TieBreak tiebreak_;
  std::optional<CallGraph> call_graph_;

  std::vector<FeedbackAction> log_;
  std::map<ElementId, double> multipliers_;
  std::optional<ElementId> pinned_;
  bool dirty_ = false;

  RankedReport base_;
  RankedReport ranking_;
};

}  // namespace sbfl

#endif  // SBFL_INTERACTIVE_H_
