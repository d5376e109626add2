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

#include "sbfl/interactive.h"

#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include "sbfl/error.h"

namespace sbfl {
namespace {

constexpr std::string_view kVerdictNames[] = {"NOT_FAULTY", "SUSPICIOUS_CONTEXT",
                                              "FAULT_FOUND"};

}  // namespace

std::string_view VerdictName(Verdict verdict) {
  return kVerdictNames[static_cast<std::size_t>(verdict)];
}

std::optional<Verdict> ParseVerdict(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kVerdictNames); ++i) {
    const auto name = kVerdictNames[i];
    if (name.size() != text.size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < name.size() && same; ++j) {
      same = std::toupper(static_cast<unsigned char>(text[j])) == name[j];
    }
    if (same) return static_cast<Verdict>(i);
  }
  return std::nullopt;
}

Session::Session(Spectrum spectrum, Formula formula, ElementKind granularity,
                 TieBreak tiebreak, std::optional<CallGraph> call_graph)
    : spectrum_(std::move(spectrum)),
      formula_(std::move(formula)),
      granularity_(granularity),
      tiebreak_(tiebreak),
      call_graph_(std::move(call_graph)) {
  if (call_graph_) call_graph_->Validate(spectrum_);
  base_ = Rank(spectrum_, formula_, granularity_, tiebreak_);
  Rerank();
}

double Session::multiplier(ElementId element) const {
  const auto it = multipliers_.find(element);
  return it == multipliers_.end() ? 1.0 : it->second;
}

void Session::Validate(const FeedbackAction& action) const {
  if (pinned_) {
    throw Error(ErrorCode::kSessionConcluded,
                "session concluded: fault found at element " +
                    std::to_string(pinned_->value));
  }
  if (!spectrum_.Contains(action.element) ||
      spectrum_.element(action.element).kind != granularity_) {
    throw Error(ErrorCode::kUnknownElement,
                "no " + std::string(KindName(granularity_)) + " element with id " +
                    std::to_string(action.element.value));
  }
  if (!log_.empty() && action.sequence <= log_.back().sequence) {
    throw Error(ErrorCode::kInvalidArgument,
                "feedback sequence " + std::to_string(action.sequence) +
                    " does not follow " + std::to_string(log_.back().sequence));
  }
}

void Session::ApplyMultipliers(const FeedbackAction& action) {
  auto scale = [&](ElementId id, double factor) {
    auto [it, inserted] = multipliers_.emplace(id, 1.0);
    it->second *= factor;
  };
  std::vector<std::pair<ElementId, int>> neighbors;
  if (call_graph_ && action.verdict != Verdict::kFaultFound) {
    neighbors = call_graph_->Neighborhood(action.element, kPropagationRadius);
  }
  switch (action.verdict) {
    case Verdict::kNotFaulty:
      multipliers_[action.element] = 0.0;
      for (const auto& [id, hops] : neighbors) scale(id, std::pow(kHopDecay, hops));
      break;
    case Verdict::kSuspiciousContext:
      scale(action.element, 2.0);
      for (const auto& [id, hops] : neighbors) {
        scale(id, 1.0 + std::pow(kHopDecay, hops));
      }
      break;
    case Verdict::kFaultFound:
      pinned_ = action.element;
      break;
  }
}

void Session::Replay() {
  multipliers_.clear();
  pinned_.reset();
  for (const FeedbackAction& action : log_) ApplyMultipliers(action);
  Rerank();
}

void Session::Rerank() {
  ranking_ = base_;
  for (RankedEntry& entry : ranking_.entries) {
    entry.score *= multiplier(entry.element);
  }
  OrderEntries(ranking_.entries, spectrum_, tiebreak_, pinned_);
}

const RankedReport& Session::ApplyFeedback(ElementId element, Verdict verdict) {
  const std::uint64_t next = log_.empty() ? 1 : log_.back().sequence + 1;
  return ApplyFeedback(FeedbackAction{element, verdict, next});
}

const RankedReport& Session::ApplyFeedback(const FeedbackAction& action) {
  Validate(action);
  log_.push_back(action);
  ApplyMultipliers(action);
  Rerank();
  return ranking_;
}

const RankedReport& Session::Undo() {
  if (log_.empty()) throw Error(ErrorCode::kEmptyLog, "nothing to undo");
  log_.pop_back();
  Replay();
  return ranking_;
}

std::vector<FeedbackAction> Session::Reanalyze(Spectrum spectrum,
                                               std::optional<CallGraph> call_graph) {
  if (call_graph) {
    call_graph->Validate(spectrum);
  } else if (call_graph_) {
    call_graph = call_graph_->RestrictedTo(spectrum);
  }
  // Rank first so a failure leaves the session untouched.
  RankedReport base = Rank(spectrum, formula_, granularity_, tiebreak_);
  spectrum_ = std::move(spectrum);
  call_graph_ = std::move(call_graph);
  base_ = std::move(base);

  std::vector<FeedbackAction> kept;
  std::vector<FeedbackAction> skipped;
  for (const FeedbackAction& action : log_) {
    const bool present = spectrum_.Contains(action.element) &&
                         spectrum_.element(action.element).kind == granularity_;
    (present ? kept : skipped).push_back(action);
  }
  log_ = std::move(kept);
  dirty_ = false;
  Replay();
  return skipped;
}

}  // namespace sbfl
