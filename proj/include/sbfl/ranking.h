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

// Ranked suspiciousness reports.
//
// Coverage is scored at the finest element kind present in the spectrum
// (normally statements). Reports at a coarser kind are always derived by
// aggregating those scores up the element hierarchy, never by re-counting
// coverage at the coarse kind.

#ifndef SBFL_RANKING_H_
#define SBFL_RANKING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbfl/formula.h"
#include "sbfl/spectrum.h"

namespace sbfl {

enum class TieBreak { kInputOrder, kNameAsc, kLineAsc, kAverageRank };
enum class Aggregator { kMax, kMean, kSum };

std::string_view TieBreakName(TieBreak tiebreak);
std::optional<TieBreak> ParseTieBreak(std::string_view text);
std::string_view AggregatorName(Aggregator aggregator);
std::optional<Aggregator> ParseAggregator(std::string_view text);

struct RankedEntry {
  ElementId element;
  double score = 0.0;
  // 1..n by position, except under kAverageRank where every member of a tie
  // group carries the mean of the group's positions.
  double rank = 0.0;
  // The element's own coverage counts.
  BasicMetrics metrics;
  // 1-based; consecutive entries with exactly equal scores share a group.
  int tie_group = 0;
  bool operator==(const RankedEntry&) const = default;
};

struct RankedReport {
  std::vector<RankedEntry> entries;
  Formula formula;
  ElementKind granularity = ElementKind::kStatement;
  TieBreak tiebreak = TieBreak::kLineAsc;
  // Set when the spectrum has no failing test; every score is then 0.
  bool no_failing_tests = false;
};

// Sorts by non-increasing score, breaking ties per `tiebreak`, then assigns
// ranks and tie groups. A `pinned` element is moved to the front as its own
// group with rank 1.
void OrderEntries(std::vector<RankedEntry>& entries, const Spectrum& spectrum,
                  TieBreak tiebreak,
                  std::optional<ElementId> pinned = std::nullopt);

// One entry per element of `granularity`. Throws kNoSuchGranularity when the
// spectrum has no element of that kind, or the kind is finer than anything
// coverage was recorded for.
RankedReport Rank(const Spectrum& spectrum, const Formula& formula,
                  ElementKind granularity,
                  TieBreak tiebreak = TieBreak::kLineAsc);

// Lifts `report` to the coarser `target` kind: each target element scores the
// aggregate of its report-kind descendants (0 when it has none). Throws
// kNotCoarser, or kNoSuchGranularity when `target` is absent.
RankedReport Aggregate(const RankedReport& report, const Spectrum& spectrum,
                       ElementKind target,
                       Aggregator aggregator = Aggregator::kMax);

struct Explanation {
  ElementId element;
  BasicMetrics metrics;
  std::string formula_text;
  // An expression with no terminals that evaluates to `score` exactly. For an
  // element scored directly it is the formula with values substituted; for a
  // coarser element it is the aggregate over its descendants' scores.
  std::string trace;
  double score = 0.0;
  std::vector<TestId> failing_tests;
  std::size_t passing_count = 0;
  // Set for aggregated elements: the scored descendants and their scores.
  std::optional<Aggregator> aggregator;
  std::vector<std::pair<ElementId, double>> descendants;
  std::string note;
};

// Throws kUnknownElement, or kNoSuchGranularity for an element finer than the
// spectrum's scored kind.
Explanation Explain(const Spectrum& spectrum, const Formula& formula,
                    ElementId element, Aggregator aggregator = Aggregator::kMax);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

// Green (0,200,0) at 0 to red (220,0,0) at 1, linear; input clamped to [0,1].
Rgb ColorScale(double score);

}  // namespace sbfl

#endif  // SBFL_RANKING_H_
