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

#include "sbfl/ranking.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "sbfl/error.h"

namespace sbfl {
namespace {

constexpr std::string_view kTieBreakNames[] = {"INPUT_ORDER", "NAME_ASC",
                                               "LINE_ASC", "AVERAGE_RANK"};
constexpr std::string_view kAggregatorNames[] = {"MAX", "MEAN", "SUM"};

template <typename Enum, std::size_t N>
std::optional<Enum> ParseName(std::string_view text,
                              const std::string_view (&names)[N]) {
  for (std::size_t i = 0; i < N; ++i) {
    if (text.size() != names[i].size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < text.size() && same; ++j) {
      same = std::toupper(static_cast<unsigned char>(text[j])) == names[i][j];
    }
    if (same) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

// Compares two element indices under a tie-break strategy; never uses score.
bool TieLess(const Spectrum& spectrum, TieBreak tiebreak, std::size_t a,
             std::size_t b) {
  const CodeElement& ea = spectrum.elements()[a];
  const CodeElement& eb = spectrum.elements()[b];
  switch (tiebreak) {
    case TieBreak::kNameAsc:
      if (ea.name != eb.name) return ea.name < eb.name;
      break;
    case TieBreak::kLineAsc:
      if (ea.location.path != eb.location.path) {
        return ea.location.path < eb.location.path;
      }
      if (ea.location.start_line != eb.location.start_line) {
        return ea.location.start_line < eb.location.start_line;
      }
      if (ea.location.end_line != eb.location.end_line) {
        return ea.location.end_line < eb.location.end_line;
      }
      break;
    case TieBreak::kInputOrder:
    case TieBreak::kAverageRank:
      break;
  }
  return a < b;
}

void AssignRanks(std::vector<RankedEntry>& entries, std::size_t first,
                 int first_group, TieBreak tiebreak) {
  int group = first_group;
  std::size_t i = first;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].score == entries[i].score) ++j;
    // Positions i+1 .. j (1-based); their mean is (i + 1 + j) / 2.
    const double average = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      entries[k].tie_group = group;
      entries[k].rank = tiebreak == TieBreak::kAverageRank
                            ? average
                            : static_cast<double>(k + 1);
    }
    ++group;
    i = j;
  }
}

std::vector<std::size_t> IndicesOfKind(const Spectrum& spectrum, ElementKind kind) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < spectrum.elements().size(); ++i) {
    if (spectrum.elements()[i].kind == kind) out.push_back(i);
  }
  return out;
}

[[noreturn]] void NoSuchGranularity(ElementKind kind, const std::string& why) {
  throw Error(ErrorCode::kNoSuchGranularity,
              "cannot rank at " + std::string(KindName(kind)) + ": " + why);
}

// Aggregate over `values` in order. MEAN is the left-to-right sum divided by
// the count; Explain() relies on this exact evaluation order.
double Combine(Aggregator aggregator, const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  switch (aggregator) {
    case Aggregator::kMax:
      return *std::max_element(values.begin(), values.end());
    case Aggregator::kSum:
      return std::accumulate(values.begin(), values.end(), 0.0);
    case Aggregator::kMean:
      return std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  }
  return 0.0;
}

// Shortest round-trip decimal, written so that the expression grammar (which
// has no unary minus) accepts it.
std::string FormatLiteral(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", std::fabs(v));
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", precision, std::fabs(v));
    if (std::strtod(shorter, nullptr) == std::fabs(v)) {
      std::snprintf(buf, sizeof(buf), "%s", shorter);
      break;
    }
  }
  return v < 0 ? "(0-" + std::string(buf) + ")" : std::string(buf);
}

std::string AggregateTrace(Aggregator aggregator, const std::vector<double>& values) {
  if (values.empty()) return "0";
  std::string out;
  switch (aggregator) {
    case Aggregator::kMax: {
      out = FormatLiteral(values.back());
      for (std::size_t i = values.size() - 1; i-- > 0;) {
        out = "max(" + FormatLiteral(values[i]) + ", " + out + ")";
      }
      return out;
    }
    case Aggregator::kSum:
    case Aggregator::kMean: {
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += " + ";
        out += FormatLiteral(values[i]);
      }
      if (aggregator == Aggregator::kMean) {
        out = "(" + out + ") / " + std::to_string(values.size());
      }
      return out;
    }
  }
  return out;
}

}  // namespace

std::string_view TieBreakName(TieBreak tiebreak) {
  return kTieBreakNames[static_cast<std::size_t>(tiebreak)];
}

std::optional<TieBreak> ParseTieBreak(std::string_view text) {
  return ParseName<TieBreak>(text, kTieBreakNames);
}

std::string_view AggregatorName(Aggregator aggregator) {
  return kAggregatorNames[static_cast<std::size_t>(aggregator)];
}

std::optional<Aggregator> ParseAggregator(std::string_view text) {
  return ParseName<Aggregator>(text, kAggregatorNames);
}

void OrderEntries(std::vector<RankedEntry>& entries, const Spectrum& spectrum,
                  TieBreak tiebreak, std::optional<ElementId> pinned) {
  std::vector<std::size_t> index(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    index[i] = spectrum.IndexOf(entries[i].element);
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool a_pinned = pinned && entries[a].element == *pinned;
    const bool b_pinned = pinned && entries[b].element == *pinned;
    if (a_pinned != b_pinned) return a_pinned;
    if (entries[a].score != entries[b].score) {
      return entries[a].score > entries[b].score;
    }
    return TieLess(spectrum, tiebreak, index[a], index[b]);
  });
  std::vector<RankedEntry> sorted;
  sorted.reserve(entries.size());
  for (std::size_t i : order) sorted.push_back(entries[i]);
  entries = std::move(sorted);

  if (pinned && !entries.empty() && entries.front().element == *pinned) {
    entries.front().rank = 1.0;
    entries.front().tie_group = 1;
    AssignRanks(entries, 1, 2, tiebreak);
  } else {
    AssignRanks(entries, 0, 1, tiebreak);
  }
}

RankedReport Rank(const Spectrum& spectrum, const Formula& formula,
                  ElementKind granularity, TieBreak tiebreak) {
  const auto finest = spectrum.FinestKind();
  if (!spectrum.HasKind(granularity)) {
    NoSuchGranularity(granularity, "no element of that kind");
  }
  if (granularity != *finest) {
    // Score where the coverage lives, then lift.
    RankedReport base = Rank(spectrum, formula, *finest, tiebreak);
    return Aggregate(base, spectrum, granularity, Aggregator::kMax);
  }

  RankedReport report;
  report.formula = formula;
  report.granularity = granularity;
  report.tiebreak = tiebreak;
  report.no_failing_tests = spectrum.failing_count() == 0;

  const Totals totals = spectrum.totals();
  const auto& elements = spectrum.elements();
  const auto& rows = spectrum.element_rows();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].kind != granularity) continue;
    RankedEntry entry;
    entry.element = elements[i].id;
    const auto executed = static_cast<std::uint32_t>(rows.Count(i));
    entry.metrics.ef =
        static_cast<std::uint32_t>(rows.CountAnd(i, spectrum.failing_mask()));
    entry.metrics.ep = executed - entry.metrics.ef;
    entry.metrics.nf = totals.failing - entry.metrics.ef;
    entry.metrics.np = totals.passing - entry.metrics.ep;
    entry.score =
        report.no_failing_tests ? 0.0 : formula.Evaluate(entry.metrics, totals);
    report.entries.push_back(entry);
  }
  OrderEntries(report.entries, spectrum, tiebreak);
  return report;
}

RankedReport Aggregate(const RankedReport& report, const Spectrum& spectrum,
                       ElementKind target, Aggregator aggregator) {
  if (!IsCoarser(target, report.granularity)) {
    throw Error(ErrorCode::kNotCoarser,
                std::string(KindName(target)) + " is not coarser than " +
                    std::string(KindName(report.granularity)));
  }
  if (!spectrum.HasKind(target)) {
    NoSuchGranularity(target, "no element of that kind");
  }

  std::unordered_map<ElementId, double> scores;
  scores.reserve(report.entries.size());
  for (const RankedEntry& e : report.entries) scores.emplace(e.element, e.score);

  RankedReport out;
  out.formula = report.formula;
  out.granularity = target;
  out.tiebreak = report.tiebreak;
  out.no_failing_tests = report.no_failing_tests;

  std::vector<double> values;
  for (std::size_t i : IndicesOfKind(spectrum, target)) {
    const CodeElement& element = spectrum.elements()[i];
    values.clear();
    for (ElementId d : Descendants(spectrum, element.id, report.granularity)) {
      const auto it = scores.find(d);
      if (it != scores.end()) values.push_back(it->second);
    }
    RankedEntry entry;
    entry.element = element.id;
    entry.score = Combine(aggregator, values);
    entry.metrics = ComputeBasicMetrics(spectrum, element.id);
    out.entries.push_back(entry);
  }
  OrderEntries(out.entries, spectrum, out.tiebreak);
  return out;
}

Explanation Explain(const Spectrum& spectrum, const Formula& formula,
                    ElementId element, Aggregator aggregator) {
  const CodeElement& target = spectrum.element(element);
  const ElementKind finest = *spectrum.FinestKind();
  const Totals totals = spectrum.totals();

  Explanation out;
  out.element = element;
  out.metrics = ComputeBasicMetrics(spectrum, element);
  out.formula_text = formula.text();
  for (TestId t : spectrum.CoveringTests(element)) {
    if (spectrum.test(t).outcome == Outcome::kFail) {
      out.failing_tests.push_back(t);
    } else {
      ++out.passing_count;
    }
  }

  if (spectrum.failing_count() == 0) {
    out.trace = "0";
    out.score = 0.0;
    out.note = "no failing tests: every score is 0";
    return out;
  }

  if (target.kind == finest) {
    out.trace = formula.Substitute(out.metrics, totals);
    out.score = formula.Evaluate(out.metrics, totals);
    return out;
  }

  out.aggregator = aggregator;
  std::vector<double> values;
  for (ElementId d : Descendants(spectrum, element, finest)) {
    const double score = formula.Evaluate(ComputeBasicMetrics(spectrum, d), totals);
    out.descendants.emplace_back(d, score);
    values.push_back(score);
  }
  out.score = Combine(aggregator, values);
  out.trace = AggregateTrace(aggregator, values);
  if (values.empty()) {
    out.note = "no " + std::string(KindName(finest)) + " descendants";
  }
  return out;
}

Rgb ColorScale(double score) {
  const double s = std::isnan(score) ? 0.0 : std::clamp(score, 0.0, 1.0);
  return Rgb{static_cast<std::uint8_t>(std::lround(220.0 * s)),
             static_cast<std::uint8_t>(std::lround(200.0 * (1.0 - s))), 0};
}

}  // namespace sbfl
