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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "sbfl/error.h"
#include "test_support.h"

namespace sbfl {
namespace {

using testing::ThrownCode;

const Formula kOchiai = Formula::FromBuiltin(Builtin::kOchiai);

// Methods m1..m4 (ids 1..4), each with one statement (ids 11..14). One
// failing test covers all four statements; one passing test covers s13 and
// s14, so m1 and m2 lead the base ranking.
Spectrum Methods() {
  std::vector<CodeElement> el;
  for (std::uint32_t i = 1; i <= 4; ++i) {
    el.push_back({ElementId{i}, "m" + std::to_string(i), ElementKind::kMethod,
                  {"a.c", static_cast<int>(10 * i), static_cast<int>(10 * i + 5)}, std::nullopt});
  }
  for (std::uint32_t i = 1; i <= 4; ++i) {
    el.push_back({ElementId{10 + i}, "s" + std::to_string(10 + i), ElementKind::kStatement,
                  {"a.c", static_cast<int>(10 * i + 1), static_cast<int>(10 * i + 1)},
                  ElementId{i}});
  }
  std::vector<TestCase> tests = {{TestId{1}, "f", Outcome::kFail},
                                 {TestId{2}, "p", Outcome::kPass}};
  std::vector<CoveragePair> pairs;
  for (std::uint32_t i = 11; i <= 14; ++i) pairs.push_back({TestId{1}, ElementId{i}});
  pairs.push_back({TestId{2}, ElementId{13}});
  pairs.push_back({TestId{2}, ElementId{14}});
  return Spectrum::Build(std::move(el), std::move(tests), pairs);
}

// m1 -> m2 -> m3; m4 isolated.
CallGraph Chain() {
  CallGraph g;
  g.AddEdge(ElementId{1}, ElementId{2});
  g.AddEdge(ElementId{2}, ElementId{3});
  return g;
}

Session MethodSession() {
  return Session(Methods(), kOchiai, ElementKind::kMethod, TieBreak::kLineAsc, Chain());
}

TEST(SessionTest, EmptyLogEqualsPlainRanking) {
  const Session s = MethodSession();
  const RankedReport r = Rank(Methods(), kOchiai, ElementKind::kMethod, TieBreak::kLineAsc);
  EXPECT_EQ(s.ranking().entries, r.entries);
  EXPECT_EQ(s.base_ranking().entries, r.entries);
  EXPECT_FALSE(s.concluded());
}

TEST(SessionTest, NotFaultyDropsToBottomAndDecaysNeighbors) {
  Session s = MethodSession();
  ASSERT_EQ(s.ranking().entries[0].element, ElementId{1});
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  EXPECT_EQ(s.multiplier(ElementId{1}), 0.0);
  EXPECT_EQ(s.multiplier(ElementId{2}), 0.5);
  EXPECT_EQ(s.multiplier(ElementId{3}), 0.25);
  EXPECT_EQ(s.multiplier(ElementId{4}), 1.0);
  const auto& entries = s.ranking().entries;
  EXPECT_EQ(entries.back().element, ElementId{1});
  EXPECT_EQ(entries.back().score, 0.0);
  EXPECT_EQ(entries.back().tie_group, entries[entries.size() - 2].tie_group + 1);
}

TEST(SessionTest, SuspiciousContextBoostsNeighbors) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{1}, Verdict::kSuspiciousContext);
  EXPECT_EQ(s.multiplier(ElementId{1}), 2.0);
  EXPECT_EQ(s.multiplier(ElementId{2}), 1.5);
  EXPECT_EQ(s.multiplier(ElementId{3}), 1.25);
}

TEST(SessionTest, IsolatedElementOnlyChangesItself) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{4}, Verdict::kSuspiciousContext);
  EXPECT_EQ(s.multipliers(), (std::map<ElementId, double>{{ElementId{4}, 2.0}}));
}

TEST(SessionTest, MultipliersCompose) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{2}, Verdict::kSuspiciousContext);
  s.ApplyFeedback(ElementId{3}, Verdict::kSuspiciousContext);
  EXPECT_DOUBLE_EQ(s.multiplier(ElementId{2}), 2.0 * 1.5);
  EXPECT_DOUBLE_EQ(s.multiplier(ElementId{3}), 1.5 * 2.0);
  EXPECT_DOUBLE_EQ(s.multiplier(ElementId{1}), 1.5 * 1.25);
}

TEST(SessionTest, FeedbackNeverChangesBaseScores) {
  Session s = MethodSession();
  const auto base = s.base_ranking().entries;
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  s.ApplyFeedback(ElementId{3}, Verdict::kSuspiciousContext);
  EXPECT_EQ(s.base_ranking().entries, base);
}

TEST(SessionTest, FaultFoundPinsAndConcludes) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{4}, Verdict::kFaultFound);
  EXPECT_TRUE(s.concluded());
  EXPECT_EQ(s.pinned(), ElementId{4});
  EXPECT_EQ(s.ranking().entries[0].element, ElementId{4});
  EXPECT_EQ(s.ranking().entries[0].rank, 1.0);
  EXPECT_EQ(ThrownCode([&] { s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty); }),
            ErrorCode::kSessionConcluded);
  s.Undo();
  EXPECT_FALSE(s.concluded());
}

TEST(SessionTest, RejectsBadActions) {
  Session s = MethodSession();
  EXPECT_EQ(ThrownCode([&] { s.ApplyFeedback(ElementId{99}, Verdict::kNotFaulty); }),
            ErrorCode::kUnknownElement);
  // Registered, but not at the session granularity.
  EXPECT_EQ(ThrownCode([&] { s.ApplyFeedback(ElementId{11}, Verdict::kNotFaulty); }),
            ErrorCode::kUnknownElement);
  s.ApplyFeedback(FeedbackAction{ElementId{1}, Verdict::kNotFaulty, 10});
  EXPECT_EQ(ThrownCode([&] {
              s.ApplyFeedback(FeedbackAction{ElementId{2}, Verdict::kNotFaulty, 10});
            }),
            ErrorCode::kInvalidArgument);
  s.ApplyFeedback(ElementId{2}, Verdict::kNotFaulty);
  EXPECT_EQ(s.log().back().sequence, 11u);
  EXPECT_EQ(s.log().size(), 2u);
}

TEST(SessionTest, UndoRestoresPreviousState) {
  Session s = MethodSession();
  EXPECT_EQ(ThrownCode([&] { s.Undo(); }), ErrorCode::kEmptyLog);
  const RankedReport initial = s.ranking();
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  s.Undo();
  EXPECT_EQ(s.ranking().entries, initial.entries);
  EXPECT_TRUE(s.multipliers().empty());

  s.ApplyFeedback(ElementId{2}, Verdict::kSuspiciousContext);
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  s.Undo();
  Session fresh = MethodSession();
  fresh.ApplyFeedback(ElementId{2}, Verdict::kSuspiciousContext);
  EXPECT_EQ(s.ranking().entries, fresh.ranking().entries);
  EXPECT_EQ(s.multipliers(), fresh.multipliers());
}

TEST(SessionTest, ReanalyzeIdenticalSpectrum) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  s.MarkDirty();
  const RankedReport before = s.ranking();
  EXPECT_TRUE(s.Reanalyze(Methods()).empty());
  EXPECT_EQ(s.ranking().entries, before.entries);
  EXPECT_FALSE(s.dirty());
  EXPECT_EQ(s.log().size(), 1u);
}

TEST(SessionTest, ReanalyzeSkipsRemovedElements) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{4}, Verdict::kNotFaulty);
  s.ApplyFeedback(ElementId{3}, Verdict::kSuspiciousContext);

  // Same spectrum without m4 and its statement.
  const Spectrum full = Methods();
  std::vector<CodeElement> el;
  for (const CodeElement& c : full.elements()) {
    if (c.id != ElementId{4} && c.id != ElementId{14}) el.push_back(c);
  }
  std::vector<CoveragePair> pairs;
  for (const CoveragePair& p : full.CoveragePairs()) {
    if (p.element != ElementId{14}) pairs.push_back(p);
  }
  const Spectrum smaller = Spectrum::Build(el, full.tests(), pairs);
  const auto skipped = s.Reanalyze(smaller);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_EQ(skipped[0].element, ElementId{4});
  EXPECT_EQ(s.log().size(), 1u);
  EXPECT_EQ(s.multiplier(ElementId{3}), 2.0);
  EXPECT_EQ(s.ranking().entries.size(), 3u);
}

TEST(SessionTest, ReanalyzeWithFlippedOutcome) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{2}, Verdict::kSuspiciousContext);
  const Spectrum full = Methods();
  std::vector<TestCase> tests = full.tests();
  tests[1].outcome = Outcome::kFail;
  const auto pairs = full.CoveragePairs();
  const Spectrum flipped = Spectrum::Build(full.elements(), tests, pairs);
  s.Reanalyze(flipped);
  const RankedReport scratch = Rank(flipped, kOchiai, ElementKind::kMethod);
  EXPECT_EQ(s.base_ranking().entries, scratch.entries);
  for (const RankedEntry& e : s.ranking().entries) {
    const auto it = std::find_if(scratch.entries.begin(), scratch.entries.end(),
                                 [&](const RankedEntry& b) { return b.element == e.element; });
    EXPECT_DOUBLE_EQ(e.score, it->score * s.multiplier(e.element));
  }
}

TEST(SessionTest, FailedReanalyzeLeavesSessionAlone) {
  Session s = MethodSession();
  s.ApplyFeedback(ElementId{1}, Verdict::kNotFaulty);
  const RankedReport before = s.ranking();
  // No METHOD elements at all.
  EXPECT_EQ(ThrownCode([&] { s.Reanalyze(testing::Worked()); }),
            ErrorCode::kNoSuchGranularity);
  EXPECT_EQ(s.ranking().entries, before.entries);
  EXPECT_EQ(s.log().size(), 1u);
  EXPECT_EQ(s.spectrum().elements().size(), Methods().elements().size());
}

TEST(SessionTest, NamesForVerdicts) {
  EXPECT_EQ(VerdictName(Verdict::kSuspiciousContext), "SUSPICIOUS_CONTEXT");
  EXPECT_EQ(ParseVerdict("not_faulty"), Verdict::kNotFaulty);
  EXPECT_FALSE(ParseVerdict("MAYBE").has_value());
}

// Random method-level sessions over random trees with random call graphs.
TEST(SessionTest, StepwiseEqualsReplayOnRandomSessions) {
  std::mt19937 rng(61);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    const Spectrum spectrum = testing::RandomTree(rng);
    std::vector<ElementId> methods;
    for (const CodeElement& c : spectrum.elements()) {
      if (c.kind == ElementKind::kMethod) methods.push_back(c.id);
    }
    CallGraph graph;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      graph.AddEdge(methods[rng() % methods.size()], methods[rng() % methods.size()]);
    }
    Session live(spectrum, kOchiai, ElementKind::kMethod, TieBreak::kLineAsc, graph);
    const std::size_t steps = rng() % 21;
    std::set<ElementId> rejected;
    for (std::size_t i = 0; i < steps && !live.concluded(); ++i) {
      const unsigned roll = rng() % 20;
      const Verdict v = roll == 0  ? Verdict::kFaultFound
                        : roll < 11 ? Verdict::kNotFaulty
                                    : Verdict::kSuspiciousContext;
      const ElementId target = methods[rng() % methods.size()];
      live.ApplyFeedback(target, v);
      if (v == Verdict::kNotFaulty) rejected.insert(target);
    }

    Session replay(spectrum, kOchiai, ElementKind::kMethod, TieBreak::kLineAsc, graph);
    for (const FeedbackAction& a : live.log()) replay.ApplyFeedback(a);
    ASSERT_EQ(replay.ranking().entries, live.ranking().entries) << "round " << round;
    ASSERT_EQ(replay.multipliers(), live.multipliers());

    const RankedReport plain = Rank(spectrum, kOchiai, ElementKind::kMethod);
    ASSERT_EQ(live.base_ranking().entries, plain.entries);

    // Rejected elements sit below every positive adjusted score.
    std::size_t last_positive = 0;
    bool any_positive = false;
    for (std::size_t i = 0; i < live.ranking().entries.size(); ++i) {
      const RankedEntry& e = live.ranking().entries[i];
      ASSERT_GE(live.multiplier(e.element), 0.0);
      if (e.score > 0 && e.element != live.pinned()) {
        last_positive = i;
        any_positive = true;
      }
    }
    for (std::size_t i = 0; i < live.ranking().entries.size(); ++i) {
      const RankedEntry& e = live.ranking().entries[i];
      if (!rejected.count(e.element) || e.element == live.pinned()) continue;
      ASSERT_EQ(e.score, 0.0);
      if (any_positive) {
        ASSERT_GT(i, last_positive);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace sbfl
