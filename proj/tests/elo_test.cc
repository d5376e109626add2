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

#include "sbfl/elo.h"

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "sbfl/error.h"
#include "test_support.h"

namespace sbfl {
namespace {

using testing::ThrownCode;

double RefExpected(double a, double b, double c) {
  return 1.0 / (1.0 + std::pow(10.0, (b - a) / c));
}

EloPool PoolOf(int n, EloParams params = {}) {
  EloPool pool(params);
  for (int i = 0; i < n; ++i) pool.AddItem("item " + std::to_string(i + 1));
  return pool;
}

TEST(EloTest, ExpectedScoreValues) {
  EXPECT_EQ(ExpectedScore(1500, 1500, 400), 0.5);
  EXPECT_NEAR(ExpectedScore(1600, 1400, 400), 0.7597, 5e-5);
  EXPECT_NEAR(ExpectedScore(1600, 1400, 400), RefExpected(1600, 1400, 400), 1e-15);
  EXPECT_EQ(ThrownCode([] { ExpectedScore(1, 2, 0); }), ErrorCode::kNonPositiveC);
  EXPECT_EQ(ThrownCode([] { ExpectedScore(1, 2, -5); }), ErrorCode::kNonPositiveC);
  EXPECT_EQ(ThrownCode([] { EloPool(EloParams{.c = 0}); }), ErrorCode::kNonPositiveC);
}

TEST(EloTest, ExpectedScoresAreComplementaryAndIncreasing) {
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> r(800, 2400);
  for (int i = 0; i < 1000; ++i) {
    const double a = r(rng);
    const double b = r(rng);
    ASSERT_NEAR(ExpectedScore(a, b, 400) + ExpectedScore(b, a, 400), 1.0, 1e-12);
    ASSERT_LT(ExpectedScore(a, b, 400), ExpectedScore(a + 1.0, b, 400));
  }
}

TEST(EloTest, SymmetricWinMovesSixteen) {
  EloPool pool = PoolOf(2);
  pool.RecordMatch(1, 2, MatchResult::kWinA);
  EXPECT_EQ(pool.item(1).rating, 1516.0);
  EXPECT_EQ(pool.item(2).rating, 1484.0);
  EXPECT_EQ(pool.item(1).matches_played, 1u);
  EXPECT_EQ(pool.item(2).matches_played, 1u);
  EXPECT_EQ(pool.matches_recorded(), 1u);
}

TEST(EloTest, UpsetWin) {
  EloPool pool = EloPool::Parse(
      "elo-pool/1\tK=32\tc=400\tinitial=1500\tseed=0\texploration=0.3\tmatches=0\n"
      "1\ta\t1600\t0\n2\tb\t1400\t0\n");
  pool.RecordMatch(1, 2, MatchResult::kWinB);
  const double gain = 32.0 * RefExpected(1600, 1400, 400);
  EXPECT_NEAR(gain, 24.31, 5e-3);
  EXPECT_NEAR(pool.item(2).rating, 1400 + gain, 1e-9);
  EXPECT_NEAR(pool.item(1).rating, 1600 - gain, 1e-9);
}

TEST(EloTest, EqualDrawChangesNothing) {
  EloPool pool = PoolOf(2);
  pool.RecordMatch(2, 1, MatchResult::kDraw);
  EXPECT_EQ(pool.item(1).rating, 1500.0);
  EXPECT_EQ(pool.item(2).rating, 1500.0);
}

TEST(EloTest, MatchErrors) {
  EloPool pool = PoolOf(2);
  EXPECT_EQ(ThrownCode([&] { pool.RecordMatch(1, 1, MatchResult::kWinA); }),
            ErrorCode::kSelfMatch);
  EXPECT_EQ(ThrownCode([&] { pool.RecordMatch(1, 3, MatchResult::kWinA); }),
            ErrorCode::kUnknownItem);
  EXPECT_EQ(ThrownCode([&] { pool.RecordMatch(0, 1, MatchResult::kWinA); }),
            ErrorCode::kUnknownItem);
  EXPECT_EQ(ThrownCode([&] { pool.AddItem("tab\there"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ThrownCode([&] { PoolOf(1).NextPair(); }), ErrorCode::kTooFewItems);
  EXPECT_EQ(ThrownCode([&] { PoolOf(0).NextPair(); }), ErrorCode::kTooFewItems);
}

TEST(EloTest, TwoItemsAlwaysPairTogether) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EloPool pool = PoolOf(2, {.seed = seed});
    for (int i = 0; i < 5; ++i) {
      ASSERT_EQ(pool.NextPair(), (std::pair<std::uint32_t, std::uint32_t>{1, 2}));
      pool.RecordMatch(1, 2, MatchResult::kWinA);
    }
  }
}

TEST(EloTest, FreshPoolExploitsLowestIds) {
  EXPECT_EQ(PoolOf(4, {.exploration = 0.0}).NextPair(),
            (std::pair<std::uint32_t, std::uint32_t>{1, 2}));
}

// Brute-force (matches sum, rating gap, ids) minimum.
std::pair<std::uint32_t, std::uint32_t> BestPair(const EloPool& pool) {
  const auto& it = pool.items();
  std::tuple<std::uint64_t, double, std::uint32_t, std::uint32_t> best{
      UINT64_MAX, 0, 0, 0};
  for (const EloItem& a : it) {
    for (const EloItem& b : it) {
      if (a.id >= b.id) continue;
      const auto key = std::make_tuple(a.matches_played + b.matches_played,
                                       std::fabs(a.rating - b.rating), a.id, b.id);
      if (key < best) best = key;
    }
  }
  return {std::get<2>(best), std::get<3>(best)};
}

TEST(EloTest, ExploitBranchMatchesBruteForce) {
  std::mt19937 rng(72);
  EloPool pool = PoolOf(7, {.exploration = 0.0});
  for (int i = 0; i < 300; ++i) {
    const auto pair = pool.NextPair();
    ASSERT_EQ(pair, BestPair(pool)) << "step " << i;
    pool.RecordMatch(pair.first, pair.second, static_cast<MatchResult>(rng() % 3));
  }
}

TEST(EloTest, ExploreBranchGivesValidDistinctPairs) {
  std::mt19937 rng(73);
  EloPool pool = PoolOf(6, {.seed = 5, .exploration = 1.0});
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (int i = 0; i < 400; ++i) {
    const auto [a, b] = pool.NextPair();
    ASSERT_LT(a, b);
    ASSERT_GE(a, 1u);
    ASSERT_LE(b, 6u);
    seen.insert({a, b});
    pool.RecordMatch(a, b, static_cast<MatchResult>(rng() % 3));
  }
  EXPECT_EQ(seen.size(), 15u);
}

TEST(EloTest, SeededPairSequencesRepeat) {
  auto run = [](std::uint64_t seed) {
    EloPool pool = PoolOf(5, {.seed = seed});
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (int i = 0; i < 100; ++i) {
      const auto p = pool.NextPair();
      pairs.push_back(p);
      pool.RecordMatch(p.first, p.second, i % 3 == 0 ? MatchResult::kWinB : MatchResult::kWinA);
    }
    return std::make_pair(pairs, pool.Serialize());
  };
  EXPECT_EQ(run(9), run(9));
  EXPECT_NE(run(9).first, run(10).first);
}

TEST(EloTest, NextPairSurvivesSaveAndLoad) {
  EloPool pool = PoolOf(6, {.seed = 3});
  for (int i = 0; i < 20; ++i) {
    const auto p = pool.NextPair();
    pool.RecordMatch(p.first, p.second, MatchResult::kWinA);
    ASSERT_EQ(EloPool::Parse(pool.Serialize()).NextPair(), pool.NextPair());
  }
}

TEST(EloTest, StandingsOrder) {
  EloPool pool = PoolOf(3);
  auto standings = pool.Standings();
  EXPECT_EQ(standings[0].id, 1u);
  EXPECT_EQ(standings[2].id, 3u);
  for (const Standing& s : standings) EXPECT_EQ(s.rating, 1500.0);
  pool.RecordMatch(2, 3, MatchResult::kWinB);
  standings = pool.Standings();
  EXPECT_EQ(standings[0].id, 3u);
  EXPECT_EQ(standings[1].id, 1u);
  EXPECT_EQ(standings[2].id, 2u);
}

TEST(EloTest, RatingSumConserved) {
  std::mt19937 rng(74);
  EloPool pool = PoolOf(12);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t a = rng() % 12 + 1;
    std::uint32_t b = rng() % 11 + 1;
    if (b >= a) ++b;
    pool.RecordMatch(a, b, static_cast<MatchResult>(rng() % 3));
  }
  double sum = 0;
  for (const EloItem& it : pool.items()) sum += it.rating;
  EXPECT_NEAR(sum, 12 * 1500.0, 1e-9);
}

TEST(EloTest, SerializeRoundTrip) {
  EloPool pool = PoolOf(3, {.k = 24, .c = 300, .seed = 77});
  pool.RecordMatch(1, 3, MatchResult::kWinA);
  pool.RecordMatch(2, 3, MatchResult::kDraw);
  const std::string text = pool.Serialize();
  const EloPool back = EloPool::Parse(text);
  EXPECT_EQ(back.Serialize(), text);
  EXPECT_EQ(back.params().k, 24.0);
  EXPECT_EQ(back.params().seed, 77u);
  EXPECT_EQ(back.matches_recorded(), 2u);
  for (std::uint32_t id = 1; id <= 3; ++id) {
    EXPECT_EQ(back.item(id).rating, pool.item(id).rating);
    EXPECT_EQ(back.item(id).label, pool.item(id).label);
  }
}

TEST(EloTest, MalformedPoolFiles) {
  const char* bad[] = {
      "",
      "not-a-pool\n",
      "elo-pool/1\tK=abc\n",
      "elo-pool/1\tbogus=1\n",
      "elo-pool/1\n1\ta\t1500\n",
      "elo-pool/1\n2\ta\t1500\t0\n",
      "elo-pool/1\n1\ta\tnan\t0\n",
  };
  for (const char* text : bad) {
    EXPECT_EQ(ThrownCode([&] { EloPool::Parse(text); }), ErrorCode::kMalformedDocument)
        << text;
  }
}

}  // namespace
}  // namespace sbfl
