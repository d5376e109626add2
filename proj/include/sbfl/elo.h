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

// Elo ratings for ordering items by repeated pairwise human votes.

#ifndef SBFL_ELO_H_
#define SBFL_ELO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbfl {

// E_a = 1 / (1 + 10^((rating_b - rating_a) / c)). Throws kNonPositiveC.
double ExpectedScore(double rating_a, double rating_b, double c);

struct EloParams {
  double k = 32.0;
  double c = 400.0;
  double initial_rating = 1500.0;
  std::uint64_t seed = 0;
  // Probability of drawing a uniformly random pair instead of the
  // least-played, closest-rated one.
  double exploration = 0.3;
};

struct EloItem {
  std::uint32_t id = 0;
  std::string label;
  double rating = 0.0;
  std::uint64_t matches_played = 0;
};

enum class MatchResult { kWinA, kWinB, kDraw };

struct Standing {
  std::uint32_t id = 0;
  double rating = 0.0;
  std::uint64_t matches_played = 0;
};

class EloPool {
 public:
  explicit EloPool(EloParams params = {});

  // Ids are assigned 1, 2, ... in insertion order. Labels may not contain
  // tabs or line breaks (kInvalidArgument).
  std::uint32_t AddItem(std::string label);

  // r_a += K (S_a - E_a) and r_b -= the same amount, so the total is
  // conserved. Throws kUnknownItem, kSelfMatch.
  void RecordMatch(std::uint32_t a, std::uint32_t b, MatchResult result);

  // Next pair to vote on, smaller id first. With probability `exploration` a
  // uniform random pair; otherwise the pair minimizing
  // (matches_a + matches_b, |rating_a - rating_b|), ties to the lowest ids.
  // A pure function of the pool state and seed. Throws kTooFewItems.
  std::pair<std::uint32_t, std::uint32_t> NextPair() const;

  // Descending rating, ties by ascending id.
  std::vector<Standing> Standings() const;

  const std::vector<EloItem>& items() const { return items_; }
  const EloParams& params() const { return params_; }
  const EloItem& item(std::uint32_t id) const;
  std::uint64_t matches_recorded() const { return matches_recorded_; }

  // Tab-separated text: a header line with the parameters, then one line per
  // item (id, label, rating, matches_played). Ratings are written with enough
  // digits to round-trip exactly.
  std::string Serialize() const;
  // Throws kMalformedDocument.
  static EloPool Parse(std::string_view text);

 private:
  EloParams params_;
  std::vector<EloItem> items_;
  std::uint64_t matches_recorded_ = 0;
};

}  // namespace sbfl

#endif  // SBFL_ELO_H_
