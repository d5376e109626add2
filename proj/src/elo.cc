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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

#include "sbfl/error.h"

namespace sbfl {
namespace {

constexpr std::string_view kHeaderTag = "elo-pool/1";

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

[[noreturn]] void Malformed(std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::kMalformedDocument,
              "pool line " + std::to_string(line_no) + ": " + why);
}

template <typename T>
T ParseNumber(std::string_view text, std::size_t line_no, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Malformed(line_no, "bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string FormatDouble(double v) {
  // Shortest text that parses back to the same double.
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

}  // namespace

double ExpectedScore(double rating_a, double rating_b, double c) {
  if (!(c > 0.0)) {
    throw Error(ErrorCode::kNonPositiveC, "Elo scale c must be positive");
  }
  return 1.0 / (1.0 + std::pow(10.0, (rating_b - rating_a) / c));
}

EloPool::EloPool(EloParams params) : params_(params) {
  if (!(params_.c > 0.0)) {
    throw Error(ErrorCode::kNonPositiveC, "Elo scale c must be positive");
  }
}

std::uint32_t EloPool::AddItem(std::string label) {
  if (label.find_first_of("\t\r\n") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "item label may not contain tabs or line breaks");
  }
  const auto id = static_cast<std::uint32_t>(items_.size() + 1);
  items_.push_back({id, std::move(label), params_.initial_rating, 0});
  return id;
}

const EloItem& EloPool::item(std::uint32_t id) const {
  if (id == 0 || id > items_.size()) {
    throw Error(ErrorCode::kUnknownItem, "unknown item " + std::to_string(id));
  }
  return items_[id - 1];
}

void EloPool::RecordMatch(std::uint32_t a, std::uint32_t b, MatchResult result) {
  item(a);
  item(b);
  if (a == b) {
    throw Error(ErrorCode::kSelfMatch, "item " + std::to_string(a) +
                                           " cannot play itself");
  }
  EloItem& first = items_[a - 1];
  EloItem& second = items_[b - 1];
  const double expected = ExpectedScore(first.rating, second.rating, params_.c);
  const double actual = result == MatchResult::kWinA   ? 1.0
                        : result == MatchResult::kWinB ? 0.0
                                                       : 0.5;
  const double delta = params_.k * (actual - expected);
  first.rating += delta;
  second.rating -= delta;
  ++first.matches_played;
  ++second.matches_played;
  ++matches_recorded_;
}

std::pair<std::uint32_t, std::uint32_t> EloPool::NextPair() const {
  const std::size_t n = items_.size();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewItems,
                "need at least 2 items to vote, have " + std::to_string(n));
  }
  // Reseeded per draw from (seed, matches so far) so the choice survives a
  // save/load cycle without persisting generator state.
  std::seed_seq seq{static_cast<std::uint32_t>(params_.seed),
                    static_cast<std::uint32_t>(params_.seed >> 32),
                    static_cast<std::uint32_t>(matches_recorded_),
                    static_cast<std::uint32_t>(matches_recorded_ >> 32)};
  std::mt19937_64 rng(seq);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (u < params_.exploration) {
    const std::size_t i = rng() % n;
    std::size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    const auto a = static_cast<std::uint32_t>(std::min(i, j) + 1);
    const auto b = static_cast<std::uint32_t>(std::max(i, j) + 1);
    return {a, b};
  }

  std::size_t best_i = 0;
  std::size_t best_j = 1;
  auto key = [&](std::size_t i, std::size_t j) {
    return std::make_tuple(items_[i].matches_played + items_[j].matches_played,
                           std::fabs(items_[i].rating - items_[j].rating));
  };
  auto best = key(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto k = key(i, j);
      // Strict: the scan order already prefers the lowest ids.
      if (k < best) {
        best = k;
        best_i = i;
        best_j = j;
      }
    }
  }
  return {static_cast<std::uint32_t>(best_i + 1),
          static_cast<std::uint32_t>(best_j + 1)};
}

std::vector<Standing> EloPool::Standings() const {
  std::vector<Standing> out;
  out.reserve(items_.size());
  for (const EloItem& it : items_) out.push_back({it.id, it.rating, it.matches_played});
  std::sort(out.begin(), out.end(), [](const Standing& a, const Standing& b) {
    if (a.rating != b.rating) return a.rating > b.rating;
    return a.id < b.id;
  });
  return out;
}

std::string EloPool::Serialize() const {
  std::ostringstream out;
  out << kHeaderTag << "\tK=" << FormatDouble(params_.k)
      << "\tc=" << FormatDouble(params_.c)
      << "\tinitial=" << FormatDouble(params_.initial_rating)
      << "\tseed=" << params_.seed
      << "\texploration=" << FormatDouble(params_.exploration)
      << "\tmatches=" << matches_recorded_ << "\n";
  for (const EloItem& it : items_) {
    out << it.id << '\t' << it.label << '\t' << FormatDouble(it.rating) << '\t'
        << it.matches_played << '\n';
  }
  return out.str();
}

EloPool EloPool::Parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty() || !lines[0].starts_with(kHeaderTag)) {
    throw Error(ErrorCode::kMalformedDocument,
                "pool file must start with '" + std::string(kHeaderTag) + "'");
  }

  EloParams params;
  std::uint64_t matches = 0;
  const auto header = SplitTabs(lines[0]);
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto eq = header[i].find('=');
    if (eq == std::string_view::npos) Malformed(1, "expected key=value");
    const auto key = header[i].substr(0, eq);
    const auto value = header[i].substr(eq + 1);
    if (key == "K") {
      params.k = ParseNumber<double>(value, 1, "K");
    } else if (key == "c") {
      params.c = ParseNumber<double>(value, 1, "c");
    } else if (key == "initial") {
      params.initial_rating = ParseNumber<double>(value, 1, "initial rating");
    } else if (key == "seed") {
      params.seed = ParseNumber<std::uint64_t>(value, 1, "seed");
    } else if (key == "exploration") {
      params.exploration = ParseNumber<double>(value, 1, "exploration");
    } else if (key == "matches") {
      matches = ParseNumber<std::uint64_t>(value, 1, "match count");
    } else {
      Malformed(1, "unknown header key '" + std::string(key) + "'");
    }
  }

  EloPool pool(params);
  pool.matches_recorded_ = matches;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != 4) Malformed(i + 1, "expected 4 tab-separated fields");
    const auto id = ParseNumber<std::uint32_t>(fields[0], i + 1, "id");
    if (id != pool.items_.size() + 1) Malformed(i + 1, "ids must run 1, 2, ...");
    EloItem item;
    item.id = id;
    item.label = std::string(fields[1]);
    item.rating = ParseNumber<double>(fields[2], i + 1, "rating");
    item.matches_played = ParseNumber<std::uint64_t>(fields[3], i + 1, "match count");
    if (!std::isfinite(item.rating)) Malformed(i + 1, "rating must be finite");
    pool.items_.push_back(std::move(item));
  }
  return pool;
}

}  // namespace sbfl
