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

#include "sbfl/spectrum.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <string>
#include <utility>

#include "sbfl/error.h"

namespace sbfl {
namespace {

constexpr std::string_view kKindNames[] = {"STATEMENT", "METHOD", "CLASS",
                                           "FILE", "PACKAGE"};

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string Describe(const CoveragePair& pair) {
  return "(test " + std::to_string(pair.test.value) + ", element " +
         std::to_string(pair.element.value) + ")";
}

}  // namespace

std::string_view KindName(ElementKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ElementKind> ParseKind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (EqualsIgnoreCase(text, kKindNames[i])) {
      return static_cast<ElementKind>(i);
    }
  }
  return std::nullopt;
}

std::string_view OutcomeName(Outcome outcome) {
  return outcome == Outcome::kFail ? "FAIL" : "PASS";
}

std::optional<Outcome> ParseOutcome(std::string_view text) {
  if (EqualsIgnoreCase(text, "PASS")) return Outcome::kPass;
  if (EqualsIgnoreCase(text, "FAIL")) return Outcome::kFail;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// BlockBitsetIndex

BlockBitsetIndex::BlockBitsetIndex(
    const std::vector<std::vector<std::uint32_t>>& rows, std::size_t columns)
    : columns_(columns) {
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  for (const auto& row : rows) {
    for (std::uint32_t column : row) {
      const auto block = static_cast<std::uint32_t>(column / kBlockBits);
      const std::uint64_t bit = std::uint64_t{1} << (column % kBlockBits);
      if (block_numbers_.size() == offsets_.back() ||
          block_numbers_.back() != block) {
        block_numbers_.push_back(block);
        words_.push_back(bit);
      } else {
        words_.back() |= bit;
      }
    }
    offsets_.push_back(block_numbers_.size());
  }
}

bool BlockBitsetIndex::Contains(std::size_t row, std::size_t column) const {
  const auto first = block_numbers_.begin() + offsets_[row];
  const auto last = block_numbers_.begin() + offsets_[row + 1];
  const auto block = static_cast<std::uint32_t>(column / kBlockBits);
  const auto it = std::lower_bound(first, last, block);
  if (it == last || *it != block) return false;
  return (words_[it - block_numbers_.begin()] >> (column % kBlockBits)) & 1U;
}

std::size_t BlockBitsetIndex::Count(std::size_t row) const {
  std::size_t total = 0;
  for (std::size_t i = offsets_[row]; i < offsets_[row + 1]; ++i) {
    total += std::popcount(words_[i]);
  }
  return total;
}

std::size_t BlockBitsetIndex::CountAnd(
    std::size_t row, std::span<const std::uint64_t> mask) const {
  std::size_t total = 0;
  for (std::size_t i = offsets_[row]; i < offsets_[row + 1]; ++i) {
    total += std::popcount(words_[i] & mask[block_numbers_[i]]);
  }
  return total;
}

void BlockBitsetIndex::ForEach(
    std::size_t row, const std::function<void(std::size_t)>& fn) const {
  for (std::size_t i = offsets_[row]; i < offsets_[row + 1]; ++i) {
    std::uint64_t word = words_[i];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      fn(std::size_t{block_numbers_[i]} * kBlockBits + bit);
      word &= word - 1;
    }
  }
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum Spectrum::Build(std::vector<CodeElement> elements,
                         std::vector<TestCase> tests,
                         std::span<const CoveragePair> coverage) {
  Spectrum s;
  s.elements_ = std::move(elements);
  s.tests_ = std::move(tests);

  s.element_index_.reserve(s.elements_.size());
  for (std::size_t i = 0; i < s.elements_.size(); ++i) {
    const auto id = s.elements_[i].id.value;
    if (!s.element_index_.emplace(id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate element id " + std::to_string(id));
    }
  }
  s.test_index_.reserve(s.tests_.size());
  for (std::size_t i = 0; i < s.tests_.size(); ++i) {
    const auto id = s.tests_[i].id.value;
    if (!s.test_index_.emplace(id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate test id " + std::to_string(id));
    }
    if (s.tests_[i].outcome == Outcome::kFail) {
      ++s.failing_;
    } else {
      ++s.passing_;
    }
  }

  // Kinds strictly increase along every parent chain, so a chain can never
  // revisit an element: the kind-order check also rules out cycles.
  s.children_.resize(s.elements_.size());
  for (std::size_t i = 0; i < s.elements_.size(); ++i) {
    const CodeElement& e = s.elements_[i];
    if (!e.parent) continue;
    const auto it = s.element_index_.find(e.parent->value);
    if (it == s.element_index_.end()) {
      throw Error(ErrorCode::kInvalidHierarchy,
                  "element " + std::to_string(e.id.value) +
                      " has unknown parent " + std::to_string(e.parent->value));
    }
    const CodeElement& parent = s.elements_[it->second];
    if (!IsCoarser(parent.kind, e.kind)) {
      throw Error(ErrorCode::kInvalidHierarchy,
                  "element " + std::to_string(e.id.value) + " (" +
                      std::string(KindName(e.kind)) + ") cannot have parent " +
                      std::to_string(parent.id.value) + " (" +
                      std::string(KindName(parent.kind)) + ")");
    }
    s.children_[it->second].push_back(static_cast<std::uint32_t>(i));
  }

  s.per_test_.resize(s.tests_.size());
  for (const CoveragePair& pair : coverage) {
    const auto t = s.test_index_.find(pair.test.value);
    const auto e = s.element_index_.find(pair.element.value);
    if (t == s.test_index_.end() || e == s.element_index_.end()) {
      throw Error(ErrorCode::kDanglingReference,
                  "coverage pair " + Describe(pair) + " references " +
                      (t == s.test_index_.end() ? "an unknown test"
                                                : "an unknown element"));
    }
    s.per_test_[t->second].push_back(static_cast<std::uint32_t>(e->second));
  }

  std::vector<std::vector<std::uint32_t>> per_element(s.elements_.size());
  for (std::size_t t = 0; t < s.per_test_.size(); ++t) {
    auto& row = s.per_test_[t];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    row.shrink_to_fit();
    s.coverage_size_ += row.size();
    for (std::uint32_t e : row) {
      per_element[e].push_back(static_cast<std::uint32_t>(t));
    }
  }
  s.per_element_ = BlockBitsetIndex(per_element, s.tests_.size());

  const std::size_t words =
      (s.tests_.size() + BlockBitsetIndex::kBlockBits - 1) /
      BlockBitsetIndex::kBlockBits;
  s.failing_mask_.assign(words, 0);
  for (std::size_t t = 0; t < s.tests_.size(); ++t) {
    if (s.tests_[t].outcome == Outcome::kFail) {
      s.failing_mask_[t / 64] |= std::uint64_t{1} << (t % 64);
    }
  }
  return s;
}

std::size_t Spectrum::IndexOf(ElementId id) const {
  const auto it = element_index_.find(id.value);
  if (it == element_index_.end()) {
    throw Error(ErrorCode::kUnknownElement,
                "unknown element id " + std::to_string(id.value));
  }
  return it->second;
}

std::size_t Spectrum::IndexOf(TestId id) const {
  const auto it = test_index_.find(id.value);
  if (it == test_index_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown test id " + std::to_string(id.value));
  }
  return it->second;
}

std::vector<TestId> Spectrum::CoveringTests(ElementId id) const {
  std::vector<TestId> out;
  per_element_.ForEach(IndexOf(id),
                       [&](std::size_t t) { out.push_back(tests_[t].id); });
  return out;
}

std::vector<CoveragePair> Spectrum::CoveragePairs() const {
  std::vector<CoveragePair> out;
  out.reserve(coverage_size_);
  for (std::size_t t = 0; t < per_test_.size(); ++t) {
    for (std::uint32_t e : per_test_[t]) {
      out.push_back({tests_[t].id, elements_[e].id});
    }
  }
  return out;
}

bool Spectrum::HasKind(ElementKind kind) const {
  return std::any_of(elements_.begin(), elements_.end(),
                     [kind](const CodeElement& e) { return e.kind == kind; });
}

std::optional<ElementKind> Spectrum::FinestKind() const {
  std::optional<ElementKind> finest;
  for (const CodeElement& e : elements_) {
    if (!finest || e.kind < *finest) finest = e.kind;
  }
  return finest;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

BasicMetrics MetricsForRow(const Spectrum& spectrum, std::size_t row) {
  const auto& rows = spectrum.element_rows();
  BasicMetrics m;
  const auto executed = static_cast<std::uint32_t>(rows.Count(row));
  m.ef = static_cast<std::uint32_t>(rows.CountAnd(row, spectrum.failing_mask()));
  m.ep = executed - m.ef;
  m.nf = spectrum.failing_count() - m.ef;
  m.np = spectrum.passing_count() - m.ep;
  return m;
}

}  // namespace

BasicMetrics ComputeBasicMetrics(const Spectrum& spectrum, ElementId element) {
  return MetricsForRow(spectrum, spectrum.IndexOf(element));
}

std::map<ElementId, BasicMetrics> AllMetrics(const Spectrum& spectrum) {
  const auto& elements = spectrum.elements();
  std::vector<BasicMetrics> counts(elements.size());
  for (std::size_t t = 0; t < spectrum.test_count(); ++t) {
    const bool failed = spectrum.tests()[t].outcome == Outcome::kFail;
    for (std::uint32_t e : spectrum.ElementsCoveredBy(t)) {
      ++(failed ? counts[e].ef : counts[e].ep);
    }
  }
  std::map<ElementId, BasicMetrics> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    BasicMetrics& m = counts[i];
    m.nf = spectrum.failing_count() - m.ef;
    m.np = spectrum.passing_count() - m.ep;
    out.emplace(elements[i].id, m);
  }
  return out;
}

std::vector<BasicMetrics> MetricTable(const Spectrum& spectrum) {
  std::vector<BasicMetrics> out;
  out.reserve(spectrum.elements().size());
  for (std::size_t i = 0; i < spectrum.elements().size(); ++i) {
    out.push_back(MetricsForRow(spectrum, i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test selection

TestSelection SelectTests(const Spectrum& spectrum,
                          const std::optional<std::set<ElementId>>& targets) {
  const auto& tests = spectrum.tests();
  const auto& rows = spectrum.element_rows();

  // Dense target flags; `remaining` counts targets still waiting for a
  // passing test.
  std::vector<char> wanted(spectrum.elements().size(), 0);
  std::vector<std::uint32_t> target_rows;
  if (targets) {
    for (ElementId id : *targets) target_rows.push_back(
        static_cast<std::uint32_t>(spectrum.IndexOf(id)));
  } else {
    for (std::size_t i = 0; i < wanted.size(); ++i) {
      target_rows.push_back(static_cast<std::uint32_t>(i));
    }
  }

  TestSelection out;
  std::vector<std::size_t> order(tests.size());
  for (std::size_t t = 0; t < tests.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tests[a].id < tests[b].id;
  });
  for (std::size_t t : order) {
    if (tests[t].outcome == Outcome::kFail) out.tests.push_back(tests[t].id);
  }

  std::size_t remaining = 0;
  for (std::uint32_t row : target_rows) {
    bool any_test = false;
    bool any_passing = false;
    rows.ForEach(row, [&](std::size_t t) {
      any_test = true;
      if (tests[t].outcome == Outcome::kPass) any_passing = true;
    });
    if (!any_test) {
      out.uncoverable.push_back(spectrum.elements()[row].id);
    } else if (any_passing && !wanted[row]) {
      wanted[row] = 1;
      ++remaining;
    }
  }
  std::sort(out.uncoverable.begin(), out.uncoverable.end());

  std::vector<char> taken(tests.size(), 0);
  while (remaining > 0) {
    std::size_t best = tests.size();
    std::size_t best_gain = 0;
    for (std::size_t t : order) {
      if (taken[t] || tests[t].outcome != Outcome::kPass) continue;
      std::size_t gain = 0;
      for (std::uint32_t e : spectrum.ElementsCoveredBy(t)) gain += wanted[e];
      // Strict comparison keeps the lowest id among equal gains.
      if (gain > best_gain) {
        best = t;
        best_gain = gain;
      }
    }
    if (best == tests.size()) break;
    taken[best] = 1;
    out.tests.push_back(tests[best].id);
    for (std::uint32_t e : spectrum.ElementsCoveredBy(best)) {
      if (wanted[e]) {
        wanted[e] = 0;
        --remaining;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchy

std::vector<ElementId> Descendants(const Spectrum& spectrum, ElementId root,
                                   ElementKind kind) {
  std::vector<ElementId> out;
  std::vector<std::uint32_t> stack{
      static_cast<std::uint32_t>(spectrum.IndexOf(root))};
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    const CodeElement& e = spectrum.elements()[i];
    if (e.kind == kind) out.push_back(e.id);
    // Nothing finer than `kind` can contain an element of `kind`.
    if (e.kind <= kind) continue;
    const auto children = spectrum.ChildrenOf(i);
    stack.insert(stack.end(), children.rbegin(), children.rend());
  }
  return out;
}

}  // namespace sbfl
