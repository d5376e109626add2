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

// Program spectrum: which code elements each test executed, and whether the
// test failed.
//
// Coverage is held in two directions over dense indices:
//   * per test: a sorted array of element indices;
//   * per element: a block bitset over test indices (only non-zero 64-bit
//     blocks are stored, CSR style).
// The per-element direction lets the four basic metrics of one element be
// computed with a popcount against the failing-test mask, without touching the
// rest of the matrix.

#ifndef SBFL_SPECTRUM_H_
#define SBFL_SPECTRUM_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbfl {

struct ElementId {
  std::uint32_t value = 0;
  auto operator<=>(const ElementId&) const = default;
};

struct TestId {
  std::uint32_t value = 0;
  auto operator<=>(const TestId&) const = default;
};

// Ordered from finest to coarsest; a parent is always strictly coarser than
// its children.
enum class ElementKind : std::uint8_t {
  kStatement = 0,
  kMethod = 1,
  kClass = 2,
  kFile = 3,
  kPackage = 4,
};

std::string_view KindName(ElementKind kind);
// Case-insensitive; accepts the names produced by KindName.
std::optional<ElementKind> ParseKind(std::string_view text);
inline bool IsCoarser(ElementKind a, ElementKind b) { return a > b; }

struct SourceLocation {
  std::string path;
  int start_line = 0;
  int end_line = 0;
  bool operator==(const SourceLocation&) const = default;
};

struct CodeElement {
  ElementId id;
  std::string name;
  ElementKind kind = ElementKind::kStatement;
  SourceLocation location;
  std::optional<ElementId> parent;
  bool operator==(const CodeElement&) const = default;
};

enum class Outcome : std::uint8_t { kPass, kFail };

std::string_view OutcomeName(Outcome outcome);
std::optional<Outcome> ParseOutcome(std::string_view text);

struct TestCase {
  TestId id;
  std::string name;
  Outcome outcome = Outcome::kPass;
  bool operator==(const TestCase&) const = default;
};

struct CoveragePair {
  TestId test;
  ElementId element;
  auto operator<=>(const CoveragePair&) const = default;
};

// Counts of tests split by (executed the element?, failed?).
struct BasicMetrics {
  std::uint32_t ef = 0;  // executed, failed
  std::uint32_t ep = 0;  // executed, passed
  std::uint32_t nf = 0;  // not executed, failed
  std::uint32_t np = 0;  // not executed, passed
  bool operator==(const BasicMetrics&) const = default;
};

struct Totals {
  std::uint32_t failing = 0;
  std::uint32_t passing = 0;
};

// Per-element coverage over test indices. Row `r` owns the blocks
// [offsets[r], offsets[r + 1]); each block is (block number, 64-bit word).
class BlockBitsetIndex {
 public:
  static constexpr std::size_t kBlockBits = 64;

  BlockBitsetIndex() = default;
  // `rows[r]` must be sorted ascending and free of duplicates.
  BlockBitsetIndex(const std::vector<std::vector<std::uint32_t>>& rows,
                   std::size_t columns);

  std::size_t rows() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t columns() const { return columns_; }

  bool Contains(std::size_t row, std::size_t column) const;
  std::size_t Count(std::size_t row) const;
  // Population count of `row AND mask`, where mask is a dense word array
  // covering all columns.
  std::size_t CountAnd(std::size_t row, std::span<const std::uint64_t> mask) const;
  void ForEach(std::size_t row,
               const std::function<void(std::size_t column)>& fn) const;

 private:
  std::size_t columns_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> block_numbers_;
  std::vector<std::uint64_t> words_;
};

// Immutable once built; safe for concurrent readers.
class Spectrum {
 public:
  Spectrum() = default;

  // Validates and indexes the inputs. Throws Error with kDuplicateId,
  // kDanglingReference or kInvalidHierarchy. Duplicate coverage pairs collapse
  // (the relation is binary).
  static Spectrum Build(std::vector<CodeElement> elements,
                        std::vector<TestCase> tests,
                        std::span<const CoveragePair> coverage);

  // Registries keep input order; that order is the "input order" tie-break.
  const std::vector<CodeElement>& elements() const { return elements_; }
  const std::vector<TestCase>& tests() const { return tests_; }

  std::size_t test_count() const { return tests_.size(); }
  std::uint32_t failing_count() const { return failing_; }
  std::uint32_t passing_count() const { return passing_; }
  Totals totals() const { return {failing_, passing_}; }

  bool Contains(ElementId id) const { return element_index_.count(id.value) != 0; }
  bool Contains(TestId id) const { return test_index_.count(id.value) != 0; }
  // Throw kUnknownElement / kInvalidArgument for unregistered ids.
  std::size_t IndexOf(ElementId id) const;
  std::size_t IndexOf(TestId id) const;
  const CodeElement& element(ElementId id) const { return elements_[IndexOf(id)]; }
  const TestCase& test(TestId id) const { return tests_[IndexOf(id)]; }

  // Dense-index views.
  std::span<const std::uint32_t> ElementsCoveredBy(std::size_t test_index) const {
    return per_test_[test_index];
  }
  const BlockBitsetIndex& element_rows() const { return per_element_; }
  std::span<const std::uint64_t> failing_mask() const { return failing_mask_; }
  std::span<const std::uint32_t> ChildrenOf(std::size_t element_index) const {
    return children_[element_index];
  }

  std::vector<TestId> CoveringTests(ElementId id) const;
  // All pairs ordered by (test index, element index).
  std::vector<CoveragePair> CoveragePairs() const;
  std::size_t coverage_size() const { return coverage_size_; }

  bool HasKind(ElementKind kind) const;
  // Finest kind present, or nullopt for an empty element registry.
  std::optional<ElementKind> FinestKind() const;

 private:
  std::vector<CodeElement> elements_;
  std::vector<TestCase> tests_;
  std::unordered_map<std::uint32_t, std::size_t> element_index_;
  std::unordered_map<std::uint32_t, std::size_t> test_index_;
  std::vector<std::vector<std::uint32_t>> per_test_;
  BlockBitsetIndex per_element_;
  std::vector<std::uint64_t> failing_mask_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::uint32_t failing_ = 0;
  std::uint32_t passing_ = 0;
  std::size_t coverage_size_ = 0;
};

// Metrics of one element from its bitset row. Throws kUnknownElement.
BasicMetrics ComputeBasicMetrics(const Spectrum& spectrum, ElementId element);

// Same counts for every element, built in one pass over the per-test lists.
std::map<ElementId, BasicMetrics> AllMetrics(const Spectrum& spectrum);

// Metrics aligned with spectrum.elements(), via the bitset rows.
std::vector<BasicMetrics> MetricTable(const Spectrum& spectrum);

struct TestSelection {
  std::vector<TestId> tests;
  // Targets that no test in the spectrum executes.
  std::vector<ElementId> uncoverable;
};

// Failing tests first (ascending id), then passing tests picked greedily by
// how many still-uncovered targets they execute, ties to the lower id.
// Targets already executed by a failing test still count as uncovered for the
// greedy pass: a passing execution is what discriminates them. With no
// `targets`, every element is a target. Throws kUnknownElement.
TestSelection SelectTests(const Spectrum& spectrum,
                          const std::optional<std::set<ElementId>>& targets);

// Elements of `kind` in the subtree rooted at `root` (including `root`),
// in preorder. Throws kUnknownElement.
std::vector<ElementId> Descendants(const Spectrum& spectrum, ElementId root,
                                   ElementKind kind);

}  // namespace sbfl

template <>
struct std::hash<sbfl::ElementId> {
  std::size_t operator()(sbfl::ElementId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // SBFL_SPECTRUM_H_
