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

#include "sbfl/ingestion.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "sbfl/error.h"
#include "test_support.h"

namespace sbfl {
namespace {

using testing::ReadText;
using testing::ThrownCode;

const std::string kData = SBFL_TEST_DATA;

std::string ErrorText(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(CanonicalTest, MinimalDocument) {
  const SpectrumDocument doc = ParseCanonical(R"({
    "version": "sbfl-spectrum/1",
    "elements": [{"id": 5, "name": "x", "kind": "STATEMENT", "path": "a.c",
                  "start_line": 1, "end_line": 1, "parent": null}],
    "tests": [{"id": 1, "name": "t", "outcome": "FAIL"}],
    "coverage": [[1, 5]]
  })");
  EXPECT_EQ(doc.spectrum.failing_count(), 1u);
  EXPECT_EQ(doc.spectrum.passing_count(), 0u);
  EXPECT_EQ(ComputeBasicMetrics(doc.spectrum, ElementId{5}), (BasicMetrics{1, 0, 0, 0}));
  EXPECT_FALSE(doc.call_graph.has_value());
  EXPECT_TRUE(doc.warnings.empty());
}

TEST(CanonicalTest, WorkedFileMatchesHandCounts) {
  const SpectrumDocument doc = ParseCanonical(ReadText(kData + "/worked.json"));
  const auto dense = testing::WorkedDense();
  const auto all = AllMetrics(doc.spectrum);
  for (std::uint32_t e = 0; e < 3; ++e) {
    EXPECT_EQ(all.at(ElementId{e + 1}), testing::DenseMetrics(dense, e));
  }
  EXPECT_EQ(all.at(ElementId{1}), (BasicMetrics{1, 1, 0, 1}));
  EXPECT_EQ(all.at(ElementId{3}), (BasicMetrics{0, 2, 1, 0}));
}

TEST(CanonicalTest, SchemaErrorsNameTheField) {
  const std::string no_tests =
      R"({"version": "sbfl-spectrum/1", "elements": [], "coverage": []})";
  EXPECT_EQ(ThrownCode([&] { ParseCanonical(no_tests); }), ErrorCode::kSchemaError);
  EXPECT_EQ(ErrorText([&] { ParseCanonical(no_tests); }).rfind("tests", 0), 0u);

  const std::string bad_kind = R"({"version": "sbfl-spectrum/1", "tests": [], "coverage": [],
    "elements": [{"id": 1, "name": "x", "kind": "LOOP", "path": "", "start_line": 0,
                  "end_line": 0}]})";
  EXPECT_NE(ErrorText([&] { ParseCanonical(bad_kind); }).find("elements[0].kind"),
            std::string::npos)
      << ErrorText([&] { ParseCanonical(bad_kind); });

  const std::string bad_pair = R"({"version": "sbfl-spectrum/1", "tests": [],
    "elements": [], "coverage": [[1]]})";
  EXPECT_NE(ErrorText([&] { ParseCanonical(bad_pair); }).find("coverage[0]"),
            std::string::npos);

  EXPECT_EQ(ThrownCode([] { ParseCanonical("{not json"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(ThrownCode([] { ParseCanonical("[]"); }), ErrorCode::kSchemaError);
}

TEST(CanonicalTest, VersionAndReferenceChecks) {
  EXPECT_EQ(ThrownCode([] {
              ParseCanonical(R"({"version": "sbfl-spectrum/2", "elements": [], "tests": [],
                                 "coverage": []})");
            }),
            ErrorCode::kVersionMismatch);
  EXPECT_EQ(ThrownCode([] {
              ParseCanonical(R"({"version": "sbfl-spectrum/1", "elements": [],
                                 "tests": [{"id": 1, "name": "t", "outcome": "PASS"}],
                                 "coverage": [[1, 2]]})");
            }),
            ErrorCode::kDanglingReference);
}

TEST(CanonicalTest, UnknownFieldsWarn) {
  const SpectrumDocument doc = ParseCanonical(
      R"({"version": "sbfl-spectrum/1", "elements": [], "tests": [], "coverage": [],
          "generator": "lcov 1.16"})");
  ASSERT_EQ(doc.warnings.size(), 1u);
  EXPECT_NE(doc.warnings[0].find("generator"), std::string::npos);
}

TEST(CanonicalTest, EmptySpectrumExport) {
  const std::string text = ExportCanonical(Spectrum::Build({}, {}, {}));
  const SpectrumDocument back = ParseCanonical(text);
  EXPECT_TRUE(back.spectrum.elements().empty());
  EXPECT_EQ(back.spectrum.test_count(), 0u);
  EXPECT_NE(text.find("\"version\": \"sbfl-spectrum/1\""), std::string::npos) << text;
}

TEST(CanonicalTest, RoundTripOnRandomTrees) {
  std::mt19937 rng(81);
  for (int round = 0; round < 100; ++round) {
    const Spectrum s = testing::RandomTree(rng);
    CallGraph graph;
    std::vector<ElementId> methods;
    for (const CodeElement& c : s.elements()) {
      if (c.kind == ElementKind::kMethod) methods.push_back(c.id);
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
      graph.AddEdge(methods[rng() % methods.size()], methods[rng() % methods.size()]);
    }
    const std::string text = ExportCanonical(s, graph);
    ASSERT_EQ(ExportCanonical(s, graph), text);
    const SpectrumDocument back = ParseCanonical(text);
    ASSERT_EQ(AllMetrics(back.spectrum), AllMetrics(s));
    ASSERT_EQ(back.spectrum.elements(), s.elements());
    ASSERT_EQ(back.spectrum.tests(), s.tests());
    ASSERT_TRUE(back.call_graph.has_value());
    ASSERT_EQ(back.call_graph->edges(), graph.edges());
    ASSERT_EQ(ExportCanonical(back.spectrum, back.call_graph), text);
  }
}

TEST(LcovTest, CoveredAndKnownLines) {
  const LcovCoverage cov = ParseLcov("SF:a.c\nDA:3,1\nDA:4,0\nend_of_record\n");
  ASSERT_EQ(cov.files.size(), 1u);
  EXPECT_EQ(cov.files[0].path, "a.c");
  EXPECT_EQ(cov.files[0].lines, (std::map<int, bool>{{3, true}, {4, false}}));
  EXPECT_TRUE(cov.warnings.empty());
}

TEST(LcovTest, MalformedRecordsNameTheLine) {
  EXPECT_EQ(ThrownCode([] { ParseLcov("SF:a.c\nDA:x,1\nend_of_record\n"); }),
            ErrorCode::kMalformedRecord);
  const std::string text = ErrorText([] { ParseLcov("SF:a.c\nDA:x,1\nend_of_record\n"); });
  EXPECT_NE(text.find("line 2"), std::string::npos) << text;
  EXPECT_NE(text.find("DA:x,1"), std::string::npos) << text;
  for (const char* bad : {"DA:1,1\n", "SF:a.c\nDA:1\n", "SF:a.c\nDA:0,1\n", "SF:a.c\nDA:2,-1\n",
                          "SF:a.c\nXYZ:1\n", "SF:a.c\nSF:b.c\n", "end_of_record\n", "garbage\n"}) {
    EXPECT_EQ(ThrownCode([&] { ParseLcov(bad); }), ErrorCode::kMalformedRecord) << bad;
  }
}

TEST(LcovTest, IgnoredRecordsWarnOnce) {
  const LcovCoverage cov = ParseLcov(
      "TN:x\nSF:a.c\nFN:1,f\nFN:5,g\nFNDA:1,f\nBRDA:1,0,0,1\nDA:1,1\nLF:1\nLH:1\n");
  EXPECT_EQ(cov.files[0].lines, (std::map<int, bool>{{1, true}}));
  // FN, FNDA, BRDA, plus the missing end_of_record.
  EXPECT_EQ(cov.warnings.size(), 4u);
}

TEST(LcovTest, MergePolicies) {
  const std::string text = "SF:a.c\nDA:7,0\nDA:7,2\nend_of_record\n";
  EXPECT_EQ(ParseLcov(text).files[0].lines.at(7), true);
  EXPECT_EQ(ThrownCode([&] { ParseLcov(text, LcovMergePolicy::kRejectDuplicates); }),
            ErrorCode::kMalformedRecord);
}

TEST(LcovTest, RecordOrderDoesNotMatter) {
  std::mt19937 rng(82);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> da;
    for (int line = 1; line <= 20; ++line) {
      da.push_back("DA:" + std::to_string(line) + "," + std::to_string(rng() % 3));
    }
    auto render = [&] {
      std::string out = "SF:z.c\n";
      for (const auto& l : da) out += l + "\n";
      return out + "end_of_record\n";
    };
    const LcovCoverage first = ParseLcov(render());
    std::shuffle(da.begin(), da.end(), rng);
    const LcovCoverage second = ParseLcov(render());
    ASSERT_EQ(first.files[0].lines, second.files[0].lines);
  }
}

TEST(JUnitTest, FailureTagMarksFail) {
  const auto tests = ParseJUnit(R"(<testsuite name="s">
      <testcase classname="A" name="one"/>
      <testcase classname="A" name="two"><failure message="x"/></testcase>
    </testsuite>)");
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[0].outcome, Outcome::kPass);
  EXPECT_EQ(tests[1].outcome, Outcome::kFail);
  EXPECT_EQ(tests[0].name, "A.one");
  EXPECT_EQ(tests[1].id, TestId{2});
}

TEST(JUnitTest, ErrorFailsAndSkippedIsExcluded) {
  const auto tests = ParseJUnit(R"(<testsuites><testsuite>
      <testcase classname="A" name="err"><error/></testcase>
      <testcase classname="A" name="skip"><skipped/></testcase>
      <testcase name="bare"/>
    </testsuite></testsuites>)");
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[0].outcome, Outcome::kFail);
  EXPECT_EQ(tests[1].name, "bare");
}

TEST(JUnitTest, FiftyCaseFixtureHandCount) {
  // 50 <testcase> tags: 7 <failure>, 3 <error>, 4 <skipped>.
  const auto tests = ParseJUnit(ReadText(kData + "/ingest/junit_50.xml"));
  EXPECT_EQ(tests.size(), 46u);
  const auto failing = std::count_if(tests.begin(), tests.end(), [](const TestCase& t) {
    return t.outcome == Outcome::kFail;
  });
  EXPECT_EQ(failing, 10);
  EXPECT_EQ(tests.size() - failing, 36u);
  for (std::size_t i = 0; i < tests.size(); ++i) EXPECT_EQ(tests[i].id.value, i + 1);
}

TEST(JUnitTest, MalformedDocuments) {
  for (const char* bad : {"", "<testsuite>", "<report/>",
                          "<testsuite><testcase classname='A'/></testsuite>"}) {
    EXPECT_EQ(ThrownCode([&] { ParseJUnit(bad); }), ErrorCode::kMalformedDocument) << bad;
  }
}

TEST(ManifestTest, ParsesAndRejects) {
  const auto entries = ParseManifest("# comment\n\na\tx.info\nb c\tdir/y.info\r\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[1].test_name, "b c");
  EXPECT_EQ(entries[1].lcov_path, "dir/y.info");
  for (const char* bad : {"no tab here\n", "\tpath\n", "name\t\n", "a\tb\tc\n"}) {
    EXPECT_EQ(ThrownCode([&] { ParseManifest(bad); }), ErrorCode::kMalformedRecord) << bad;
  }
}

// Expected matrix for tests/data/ingest, counted by hand:
//   ids: 1 src/calc.c, 2 :3, 3 :4, 4 :5, 5 :9, 6 :10, 7 src/util.c, 8 :1
//   adds (PASS)      -> 2 3 8
//   overflows (FAIL) -> 2 3 4
//   divides (PASS)   -> 5 6
TEST(AssembleTest, FixtureMatchesHandMatrix) {
  const auto tests = ParseJUnit(ReadText(kData + "/ingest/junit.xml"));
  ASSERT_EQ(tests.size(), 4u);
  std::vector<std::pair<std::string, LcovCoverage>> streams;
  for (const ManifestEntry& e : ParseManifest(ReadText(kData + "/ingest/manifest.tsv"))) {
    streams.emplace_back(e.test_name, ParseLcov(ReadText(kData + "/ingest/" + e.lcov_path)));
  }
  const AssembledSpectrum a = AssembleSpectrum(tests, streams);
  const Spectrum& s = a.spectrum;

  ASSERT_EQ(s.elements().size(), 8u);
  EXPECT_EQ(s.element(ElementId{1}).kind, ElementKind::kFile);
  EXPECT_EQ(s.element(ElementId{4}).name, "src/calc.c:5");
  EXPECT_EQ(s.element(ElementId{4}).parent, ElementId{1});
  EXPECT_EQ(s.element(ElementId{8}).location, (SourceLocation{"src/util.c", 1, 1}));
  EXPECT_EQ(s.test_count(), 3u);

  const std::vector<CoveragePair> want = {
      {TestId{1}, ElementId{2}}, {TestId{1}, ElementId{3}}, {TestId{1}, ElementId{8}},
      {TestId{2}, ElementId{2}}, {TestId{2}, ElementId{3}}, {TestId{2}, ElementId{4}},
      {TestId{3}, ElementId{5}}, {TestId{3}, ElementId{6}}};
  EXPECT_EQ(s.CoveragePairs(), want);
  EXPECT_EQ(ComputeBasicMetrics(s, ElementId{4}), (BasicMetrics{1, 0, 0, 2}));
  EXPECT_EQ(ComputeBasicMetrics(s, ElementId{5}), (BasicMetrics{0, 1, 1, 1}));

  // "rounds" has no stream; FN/FNDA/FNF/FNH in add.info and BRDA in overflow.info.
  const auto has = [&](const std::string& needle) {
    return std::any_of(a.warnings.begin(), a.warnings.end(),
                       [&](const std::string& w) { return w.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("calc.DivTest.rounds"));
  EXPECT_TRUE(has("BRDA"));
  EXPECT_TRUE(has("FNDA"));
}

TEST(AssembleTest, SharedFileSharesElementIds) {
  const std::vector<TestCase> tests = {{TestId{1}, "a", Outcome::kFail},
                                       {TestId{2}, "b", Outcome::kPass}};
  const auto s = AssembleSpectrum(
                     tests, {{"a", ParseLcov("SF:m.c\nDA:1,1\nDA:2,0\nend_of_record\n")},
                             {"b", ParseLcov("SF:m.c\nDA:2,5\nDA:1,0\nend_of_record\n")}})
                     .spectrum;
  ASSERT_EQ(s.elements().size(), 3u);
  EXPECT_EQ(s.CoveringTests(ElementId{2}), (std::vector<TestId>{TestId{1}}));
  EXPECT_EQ(s.CoveringTests(ElementId{3}), (std::vector<TestId>{TestId{2}}));
}

TEST(AssembleTest, JoinErrors) {
  const std::vector<TestCase> tests = {{TestId{1}, "a", Outcome::kFail}};
  const LcovCoverage empty;
  EXPECT_EQ(ThrownCode([&] { AssembleSpectrum(tests, {{"zzz", empty}}); }),
            ErrorCode::kSchemaError);
  EXPECT_EQ(ThrownCode([&] { AssembleSpectrum(tests, {{"a", empty}, {"a", empty}}); }),
            ErrorCode::kDuplicateId);
  const std::vector<TestCase> twice = {{TestId{1}, "a", Outcome::kFail},
                                       {TestId{2}, "a", Outcome::kPass}};
  EXPECT_EQ(ThrownCode([&] { AssembleSpectrum(twice, {}); }), ErrorCode::kDuplicateId);
}

}  // namespace
}  // namespace sbfl
