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

// Reading and writing spectra.
//
// The canonical document (version "sbfl-spectrum/1") is JSON:
//
//   {
//     "version": "sbfl-spectrum/1",
//     "elements": [{"id": 1, "name": "s1", "kind": "STATEMENT", "path": "a.c",
//                   "start_line": 3, "end_line": 3, "parent": 10}, ...],
//     "tests": [{"id": 1, "name": "t1", "outcome": "FAIL"}, ...],
//     "coverage": [[<test id>, <element id>], ...],
//     "call_graph": [[<caller method id>, <callee method id>], ...]   (optional)
//   }
//
// "parent" may be null or absent. Unknown top-level keys are ignored with a
// warning.
//
// External formats: one LCOV stream per test (SF / DA / end_of_record), a
// JUnit XML report for outcomes, and a manifest joining the two, one line per
// test: "<test name>\t<lcov file path>".

#ifndef SBFL_INGESTION_H_
#define SBFL_INGESTION_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbfl/call_graph.h"
#include "sbfl/spectrum.h"

namespace sbfl {

inline constexpr std::string_view kSpectrumVersion = "sbfl-spectrum/1";

struct SpectrumDocument {
  Spectrum spectrum;
  std::optional<CallGraph> call_graph;
  std::vector<std::string> warnings;
};

// Throws kSchemaError ("<field path>: <reason>"), kVersionMismatch, and any
// Spectrum::Build / CallGraph::Validate error.
SpectrumDocument ParseCanonical(std::string_view text);

// Deterministic: registry order, fixed key order, one record per line.
std::string ExportCanonical(const Spectrum& spectrum,
                            const std::optional<CallGraph>& call_graph = std::nullopt);

enum class LcovMergePolicy {
  // A line is covered if any DA record for it has hits > 0.
  kAnyHit,
  // A repeated DA record for the same (file, line) is a MalformedRecord.
  kRejectDuplicates,
};

struct LcovFile {
  std::string path;
  // line -> executed at least once
  std::map<int, bool> lines;
};

struct LcovCoverage {
  // Sorted by path.
  std::vector<LcovFile> files;
  std::vector<std::string> warnings;
};

// Throws kMalformedRecord naming the 1-based line number and its content.
LcovCoverage ParseLcov(std::string_view text,
                       LcovMergePolicy policy = LcovMergePolicy::kAnyHit);

// Every <testcase>: FAIL if it holds <failure> or <error>, excluded if it
// holds <skipped>, PASS otherwise. Name is "classname.name". Ids are 1..n in
// document order. Throws kMalformedDocument.
std::vector<TestCase> ParseJUnit(std::string_view text);

struct ManifestEntry {
  std::string test_name;
  std::string lcov_path;
};

// Blank lines and lines starting with '#' are skipped. Throws
// kMalformedRecord.
std::vector<ManifestEntry> ParseManifest(std::string_view text);

struct AssembledSpectrum {
  Spectrum spectrum;
  std::vector<std::string> warnings;
};

// Joins outcomes with per-test coverage by exact test name. Files become FILE
// elements and lines STATEMENT elements, numbered by (path, line). Tests with
// no coverage stream are left out with a warning; a stream naming a test the
// report does not have is a kSchemaError.
AssembledSpectrum AssembleSpectrum(
    const std::vector<TestCase>& tests,
    const std::vector<std::pair<std::string, LcovCoverage>>& coverage);

}  // namespace sbfl

#endif  // SBFL_INGESTION_H_
