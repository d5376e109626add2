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
#include <charconv>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "json.hpp"
#include "sbfl/error.h"

namespace sbfl {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Canonical document

[[noreturn]] void Schema(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::kSchemaError, path + ": " + reason);
}

const Json& Field(const Json& object, const std::string& key,
                  const std::string& path) {
  const auto it = object.find(key);
  if (it == object.end()) Schema(path + key, "missing");
  return *it;
}

std::uint32_t IdField(const Json& value, const std::string& path) {
  if (!value.is_number_unsigned() ||
      value.get<std::uint64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    Schema(path, "expected a non-negative 32-bit integer id");
  }
  return value.get<std::uint32_t>();
}

int IntField(const Json& value, const std::string& path) {
  if (!value.is_number_integer()) Schema(path, "expected an integer");
  const auto v = value.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    Schema(path, "integer out of range");
  }
  return static_cast<int>(v);
}

std::string StringField(const Json& value, const std::string& path) {
  if (!value.is_string()) Schema(path, "expected a string");
  return value.get<std::string>();
}

const Json& ArrayField(const Json& root, const std::string& key) {
  const Json& value = Field(root, key, "");
  if (!value.is_array()) Schema(key, "expected an array");
  return value;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> IdPairs(const Json& array,
                                                             const std::string& key) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    const std::string path = key + "[" + std::to_string(i) + "]";
    const Json& pair = array[i];
    if (!pair.is_array() || pair.size() != 2) Schema(path, "expected a 2-element array");
    out.emplace_back(IdField(pair[0], path + "[0]"), IdField(pair[1], path + "[1]"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text helpers

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool ParseInt(std::string_view text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

[[noreturn]] void BadLcov(std::size_t line_no, std::string_view line,
                          const std::string& why) {
  throw Error(ErrorCode::kMalformedRecord,
              "line " + std::to_string(line_no) + ": " + why + ": '" +
                  std::string(line) + "'");
}

// ---------------------------------------------------------------------------
// JUnit

void CollectTestCases(const boost::property_tree::ptree& node,
                      std::vector<TestCase>& out) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (name != "testcase") {
      CollectTestCases(child, out);
      continue;
    }
    const std::string classname = child.get("<xmlattr>.classname", "");
    const auto test_name = child.get_optional<std::string>("<xmlattr>.name");
    if (!test_name) {
      throw Error(ErrorCode::kMalformedDocument,
                  "testcase #" + std::to_string(out.size() + 1) +
                      " has no name attribute");
    }
    bool failed = false;
    bool skipped = false;
    for (const auto& [tag, unused] : child) {
      if (tag == "failure" || tag == "error") failed = true;
      if (tag == "skipped") skipped = true;
    }
    if (skipped && !failed) continue;
    TestCase test;
    test.id = TestId{static_cast<std::uint32_t>(out.size() + 1)};
    test.name = classname.empty() ? *test_name : classname + "." + *test_name;
    test.outcome = failed ? Outcome::kFail : Outcome::kPass;
    out.push_back(std::move(test));
  }
}

}  // namespace

SpectrumDocument ParseCanonical(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    Schema("$", std::string("not valid JSON (") + e.what() + ")");
  }
  if (!root.is_object()) Schema("$", "expected an object");

  SpectrumDocument doc;
  const std::string version = StringField(Field(root, "version", ""), "version");
  if (version != kSpectrumVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported document version '" + version + "', expected '" +
                    std::string(kSpectrumVersion) + "'");
  }
  for (const auto& [key, unused] : root.items()) {
    if (key != "version" && key != "elements" && key != "tests" &&
        key != "coverage" && key != "call_graph") {
      doc.warnings.push_back("ignored unknown field '" + key + "'");
    }
  }

  const Json& elements_json = ArrayField(root, "elements");
  const Json& tests_json = ArrayField(root, "tests");
  const Json& coverage_json = ArrayField(root, "coverage");

  std::vector<CodeElement> elements;
  elements.reserve(elements_json.size());
  for (std::size_t i = 0; i < elements_json.size(); ++i) {
    const std::string path = "elements[" + std::to_string(i) + "].";
    const Json& e = elements_json[i];
    if (!e.is_object()) Schema(path.substr(0, path.size() - 1), "expected an object");
    CodeElement element;
    element.id = ElementId{IdField(Field(e, "id", path), path + "id")};
    element.name = StringField(Field(e, "name", path), path + "name");
    const std::string kind = StringField(Field(e, "kind", path), path + "kind");
    const auto parsed_kind = ParseKind(kind);
    if (!parsed_kind) {
      Schema(path + "kind", "unknown kind '" + kind +
                                "' (STATEMENT, METHOD, CLASS, FILE, PACKAGE)");
    }
    element.kind = *parsed_kind;
    element.location.path = StringField(Field(e, "path", path), path + "path");
    element.location.start_line =
        IntField(Field(e, "start_line", path), path + "start_line");
    element.location.end_line = IntField(Field(e, "end_line", path), path + "end_line");
    const auto parent = e.find("parent");
    if (parent != e.end() && !parent->is_null()) {
      element.parent = ElementId{IdField(*parent, path + "parent")};
    }
    elements.push_back(std::move(element));
  }

  std::vector<TestCase> tests;
  tests.reserve(tests_json.size());
  for (std::size_t i = 0; i < tests_json.size(); ++i) {
    const std::string path = "tests[" + std::to_string(i) + "].";
    const Json& t = tests_json[i];
    if (!t.is_object()) Schema(path.substr(0, path.size() - 1), "expected an object");
    TestCase test;
    test.id = TestId{IdField(Field(t, "id", path), path + "id")};
    test.name = StringField(Field(t, "name", path), path + "name");
    const std::string outcome = StringField(Field(t, "outcome", path), path + "outcome");
    const auto parsed = ParseOutcome(outcome);
    if (!parsed) Schema(path + "outcome", "expected PASS or FAIL, got '" + outcome + "'");
    test.outcome = *parsed;
    tests.push_back(std::move(test));
  }

  std::vector<CoveragePair> coverage;
  for (const auto& [test, element] : IdPairs(coverage_json, "coverage")) {
    coverage.push_back({TestId{test}, ElementId{element}});
  }

  doc.spectrum = Spectrum::Build(std::move(elements), std::move(tests), coverage);

  if (const auto it = root.find("call_graph"); it != root.end() && !it->is_null()) {
    if (!it->is_array()) Schema("call_graph", "expected an array");
    CallGraph graph;
    for (const auto& [caller, callee] : IdPairs(*it, "call_graph")) {
      graph.AddEdge(ElementId{caller}, ElementId{callee});
    }
    graph.Validate(doc.spectrum);
    doc.call_graph = std::move(graph);
  }
  return doc;
}

std::string ExportCanonical(const Spectrum& spectrum,
                            const std::optional<CallGraph>& call_graph) {
  std::string out = "{\n  \"version\": ";
  out += Json(std::string(kSpectrumVersion)).dump();

  auto write_array = [&out](const char* key, const std::vector<std::string>& rows) {
    out += ",\n  \"";
    out += key;
    out += "\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out += i == 0 ? "\n    " : ",\n    ";
      out += rows[i];
    }
    out += rows.empty() ? "]" : "\n  ]";
  };

  std::vector<std::string> rows;
  rows.reserve(spectrum.elements().size());
  for (const CodeElement& e : spectrum.elements()) {
    OrderedJson j;
    j["id"] = e.id.value;
    j["name"] = e.name;
    j["kind"] = std::string(KindName(e.kind));
    j["path"] = e.location.path;
    j["start_line"] = e.location.start_line;
    j["end_line"] = e.location.end_line;
    j["parent"] = e.parent ? OrderedJson(e.parent->value) : OrderedJson(nullptr);
    rows.push_back(j.dump());
  }
  write_array("elements", rows);

  rows.clear();
  for (const TestCase& t : spectrum.tests()) {
    OrderedJson j;
    j["id"] = t.id.value;
    j["name"] = t.name;
    j["outcome"] = std::string(OutcomeName(t.outcome));
    rows.push_back(j.dump());
  }
  write_array("tests", rows);

  rows.clear();
  for (const CoveragePair& p : spectrum.CoveragePairs()) {
    rows.push_back("[" + std::to_string(p.test.value) + "," +
                   std::to_string(p.element.value) + "]");
  }
  write_array("coverage", rows);

  if (call_graph) {
    rows.clear();
    for (const auto& [from, to] : call_graph->edges()) {
      rows.push_back("[" + std::to_string(from.value) + "," +
                     std::to_string(to.value) + "]");
    }
    write_array("call_graph", rows);
  }
  out += "\n}\n";
  return out;
}

LcovCoverage ParseLcov(std::string_view text, LcovMergePolicy policy) {
  std::map<std::string, std::map<int, bool>> files;
  std::set<std::pair<std::string, int>> seen;
  std::set<std::string> warned;
  LcovCoverage out;

  const auto lines = Lines(text);
  std::optional<std::string> current;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    if (line == "end_of_record") {
      if (!current) BadLcov(line_no, line, "end_of_record without SF");
      current.reset();
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) BadLcov(line_no, line, "expected TAG:value");
    const std::string_view tag = line.substr(0, colon);
    const std::string_view value = line.substr(colon + 1);

    if (tag == "SF") {
      if (current) BadLcov(line_no, line, "SF inside an open record");
      if (value.empty()) BadLcov(line_no, line, "empty source path");
      current = std::string(value);
      files[*current];
    } else if (tag == "DA") {
      if (!current) BadLcov(line_no, line, "DA outside a record");
      // DA:<line>,<hits>[,<checksum>]
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) BadLcov(line_no, line, "expected DA:<line>,<hits>");
      std::string_view hits_text = value.substr(comma + 1);
      if (const auto second = hits_text.find(','); second != std::string_view::npos) {
        hits_text = hits_text.substr(0, second);
      }
      int line_number = 0;
      long long hits = 0;
      if (!ParseInt(value.substr(0, comma), line_number) || line_number <= 0) {
        BadLcov(line_no, line, "line number must be a positive integer");
      }
      if (!ParseInt(hits_text, hits) || hits < 0) {
        BadLcov(line_no, line, "hit count must be a non-negative integer");
      }
      if (!seen.insert({*current, line_number}).second &&
          policy == LcovMergePolicy::kRejectDuplicates) {
        BadLcov(line_no, line, "duplicate DA record");
      }
      bool& covered = files[*current][line_number];
      covered = covered || hits > 0;
    } else if (tag == "TN" || tag == "LF" || tag == "LH") {
      // Summary records carry nothing the spectrum needs.
    } else if (tag == "FN" || tag == "FNDA" || tag == "FNF" || tag == "FNH" ||
               tag == "BRDA" || tag == "BRF" || tag == "BRH") {
      if (warned.insert(std::string(tag)).second) {
        out.warnings.push_back("ignored " + std::string(tag) + " records");
      }
    } else {
      BadLcov(line_no, line, "unknown record type");
    }
  }
  if (current) {
    out.warnings.push_back("record for '" + *current + "' has no end_of_record");
  }
  for (auto& [path, covered] : files) {
    out.files.push_back({path, std::move(covered)});
  }
  return out;
}

std::vector<TestCase> ParseJUnit(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kMalformedDocument,
                "invalid JUnit XML: line " + std::to_string(e.line()) + ": " +
                    e.message());
  }
  const auto root = tree.begin();
  if (root == tree.end() ||
      (root->first != "testsuites" && root->first != "testsuite")) {
    throw Error(ErrorCode::kMalformedDocument,
                "JUnit report must have a <testsuites> or <testsuite> root");
  }
  std::vector<TestCase> out;
  CollectTestCases(tree, out);
  return out;
}

std::vector<ManifestEntry> ParseManifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  const auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (Trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kMalformedRecord,
                  "manifest line " + std::to_string(i + 1) +
                      ": expected '<test name><TAB><lcov path>': '" +
                      std::string(line) + "'");
    }
    out.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  return out;
}

AssembledSpectrum AssembleSpectrum(
    const std::vector<TestCase>& tests,
    const std::vector<std::pair<std::string, LcovCoverage>>& coverage) {
  AssembledSpectrum out;

  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (!by_name.emplace(tests[i].name, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "test name '" + tests[i].name + "' appears twice in the report");
    }
  }
  std::map<std::string, const LcovCoverage*> streams;
  for (const auto& [name, lcov] : coverage) {
    if (!by_name.count(name)) {
      throw Error(ErrorCode::kSchemaError,
                  "manifest names test '" + name + "', which the report lacks");
    }
    if (!streams.emplace(name, &lcov).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "manifest lists test '" + name + "' twice");
    }
    for (const std::string& w : lcov.warnings) {
      out.warnings.push_back(name + ": " + w);
    }
  }

  // Element numbering: by path, the FILE first, then its lines ascending.
  std::map<std::string, std::set<int>> known;
  for (const auto& [name, lcov] : coverage) {
    for (const LcovFile& file : lcov.files) {
      auto& lines = known[file.path];
      for (const auto& [line, covered] : file.lines) lines.insert(line);
    }
  }
  std::vector<CodeElement> elements;
  std::map<std::pair<std::string, int>, ElementId> statement_ids;
  std::uint32_t next_id = 1;
  for (const auto& [path, lines] : known) {
    const ElementId file_id{next_id++};
    elements.push_back({file_id, path, ElementKind::kFile, {path, 0, 0}, std::nullopt});
    for (int line : lines) {
      const ElementId id{next_id++};
      statement_ids.emplace(std::make_pair(path, line), id);
      elements.push_back({id, path + ":" + std::to_string(line),
                          ElementKind::kStatement, {path, line, line}, file_id});
    }
  }

  std::vector<TestCase> kept;
  std::vector<CoveragePair> pairs;
  for (const TestCase& test : tests) {
    const auto stream = streams.find(test.name);
    if (stream == streams.end()) {
      out.warnings.push_back("test '" + test.name +
                             "' has no coverage stream; left out of the spectrum");
      continue;
    }
    kept.push_back(test);
    for (const LcovFile& file : stream->second->files) {
      for (const auto& [line, covered] : file.lines) {
        if (covered) pairs.push_back({test.id, statement_ids.at({file.path, line})});
      }
    }
  }
  out.spectrum = Spectrum::Build(std::move(elements), std::move(kept), pairs);
  return out;
}

}  // namespace sbfl
