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

// Suspiciousness formulas: three built-ins plus a small expression language.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | ident | '(' expr ')' | func '(' expr (',' expr)? ')'
//   func   := sqrt | min | max          (sqrt takes 1 argument, min/max 2)
//   ident  := ef | ep | nf | np | F | P (case-sensitive)
//
// Arithmetic is total: x/0 (including 0/0) is 0, sqrt of a negative is 0, and
// any non-finite result is reported as 0. Custom formulas are not clamped.

#ifndef SBFL_FORMULA_H_
#define SBFL_FORMULA_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbfl/spectrum.h"

namespace sbfl {

enum class Builtin { kTarantula, kOchiai, kBarinel };

struct BuiltinInfo {
  Builtin builtin;
  std::string name;
  std::string definition;
};

// Catalog of the built-ins with their definitions in formula syntax. Parsing a
// definition yields a formula that scores identically to the built-in.
std::vector<BuiltinInfo> ListBuiltins();

class Formula {
 public:
  // An empty formula; scores everything 0. Useful only as a placeholder.
  Formula() = default;

  static Formula FromBuiltin(Builtin builtin);
  // Throws ParseError, or Error(kUnknownIdentifier).
  static Formula Parse(std::string_view text);
  // A built-in name (case-insensitive) or an expression.
  static Formula FromNameOrExpression(std::string_view text);

  double Evaluate(const BasicMetrics& metrics, Totals totals) const;

  // Definition text with every terminal replaced by its value, e.g.
  // "1 / sqrt(1*(1+1))". Parsing and evaluating it reproduces Evaluate().
  std::string Substitute(const BasicMetrics& metrics, Totals totals) const;

  std::optional<Builtin> builtin() const { return builtin_; }
  // "OCHIAI" for built-ins, the expression text otherwise.
  const std::string& name() const { return name_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  struct Terminal {
    std::size_t offset;
    std::size_t length;
    int which;
  };

  std::optional<Builtin> builtin_;
  std::string name_;
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::vector<Terminal> terminals_;
};

}  // namespace sbfl

#endif  // SBFL_FORMULA_H_
