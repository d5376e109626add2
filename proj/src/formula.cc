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

#include "sbfl/formula.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "sbfl/error.h"

namespace sbfl {

struct Formula::Node {
  enum class Kind { kNumber, kTerminal, kAdd, kSub, kMul, kDiv, kSqrt, kMin, kMax };

  Kind kind = Kind::kNumber;
  double value = 0.0;
  int terminal = 0;
  std::unique_ptr<const Node> lhs;
  std::unique_ptr<const Node> rhs;
};

namespace {

using Node = Formula::Node;
using NodePtr = std::unique_ptr<const Node>;

// Terminal order matches the `which` index stored in Formula::Terminal.
constexpr std::string_view kTerminalNames[] = {"ef", "ep", "nf", "np", "F", "P"};

double TerminalValue(int which, const BasicMetrics& m, Totals t) {
  switch (which) {
    case 0: return m.ef;
    case 1: return m.ep;
    case 2: return m.nf;
    case 3: return m.np;
    case 4: return t.failing;
    default: return t.passing;
  }
}

double SafeDiv(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
double SafeSqrt(double x) { return x < 0.0 ? 0.0 : std::sqrt(x); }
double Finite(double x) { return std::isfinite(x) ? x : 0.0; }

double Eval(const Node& n, const BasicMetrics& m, Totals t) {
  switch (n.kind) {
    case Node::Kind::kNumber: return n.value;
    case Node::Kind::kTerminal: return TerminalValue(n.terminal, m, t);
    case Node::Kind::kAdd: return Eval(*n.lhs, m, t) + Eval(*n.rhs, m, t);
    case Node::Kind::kSub: return Eval(*n.lhs, m, t) - Eval(*n.rhs, m, t);
    case Node::Kind::kMul: return Eval(*n.lhs, m, t) * Eval(*n.rhs, m, t);
    case Node::Kind::kDiv: return SafeDiv(Eval(*n.lhs, m, t), Eval(*n.rhs, m, t));
    case Node::Kind::kSqrt: return SafeSqrt(Eval(*n.lhs, m, t));
    case Node::Kind::kMin: return std::min(Eval(*n.lhs, m, t), Eval(*n.rhs, m, t));
    case Node::Kind::kMax: return std::max(Eval(*n.lhs, m, t), Eval(*n.rhs, m, t));
  }
  return 0.0;
}

// Closed forms, written independently of the expression evaluator.
double Tarantula(const BasicMetrics& m, Totals t) {
  const double fail_ratio = SafeDiv(m.ef, t.failing);
  const double pass_ratio = SafeDiv(m.ep, t.passing);
  return SafeDiv(fail_ratio, fail_ratio + pass_ratio);
}

double Ochiai(const BasicMetrics& m, Totals t) {
  return SafeDiv(m.ef, std::sqrt(static_cast<double>(t.failing) * (static_cast<double>(m.ef) + m.ep)));
}

// Single-fault Barinel, 1 - ep/(ep+ef). Written as ef/(ef+ep), which is the
// same value whenever the element was executed and 0 when it was not.
double Barinel(const BasicMetrics& m, Totals) {
  return SafeDiv(m.ef, static_cast<double>(m.ef) + m.ep);
}

struct CatalogEntry {
  Builtin builtin;
  std::string_view name;
  std::string_view definition;
};

constexpr CatalogEntry kCatalog[] = {
    {Builtin::kTarantula, "TARANTULA", "(ef/F)/((ef/F)+(ep/P))"},
    {Builtin::kOchiai, "OCHIAI", "ef / sqrt(F*(ef+ep))"},
    {Builtin::kBarinel, "BARINEL", "ef/(ef+ep)"},
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr ParseAll() {
    NodePtr root = ParseExpr();
    SkipSpace();
    if (pos_ != text_.size()) Fail("expected operator or end of input");
    return root;
  }

  struct TerminalSpan {
    std::size_t offset;
    std::size_t length;
    int which;
  };
  // Terminal identifiers in source order.
  std::vector<TerminalSpan> terminals;

 private:
  [[noreturn]] void Fail(const std::string& expected) const {
    std::string found = pos_ < text_.size()
                            ? "'" + std::string(1, text_[pos_]) + "'"
                            : "end of input";
    throw ParseError(pos_ + 1, expected + ", found " + found);
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void Expect(char c) {
    if (!Accept(c)) Fail(std::string("expected '") + c + "'");
  }

  static NodePtr Binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  NodePtr ParseExpr() {
    NodePtr lhs = ParseTerm();
    for (;;) {
      if (Accept('+')) {
        lhs = Binary(Node::Kind::kAdd, std::move(lhs), ParseTerm());
      } else if (Accept('-')) {
        lhs = Binary(Node::Kind::kSub, std::move(lhs), ParseTerm());
      } else {
        return lhs;
      }
    }
  }

  NodePtr ParseTerm() {
    NodePtr lhs = ParseFactor();
    for (;;) {
      if (Accept('*')) {
        lhs = Binary(Node::Kind::kMul, std::move(lhs), ParseFactor());
      } else if (Accept('/')) {
        lhs = Binary(Node::Kind::kDiv, std::move(lhs), ParseFactor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr ParseFactor() {
    SkipSpace();
    if (pos_ >= text_.size()) {
      Fail("expected number, identifier, function or '('");
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = ParseExpr();
      Expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return ParseNumber();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return ParseIdentifier();
    }
    Fail("expected number, identifier, function or '('");
  }

  NodePtr ParseNumber() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::kNumber;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, n->value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      Fail("expected a valid number");
    }
    return n;
  }

  NodePtr ParseIdentifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view ident = text_.substr(start, pos_ - start);

    for (int i = 0; i < static_cast<int>(std::size(kTerminalNames)); ++i) {
      if (ident == kTerminalNames[i]) {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::kTerminal;
        n->terminal = i;
        terminals.push_back({start, ident.size(), i});
        return n;
      }
    }

    int arity = 0;
    Node::Kind kind;
    if (ident == "sqrt") {
      kind = Node::Kind::kSqrt;
      arity = 1;
    } else if (ident == "min") {
      kind = Node::Kind::kMin;
      arity = 2;
    } else if (ident == "max") {
      kind = Node::Kind::kMax;
      arity = 2;
    } else {
      throw Error(ErrorCode::kUnknownIdentifier,
                  "offset " + std::to_string(start + 1) +
                      ": unknown identifier '" + std::string(ident) +
                      "' (expected ef, ep, nf, np, F, P, sqrt, min or max)");
    }

    Expect('(');
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = ParseExpr();
    if (arity == 2) {
      Expect(',');
      n->rhs = ParseExpr();
    }
    Expect(')');
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string FormatCount(double v) {
  // Terminals are always non-negative integers.
  return std::to_string(static_cast<unsigned long long>(v));
}

}  // namespace

std::vector<BuiltinInfo> ListBuiltins() {
  std::vector<BuiltinInfo> out;
  for (const auto& entry : kCatalog) {
    out.push_back({entry.builtin, std::string(entry.name),
                   std::string(entry.definition)});
  }
  return out;
}

Formula Formula::Parse(std::string_view text) {
  Parser parser(text);
  Formula f;
  f.root_ = parser.ParseAll();
  f.text_ = std::string(text);
  f.name_ = f.text_;
  for (const auto& span : parser.terminals) {
    f.terminals_.push_back({span.offset, span.length, span.which});
  }
  return f;
}

Formula Formula::FromBuiltin(Builtin builtin) {
  for (const auto& entry : kCatalog) {
    if (entry.builtin == builtin) {
      Formula f = Parse(entry.definition);
      f.builtin_ = builtin;
      f.name_ = std::string(entry.name);
      return f;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown builtin");
}

Formula Formula::FromNameOrExpression(std::string_view text) {
  for (const auto& entry : kCatalog) {
    if (text.size() == entry.name.size() &&
        std::equal(text.begin(), text.end(), entry.name.begin(),
                   [](char a, char b) {
                     return std::toupper(static_cast<unsigned char>(a)) == b;
                   })) {
      return FromBuiltin(entry.builtin);
    }
  }
  return Parse(text);
}

double Formula::Evaluate(const BasicMetrics& metrics, Totals totals) const {
  if (builtin_) {
    switch (*builtin_) {
      case Builtin::kTarantula: return Finite(Tarantula(metrics, totals));
      case Builtin::kOchiai: return Finite(Ochiai(metrics, totals));
      case Builtin::kBarinel: return Finite(Barinel(metrics, totals));
    }
  }
  return root_ ? Finite(Eval(*root_, metrics, totals)) : 0.0;
}

std::string Formula::Substitute(const BasicMetrics& metrics, Totals totals) const {
  std::string out;
  std::size_t pos = 0;
  for (const Terminal& t : terminals_) {
    out.append(text_, pos, t.offset - pos);
    out += FormatCount(TerminalValue(t.which, metrics, totals));
    pos = t.offset + t.length;
  }
  out.append(text_, pos, std::string::npos);
  return out;
}

}  // namespace sbfl
