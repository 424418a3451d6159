// Copyright 2026 The riskscene Authors
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

// Shared lexical layer for the campaign, bow-tie model and landscape file
// formats: whitespace-insensitive, `#` line comments, 1-based positions.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskscene {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Diagnostic raised by every parser in the project.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& message);

  SourcePos pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

enum class TokenKind { kIdent, kNumber, kString, kPunct, kArrow, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;  // identifier / string body / punctuation char / number literal
  double number = 0.0;
  SourcePos pos;
};

/// Splits a document into tokens. Throws ParseError on lexical errors.
std::vector<Token> tokenize(std::string_view text);

/// Recursive-descent helper over a token vector.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::kEnd; }

  bool is_punct(char c) const;
  bool is_keyword(std::string_view word) const;
  bool accept_punct(char c);
  bool accept_keyword(std::string_view word);
  bool accept_arrow();

  void expect_punct(char c);
  void expect_keyword(std::string_view word);
  void expect_arrow();
  std::string expect_ident(std::string_view what = "identifier");
  double expect_number(std::string_view what = "number");
  std::string expect_string(std::string_view what = "string");

  /// `[` NUM `,` NUM `]`
  std::pair<double, double> expect_interval();
  /// `[` NUM (`,` NUM)* `]`
  std::vector<double> expect_number_list();

  [[noreturn]] void fail(const Token& at, const std::string& message) const;
  [[noreturn]] void fail_here(const std::string& message) const { fail(peek(), message); }

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

std::string describe(const Token& token);

/// Shortest decimal text that reads back to exactly the same double.
std::string format_number(double value);

/// Strict full-string parse of a decimal number.
std::optional<double> parse_number(std::string_view text);

}  // namespace riskscene
