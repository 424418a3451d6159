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

#include "riskscene/lexer.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace riskscene {

namespace {

std::string positioned(SourcePos pos, const std::string& message) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::string_view kPunctuation = "{}[](),;:=";

}  // namespace

ParseError::ParseError(SourcePos pos, const std::string& message)
    : std::runtime_error(positioned(pos, message)), pos_(pos), message_(message) {}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  SourcePos pos;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }

    Token tok;
    tok.pos = pos;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      tok.kind = TokenKind::kIdent;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      tok.kind = TokenKind::kArrow;
      tok.text = "->";
      advance(2);
    } else if (is_digit(c) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i;
      if (text[j] == '-' || text[j] == '+') ++j;
      bool digits = false;
      while (j < text.size() && is_digit(text[j])) { ++j; digits = true; }
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && is_digit(text[j])) { ++j; digits = true; }
      }
      if (digits && j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '-' || text[k] == '+')) ++k;
        if (k < text.size() && is_digit(text[k])) {
          while (k < text.size() && is_digit(text[k])) ++k;
          j = k;
        }
      }
      if (!digits) throw ParseError(pos, "malformed number");
      if (j < text.size() && is_ident_char(text[j])) {
        throw ParseError(pos, "malformed number '" + std::string(text.substr(i, j - i + 1)) + "'");
      }
      tok.kind = TokenKind::kNumber;
      tok.text = std::string(text.substr(i, j - i));
      const auto parsed = parse_number(tok.text);
      if (!parsed || !std::isfinite(*parsed)) throw ParseError(pos, "number out of range '" + tok.text + "'");
      tok.number = *parsed;
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string body;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == '\n') break;
        if (text[j] == '\\' && j + 1 < text.size() && (text[j + 1] == '"' || text[j + 1] == '\\')) {
          body.push_back(text[j + 1]);
          j += 2;
          continue;
        }
        if (text[j] == '"') {
          closed = true;
          break;
        }
        body.push_back(text[j]);
        ++j;
      }
      if (!closed) throw ParseError(pos, "unterminated string");
      tok.kind = TokenKind::kString;
      tok.text = std::move(body);
      advance(j + 1 - i);
    } else if (kPunctuation.find(c) != std::string_view::npos) {
      tok.kind = TokenKind::kPunct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      const auto uc = static_cast<unsigned char>(c);
      std::string shown = uc >= 0x20 && uc < 0x7f ? std::string(1, c) : "\\x" + std::to_string(uc);
      throw ParseError(pos, "unexpected character '" + shown + "'");
    }
    tokens.push_back(std::move(tok));
  }

  Token end;
  end.kind = TokenKind::kEnd;
  end.pos = pos;
  tokens.push_back(end);
  return tokens;
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::kEnd:
      return "end of input";
    case TokenKind::kString:
      return "string \"" + token.text + "\"";
    case TokenKind::kNumber:
      return "number " + token.text;
    default:
      return "'" + token.text + "'";
  }
}

TokenCursor::TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != TokenKind::kEnd) {
    Token end;
    end.pos = tokens_.empty() ? SourcePos{} : tokens_.back().pos;
    tokens_.push_back(end);
  }
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  const std::size_t at = index_ + ahead;
  return at < tokens_.size() ? tokens_[at] : tokens_.back();
}

const Token& TokenCursor::next() {
  const Token& tok = peek();
  if (index_ + 1 < tokens_.size()) ++index_;
  return tok;
}

bool TokenCursor::is_punct(char c) const {
  const Token& t = peek();
  return t.kind == TokenKind::kPunct && t.text[0] == c;
}

bool TokenCursor::is_keyword(std::string_view word) const {
  const Token& t = peek();
  return t.kind == TokenKind::kIdent && t.text == word;
}

bool TokenCursor::accept_punct(char c) {
  if (!is_punct(c)) return false;
  next();
  return true;
}

bool TokenCursor::accept_keyword(std::string_view word) {
  if (!is_keyword(word)) return false;
  next();
  return true;
}

bool TokenCursor::accept_arrow() {
  if (peek().kind != TokenKind::kArrow) return false;
  next();
  return true;
}

void TokenCursor::expect_punct(char c) {
  if (!accept_punct(c)) fail_here(std::string("expected '") + c + "' but found " + describe(peek()));
}

void TokenCursor::expect_keyword(std::string_view word) {
  if (!accept_keyword(word)) {
    fail_here("expected '" + std::string(word) + "' but found " + describe(peek()));
  }
}

void TokenCursor::expect_arrow() {
  if (!accept_arrow()) fail_here("expected '->' but found " + describe(peek()));
}

std::string TokenCursor::expect_ident(std::string_view what) {
  if (peek().kind != TokenKind::kIdent) {
    fail_here("expected " + std::string(what) + " but found " + describe(peek()));
  }
  return next().text;
}

double TokenCursor::expect_number(std::string_view what) {
  if (peek().kind != TokenKind::kNumber) {
    fail_here("expected " + std::string(what) + " but found " + describe(peek()));
  }
  return next().number;
}

std::string TokenCursor::expect_string(std::string_view what) {
  if (peek().kind != TokenKind::kString) {
    fail_here("expected " + std::string(what) + " but found " + describe(peek()));
  }
  return next().text;
}

std::pair<double, double> TokenCursor::expect_interval() {
  expect_punct('[');
  const double lo = expect_number("interval lower bound");
  expect_punct(',');
  const double hi = expect_number("interval upper bound");
  expect_punct(']');
  return {lo, hi};
}

std::vector<double> TokenCursor::expect_number_list() {
  expect_punct('[');
  std::vector<double> values;
  values.push_back(expect_number());
  while (accept_punct(',')) values.push_back(expect_number());
  expect_punct(']');
  return values;
}

void TokenCursor::fail(const Token& at, const std::string& message) const {
  throw ParseError(at.pos, message);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace riskscene
