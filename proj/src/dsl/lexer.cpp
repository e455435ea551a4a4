#include "roughstat/dsl/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace roughstat::dsl {
namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the UTF-8 sequence starting with lead byte c (1 for invalid bytes).
std::size_t utf8_length(unsigned char c) {
  if (c >= 0xF0 && c < 0xF8) return 4;
  if (c >= 0xE0) return 3;
  if (c >= 0xC0) return 2;
  return 1;
}

}  // namespace

std::string to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "number";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::Logical: return "logical";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t size = source.size();
  auto emit = [&](TokenKind kind, std::size_t start, std::size_t end) {
    tokens.push_back({kind, std::string(source.substr(start, end - start)), start + 1});
  };

  while (i < size) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < size && source[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < size && is_digit(source[i + 1]))) {
      while (i < size && is_digit(source[i])) ++i;
      if (i < size && source[i] == '.') {
        ++i;
        while (i < size && is_digit(source[i])) ++i;
      }
      if (i < size && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < size && (source[j] == '+' || source[j] == '-')) ++j;
        if (j < size && is_digit(source[j])) {
          i = j;
          while (i < size && is_digit(source[i])) ++i;
        }
      }
      emit(TokenKind::Number, start, i);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < size && is_ident_char(source[i])) ++i;
      const auto word = source.substr(start, i - start);
      if (word == "if" || word == "then" || word == "else") {
        emit(TokenKind::Keyword, start, i);
      } else if (word == "and" || word == "or" || word == "not") {
        emit(TokenKind::Logical, start, i);
      } else {
        emit(TokenKind::Identifier, start, i);
      }
      continue;
    }
    switch (c) {
      case '(': emit(TokenKind::LParen, i, i + 1); ++i; continue;
      case ')': emit(TokenKind::RParen, i, i + 1); ++i; continue;
      case ',': emit(TokenKind::Comma, i, i + 1); ++i; continue;
      case '+': case '-': case '*': case '/': case '^': case '%':
        emit(TokenKind::Operator, i, i + 1);
        ++i;
        continue;
      case '<': case '>':
        i += (i + 1 < size && source[i + 1] == '=') ? 2 : 1;
        emit(TokenKind::Operator, start, i);
        continue;
      case '=': case '!':
        if (i + 1 < size && source[i + 1] == '=') {
          i += 2;
          emit(TokenKind::Operator, start, i);
          continue;
        }
        break;
      default:
        break;
    }
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(c)), size - i);
    throw LexError(std::string(source.substr(i, len)), i + 1);
  }
  tokens.push_back({TokenKind::End, "", size + 1});
  return tokens;
}

}  // namespace roughstat::dsl
