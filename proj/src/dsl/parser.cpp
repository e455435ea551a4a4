#include "roughstat/dsl/parser.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace roughstat::dsl {
namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End)
      throw ParseError("token stream must end with an end token", 1);
  }

  Expr parse_all() {
    Expr e = expr();
    if (peek().kind != TokenKind::End) fail("expected end of input");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  bool accept(TokenKind kind, std::string_view text) {
    if (peek().is(kind, text)) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string found =
        t.kind == TokenKind::End ? "end of input" : "'" + t.lexeme + "'";
    throw ParseError(what + ", found " + found, t.position);
  }

  void expect(TokenKind kind, std::string_view text) {
    if (!accept(kind, text)) fail("expected '" + std::string(text) + "'");
  }

  static void require(const Expr& e, ValueType type, std::size_t position) {
    if (e.type() == type) return;
    throw ParseError(type == ValueType::Number ? "expected numeric expression"
                                               : "expected boolean condition",
                     position);
  }

  Expr expr() {
    if (accept(TokenKind::Keyword, "if")) {
      const auto cond_at = peek().position;
      Expr cond = orcond();
      require(cond, ValueType::Boolean, cond_at);
      expect(TokenKind::Keyword, "then");
      Expr then_branch = expr();
      expect(TokenKind::Keyword, "else");
      const auto else_at = peek().position;
      Expr else_branch = expr();
      if (else_branch.type() != then_branch.type()) {
        throw ParseError("branches of a conditional must have the same type", else_at);
      }
      return Expr::conditional(std::move(cond), std::move(then_branch), std::move(else_branch));
    }
    return orcond();
  }

  Expr orcond() {
    auto at = peek().position;
    Expr lhs = andcond();
    while (peek().is(TokenKind::Logical, "or")) {
      require(lhs, ValueType::Boolean, at);
      advance();
      at = peek().position;
      Expr rhs = andcond();
      require(rhs, ValueType::Boolean, at);
      lhs = Expr::binary(BinaryOp::Or, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr andcond() {
    auto at = peek().position;
    Expr lhs = notcond();
    while (peek().is(TokenKind::Logical, "and")) {
      require(lhs, ValueType::Boolean, at);
      advance();
      at = peek().position;
      Expr rhs = notcond();
      require(rhs, ValueType::Boolean, at);
      lhs = Expr::binary(BinaryOp::And, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr notcond() {
    if (accept(TokenKind::Logical, "not")) {
      const auto at = peek().position;
      Expr operand = notcond();
      require(operand, ValueType::Boolean, at);
      return Expr::unary(UnaryOp::Not, std::move(operand));
    }
    return comparison();
  }

  Expr comparison() {
    const auto at = peek().position;
    Expr lhs = sum();
    static constexpr std::pair<std::string_view, CompareOp> kRelops[] = {
        {"<", CompareOp::Lt}, {"<=", CompareOp::Le}, {">", CompareOp::Gt},
        {">=", CompareOp::Ge}, {"==", CompareOp::Eq}, {"!=", CompareOp::Ne},
    };
    for (const auto& [text, op] : kRelops) {
      if (peek().is(TokenKind::Operator, text)) {
        require(lhs, ValueType::Number, at);
        advance();
        const auto rhs_at = peek().position;
        Expr rhs = sum();
        require(rhs, ValueType::Number, rhs_at);
        return Expr::compare(op, std::move(lhs), std::move(rhs));
      }
    }
    return lhs;
  }

  Expr sum() {
    auto at = peek().position;
    Expr lhs = term();
    while (peek().is(TokenKind::Operator, "+") || peek().is(TokenKind::Operator, "-")) {
      require(lhs, ValueType::Number, at);
      const auto op = advance().lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub;
      at = peek().position;
      Expr rhs = term();
      require(rhs, ValueType::Number, at);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr term() {
    auto at = peek().position;
    Expr lhs = factor();
    while (peek().is(TokenKind::Operator, "*") || peek().is(TokenKind::Operator, "/") ||
           peek().is(TokenKind::Operator, "%")) {
      require(lhs, ValueType::Number, at);
      const auto& sym = advance().lexeme;
      const auto op = sym == "*" ? BinaryOp::Mul : sym == "/" ? BinaryOp::Div : BinaryOp::Mod;
      at = peek().position;
      Expr rhs = factor();
      require(rhs, ValueType::Number, at);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr factor() {
    if (accept(TokenKind::Operator, "-")) {
      const auto at = peek().position;
      Expr operand = factor();
      require(operand, ValueType::Number, at);
      return Expr::unary(UnaryOp::Neg, std::move(operand));
    }
    return power();
  }

  Expr power() {
    const auto at = peek().position;
    Expr lhs = base();
    if (accept(TokenKind::Operator, "^")) {
      require(lhs, ValueType::Number, at);
      const auto rhs_at = peek().position;
      Expr rhs = factor();
      require(rhs, ValueType::Number, rhs_at);
      return Expr::binary(BinaryOp::Pow, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr base() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: {
        double value = 0.0;
        const char* first = t.lexeme.data();
        const char* last = first + t.lexeme.size();
        const auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc() || res.ptr != last) {
          throw ParseError("malformed number '" + t.lexeme + "'", t.position);
        }
        advance();
        return Expr::literal(value);
      }
      case TokenKind::Identifier: {
        if (t.lexeme == "k" || t.lexeme == "x") {
          advance();
          return Expr::variable(t.lexeme == "k" ? Variable::K : Variable::X);
        }
        const auto fn = find_builtin(t.lexeme);
        if (!fn) {
          if (tokens_[pos_ + 1].kind == TokenKind::LParen) {
            throw ParseError("unknown function '" + t.lexeme + "'", t.position);
          }
          throw ParseError("unknown variable '" + t.lexeme + "'", t.position);
        }
        const auto call_at = t.position;
        advance();
        expect(TokenKind::LParen, "(");
        std::vector<Expr> args;
        std::vector<std::size_t> positions;
        if (peek().kind != TokenKind::RParen) {
          do {
            positions.push_back(peek().position);
            args.push_back(expr());
          } while (accept(TokenKind::Comma, ","));
        }
        expect(TokenKind::RParen, ")");
        if (static_cast<int>(args.size()) != fn->arity) {
          throw ParseError("function '" + std::string(fn->name) + "' takes " +
                               std::to_string(fn->arity) + " argument" +
                               (fn->arity == 1 ? "" : "s") + ", got " +
                               std::to_string(args.size()),
                           call_at);
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
          require(args[i], ValueType::Number, positions[i]);
        }
        return Expr::call(fn->id, std::move(args));
      }
      case TokenKind::LParen: {
        advance();
        Expr inner = expr();
        expect(TokenKind::RParen, ")");
        return inner;
      }
      default:
        fail("expected base expression");
    }
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

std::optional<Interval> domain_directive(std::string_view source) {
  std::istringstream lines{std::string(source)};
  std::string line;
  while (std::getline(lines, line)) {
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line.compare(start, 8, "#@domain") != 0) continue;
    std::istringstream fields(line.substr(start + 8));
    double lo = 0.0;
    double hi = 0.0;
    if (!(fields >> lo >> hi) || !(lo <= hi)) {
      throw ProgramError("malformed #@domain directive: " + line);
    }
    return Interval{lo, hi};
  }
  return std::nullopt;
}

}  // namespace

Expr parse_expression(const std::vector<Token>& tokens) { return Parser(tokens).parse_all(); }

SequenceProgram parse(const std::vector<Token>& tokens) {
  Expr ast = parse_expression(tokens);
  if (ast.type() != ValueType::Number) {
    throw ParseError("expected numeric expression", tokens.front().position);
  }
  std::string source;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::End) break;
    if (!source.empty()) source += ' ';
    source += t.lexeme;
  }
  return SequenceProgram(std::move(ast), std::move(source));
}

SequenceProgram parse_program(std::string_view source) {
  const auto tokens = tokenize(source);
  Expr ast = parse_expression(tokens);
  if (ast.type() != ValueType::Number) {
    throw ParseError("expected numeric expression", tokens.front().position);
  }
  return SequenceProgram(std::move(ast), std::string(source), domain_directive(source));
}

SequenceProgram parse_predicate(std::string_view source) {
  const auto tokens = tokenize(source);
  Expr ast = parse_expression(tokens);
  if (ast.type() != ValueType::Boolean) {
    throw ParseError("expected boolean condition", tokens.front().position);
  }
  return SequenceProgram(std::move(ast), std::string(source));
}

SequenceProgram load_program_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProgramError("cannot read program file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_program(text.str());
}

std::vector<std::string> builtin_program_names() { return {"example21"}; }

SequenceProgram builtin_program(std::string_view name) {
  if (name == "example21") {
    auto p = parse_program("if issquare(k) then k else 1/(1 + x^k)");
    return SequenceProgram(p.ast(), p.source(), Interval{0.0, 1.0});
  }
  throw ProgramError("unknown built-in program '" + std::string(name) + "'");
}

}  // namespace roughstat::dsl
