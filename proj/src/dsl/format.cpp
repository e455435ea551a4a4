#include "roughstat/dsl/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace roughstat::dsl {
namespace {

// Binding strength, loosest first. Children print bare when their level is
// at least what the parent position requires.
enum Level : int {
  kConditional = 0,
  kOr = 1,
  kAnd = 2,
  kNot = 3,
  kCompare = 4,
  kSum = 5,
  kTerm = 6,
  kNeg = 7,
  kPower = 8,
  kAtom = 9,
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int level_of(const Expr& e) {
  return std::visit(overloaded{
                        [](const Literal&) { return int{kAtom}; },
                        [](const VariableRef&) { return int{kAtom}; },
                        [](const Unary& u) { return u.op == UnaryOp::Neg ? int{kNeg} : int{kNot}; },
                        [](const Binary& b) {
                          switch (b.op) {
                            case BinaryOp::Or: return int{kOr};
                            case BinaryOp::And: return int{kAnd};
                            case BinaryOp::Add:
                            case BinaryOp::Sub: return int{kSum};
                            case BinaryOp::Pow: return int{kPower};
                            default: return int{kTerm};
                          }
                        },
                        [](const Comparison&) { return int{kCompare}; },
                        [](const Conditional&) { return int{kConditional}; },
                        [](const Call&) { return int{kAtom}; },
                    },
                    e.node().value);
}

void write(const Expr& e, int required, std::string& out);

void write_child(const Expr& e, int required, std::string& out) {
  if (level_of(e) < required) {
    out += '(';
    write(e, kConditional, out);
    out += ')';
  } else {
    write(e, required, out);
  }
}

void write(const Expr& e, int /*required*/, std::string& out) {
  std::visit(overloaded{
                 [&](const Literal& l) { out += format_number(l.value); },
                 [&](const VariableRef& v) { out += v.which == Variable::K ? 'k' : 'x'; },
                 [&](const Unary& u) {
                   if (u.op == UnaryOp::Neg) {
                     out += '-';
                     write_child(u.operand, kNeg, out);
                   } else {
                     out += "not ";
                     write_child(u.operand, kNot, out);
                   }
                 },
                 [&](const Binary& b) {
                   int left = kAtom;
                   int right = kAtom;
                   switch (b.op) {
                     case BinaryOp::Or: left = kOr; right = kAnd; break;
                     case BinaryOp::And: left = kAnd; right = kNot; break;
                     case BinaryOp::Add:
                     case BinaryOp::Sub: left = kSum; right = kTerm; break;
                     case BinaryOp::Mul:
                     case BinaryOp::Div:
                     case BinaryOp::Mod: left = kTerm; right = kNeg; break;
                     case BinaryOp::Pow: left = kAtom; right = kNeg; break;
                   }
                   write_child(b.lhs, left, out);
                   out += ' ';
                   out += symbol(b.op);
                   out += ' ';
                   write_child(b.rhs, right, out);
                 },
                 [&](const Comparison& c) {
                   write_child(c.lhs, kSum, out);
                   out += ' ';
                   out += symbol(c.op);
                   out += ' ';
                   write_child(c.rhs, kSum, out);
                 },
                 [&](const Conditional& c) {
                   out += "if ";
                   write_child(c.cond, kOr, out);
                   out += " then ";
                   write_child(c.then_branch, kConditional, out);
                   out += " else ";
                   write_child(c.else_branch, kConditional, out);
                 },
                 [&](const Call& c) {
                   out += info(c.fn).name;
                   out += '(';
                   for (std::size_t i = 0; i < c.args.size(); ++i) {
                     if (i != 0) out += ", ";
                     write_child(c.args[i], kConditional, out);
                   }
                   out += ')';
                 },
             },
             e.node().value);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format(const Expr& expr) {
  std::string out;
  write(expr, kConditional, out);
  return out;
}

std::string format(const SequenceProgram& program) { return format(program.ast()); }

}  // namespace roughstat::dsl
