#include "roughstat/dsl/ast.hpp"

#include <array>
#include <bit>
#include <cstdint>

namespace roughstat::dsl {
namespace {

constexpr std::array<BuiltinInfo, 8> kBuiltins{{
    {Builtin::Abs, "abs", 1, ValueType::Number},
    {Builtin::Sqrt, "sqrt", 1, ValueType::Number},
    {Builtin::Min, "min", 2, ValueType::Number},
    {Builtin::Max, "max", 2, ValueType::Number},
    {Builtin::Floor, "floor", 1, ValueType::Number},
    {Builtin::Exp, "exp", 1, ValueType::Number},
    {Builtin::Ln, "ln", 1, ValueType::Number},
    {Builtin::IsSquare, "issquare", 1, ValueType::Boolean},
}};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::optional<BuiltinInfo> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

const BuiltinInfo& info(Builtin id) { return kBuiltins[static_cast<std::size_t>(id)]; }

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Pow: return "^";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

std::string_view symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
  }
  return "?";
}

Expr Expr::literal(double value) {
  return Expr(std::make_shared<const Node>(Node{Literal{value}}));
}
Expr Expr::variable(Variable v) {
  return Expr(std::make_shared<const Node>(Node{VariableRef{v}}));
}
Expr Expr::unary(UnaryOp op, Expr operand) {
  return Expr(std::make_shared<const Node>(Node{Unary{op, std::move(operand)}}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::compare(CompareOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Comparison{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::conditional(Expr cond, Expr then_branch, Expr else_branch) {
  return Expr(std::make_shared<const Node>(
      Node{Conditional{std::move(cond), std::move(then_branch), std::move(else_branch)}}));
}
Expr Expr::call(Builtin fn, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(Node{Call{fn, std::move(args)}}));
}

ValueType Expr::type() const {
  return std::visit(
      overloaded{
          [](const Literal&) { return ValueType::Number; },
          [](const VariableRef&) { return ValueType::Number; },
          [](const Unary& u) {
            return u.op == UnaryOp::Not ? ValueType::Boolean : ValueType::Number;
          },
          [](const Binary& b) {
            return (b.op == BinaryOp::And || b.op == BinaryOp::Or) ? ValueType::Boolean
                                                                   : ValueType::Number;
          },
          [](const Comparison&) { return ValueType::Boolean; },
          [](const Conditional& c) { return c.then_branch.type(); },
          [](const Call& c) { return info(c.fn).result; },
      },
      node_->value);
}

bool Expr::uses(Variable v) const {
  return std::visit(
      overloaded{
          [](const Literal&) { return false; },
          [v](const VariableRef& r) { return r.which == v; },
          [v](const Unary& u) { return u.operand.uses(v); },
          [v](const Binary& b) { return b.lhs.uses(v) || b.rhs.uses(v); },
          [v](const Comparison& c) { return c.lhs.uses(v) || c.rhs.uses(v); },
          [v](const Conditional& c) {
            return c.cond.uses(v) || c.then_branch.uses(v) || c.else_branch.uses(v);
          },
          [v](const Call& c) {
            for (const auto& a : c.args) {
              if (a.uses(v)) return true;
            }
            return false;
          },
      },
      node_->value);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->value;
  const auto& y = b.node_->value;
  if (x.index() != y.index()) return false;
  return std::visit(
      overloaded{
          [&](const Literal& l) {
            return std::bit_cast<std::uint64_t>(l.value) ==
                   std::bit_cast<std::uint64_t>(std::get<Literal>(y).value);
          },
          [&](const VariableRef& r) { return r.which == std::get<VariableRef>(y).which; },
          [&](const Unary& u) {
            const auto& o = std::get<Unary>(y);
            return u.op == o.op && u.operand == o.operand;
          },
          [&](const Binary& l) {
            const auto& o = std::get<Binary>(y);
            return l.op == o.op && l.lhs == o.lhs && l.rhs == o.rhs;
          },
          [&](const Comparison& l) {
            const auto& o = std::get<Comparison>(y);
            return l.op == o.op && l.lhs == o.lhs && l.rhs == o.rhs;
          },
          [&](const Conditional& c) {
            const auto& o = std::get<Conditional>(y);
            return c.cond == o.cond && c.then_branch == o.then_branch &&
                   c.else_branch == o.else_branch;
          },
          [&](const Call& c) {
            const auto& o = std::get<Call>(y);
            return c.fn == o.fn && c.args == o.args;
          },
      },
      x);
}

}  // namespace roughstat::dsl
