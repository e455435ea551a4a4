#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace roughstat::dsl {

enum class ValueType { Number, Boolean };
enum class Variable { K, X };
enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Pow, And, Or };
enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };
enum class Builtin { Abs, Sqrt, Min, Max, Floor, Exp, Ln, IsSquare };

struct BuiltinInfo {
  Builtin id;
  std::string_view name;
  int arity;
  ValueType result;
};

std::optional<BuiltinInfo> find_builtin(std::string_view name);
const BuiltinInfo& info(Builtin id);

std::string_view symbol(BinaryOp op);
std::string_view symbol(CompareOp op);

struct Node;

/// Immutable expression tree. Copies share structure; equality is
/// structural, with literals compared bit for bit.
class Expr {
 public:
  static Expr literal(double value);
  static Expr variable(Variable v);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr compare(CompareOp op, Expr lhs, Expr rhs);
  static Expr conditional(Expr cond, Expr then_branch, Expr else_branch);
  static Expr call(Builtin fn, std::vector<Expr> args);

  const Node& node() const { return *node_; }
  ValueType type() const;
  bool uses(Variable v) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Literal {
  double value;
};
struct VariableRef {
  Variable which;
};
struct Unary {
  UnaryOp op;
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Comparison {
  CompareOp op;
  Expr lhs;
  Expr rhs;
};
struct Conditional {
  Expr cond;
  Expr then_branch;
  Expr else_branch;
};
struct Call {
  Builtin fn;
  std::vector<Expr> args;
};

struct Node {
  std::variant<Literal, VariableRef, Unary, Binary, Comparison, Conditional, Call> value;
};

}  // namespace roughstat::dsl
