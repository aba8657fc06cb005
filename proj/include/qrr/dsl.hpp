#pragma once

// Identity description language.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | power
//   power  := atom ("^" ["-"] atom)?
//   atom   := integer | "q" | "inf" | ident | call | "(" expr ")"
//   call   := builtin "(" expr ("," expr)* ")"
//
// `#` starts a comment that runs to the end of the line. `inf` is accepted
// only as a sum/prod upper bound (or `-inf` as a sum lower bound) and as a
// Pochhammer index.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qrr/fps.hpp"
#include "qrr/term_sum.hpp"

namespace qrr::dsl {

struct Span {
  int line = 1;
  int column = 1;
};

enum class Builtin {
  Sum,
  Prod,
  Poch,
  PochMulti,
  QBin,
  QPow,
  Aq,
  SW,
  SchurA,
  SchurB,
  Bessel,
  Phi,
  Psi,
  Floor,
  Coef,
};

enum class NodeKind { Number, Q, Inf, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  Coefficient number;  // Number
  std::string name;    // Var, and the bound variable of sum/prod
  Builtin builtin = Builtin::Sum;
  std::vector<Expr> args;  // operands or call arguments
  Span span;
};

std::string_view builtin_name(Builtin b);

/// Throws Error(SyntaxError | ArityError) with "line:column" in the message.
Expr parse(std::string_view text);

/// Canonical text; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

/// Structural equality, ignoring source spans.
bool same(const Expr& a, const Expr& b);

/// Free variables, excluding `q` and sum/prod indices bound inside e.
std::vector<std::string> free_variables(const Expr& e);

/// A bound value: an exact rational scalar (integers included) or a
/// monomial c*q^e for continuous parameters.
using Value = std::variant<Coefficient, Monomial>;
using Binding = std::map<std::string, Value>;

std::string to_string(const Value& v);

struct EvalOptions {
  TruncationProtocol protocol;
};

/// Evaluates `e` so that the result is known at least below `order` when
/// that is achievable; the returned order is always sound.
Series eval_expr(const Expr& e, const Binding& binding, const QExponent& order,
                 const EvalOptions& options = {});

/// Scalar value of an expression built from numbers and bound scalars.
Coefficient eval_scalar(const Expr& e, const Binding& binding);

/// Parses and evaluates a monomial literal such as `-q^2` or `1/2*q`.
Monomial parse_monomial(std::string_view text);
/// Like parse_monomial but keeps plain numbers as scalars.
Value parse_value(std::string_view text);

}  // namespace qrr::dsl
