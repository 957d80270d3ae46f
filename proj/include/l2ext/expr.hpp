#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace l2ext {

/// Raised by the parser; `offset` is the byte position of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Log of a nonpositive value, division by zero, or an unbound parameter.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// Immutable expression tree over x, named parameters, + - * /, constant
/// powers, exp and log. Nodes are shared; copying an Expr is cheap.
class Expr {
 public:
  enum class Kind { Constant, Variable, Param, Add, Sub, Mul, Div, Pow, Exp, Log };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    Kind kind;
    double value = 0.0;   // Constant value, or exponent for Pow
    std::string name;     // Param name
    NodePtr lhs;          // unary operand or left operand
    NodePtr rhs;
  };

  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double v);
  static Expr variable();
  static Expr param(std::string name);

  const NodePtr& root() const noexcept { return root_; }
  bool empty() const noexcept { return root_ == nullptr; }

  /// Free parameter names appearing in the tree.
  std::set<std::string> params() const;

  /// Replace every parameter by its value. Throws DomainError if one is unbound.
  Expr bind(const ParamMap& params) const;

  double eval(double x, const ParamMap& params = {}) const;

  /// Canonical text that parses back to the same tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
};

/// expr := term (('+'|'-') term)*
/// term := factor (('*'|'/') factor)*
/// factor := base ('^' ['-'] number)?
/// base := number | 'x' | ident | '(' expr ')' | ('exp'|'log') '(' expr ')'
///
/// `e` is the constant 2.718...; any other identifier is a free parameter.
Expr parse(std::string_view text);

/// As above, but rejects identifiers outside `allowed_params`.
Expr parse(std::string_view text, const std::set<std::string>& allowed_params);

/// Formal d/dx with constant folding.
Expr differentiate(const Expr& e);

}  // namespace l2ext
