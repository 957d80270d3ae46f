#include "l2ext/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace l2ext {

namespace {

using Kind = Expr::Kind;
using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr make_node(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_pow_node(NodePtr base, double p) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->value = p;
  n->lhs = std::move(base);
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* allowed)
      : text_(text), allowed_(allowed) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
    if (text_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = make_node(Kind::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_base();
    if (accept('^')) {
      skip_ws();
      bool negative = false;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
        skip_ws();
      }
      if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        throw ParseError("exponent must be a number", pos_);
      double p = parse_number();
      return make_pow_node(base, negative ? -p : p);
    }
    return base;
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    // Exponent part only when digits follow, so "2*e" and "2e" stay unambiguous.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    if (token == ".") throw ParseError("malformed number", start);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) throw ParseError("malformed number", start);
    return v;
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_const(parse_number());
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string ident(text_.substr(start, pos_ - start));
      skip_ws();
      const bool call = pos_ < text_.size() && text_[pos_] == '(';
      if (call) {
        if (ident != "exp" && ident != "log") throw ParseError("unknown identifier '" + ident + "'", start);
        ++pos_;
        NodePtr arg = parse_expr();
        expect(')');
        return make_node(ident == "exp" ? Kind::Exp : Kind::Log, arg);
      }
      if (ident == "exp" || ident == "log") throw ParseError("expected '(' after " + ident, pos_);
      if (ident == "x") return make_node(Kind::Variable);
      if (ident == "e") return make_const(std::numbers::e);
      if (allowed_ != nullptr && allowed_->count(ident) == 0)
        throw ParseError("unknown identifier '" + ident + "'", start);
      auto n = std::make_shared<Node>();
      n->kind = Kind::Param;
      n->name = ident;
      return n;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  std::string_view text_;
  const std::set<std::string>* allowed_;
  std::size_t pos_ = 0;
};

// ------------------------------------------------------------- evaluation

double eval_node(const Node& n, double x, const ParamMap& params) {
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable:
      return x;
    case Kind::Param: {
      auto it = params.find(n.name);
      if (it == params.end()) throw DomainError("unbound parameter '" + n.name + "'");
      return it->second;
    }
    case Kind::Add:
      return eval_node(*n.lhs, x, params) + eval_node(*n.rhs, x, params);
    case Kind::Sub:
      return eval_node(*n.lhs, x, params) - eval_node(*n.rhs, x, params);
    case Kind::Mul:
      return eval_node(*n.lhs, x, params) * eval_node(*n.rhs, x, params);
    case Kind::Div: {
      const double num = eval_node(*n.lhs, x, params);
      const double den = eval_node(*n.rhs, x, params);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Pow: {
      const double b = eval_node(*n.lhs, x, params);
      if (b == 0.0 && n.value < 0.0) throw DomainError("division by zero in negative power");
      if (b < 0.0 && n.value != std::floor(n.value)) throw DomainError("fractional power of a negative value");
      return std::pow(b, n.value);
    }
    case Kind::Exp:
      return std::exp(eval_node(*n.lhs, x, params));
    case Kind::Log: {
      const double a = eval_node(*n.lhs, x, params);
      if (!(a > 0.0)) throw DomainError("log of a nonpositive value");
      return std::log(a);
    }
  }
  return 0.0;
}

void collect_params(const NodePtr& n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == Kind::Param) out.insert(n->name);
  collect_params(n->lhs, out);
  collect_params(n->rhs, out);
}

NodePtr bind_node(const NodePtr& n, const ParamMap& params) {
  switch (n->kind) {
    case Kind::Constant:
    case Kind::Variable:
      return n;
    case Kind::Param: {
      auto it = params.find(n->name);
      if (it == params.end()) throw DomainError("unbound parameter '" + n->name + "'");
      return make_const(it->second);
    }
    case Kind::Pow:
      return make_pow_node(bind_node(n->lhs, params), n->value);
    case Kind::Exp:
    case Kind::Log:
      return make_node(n->kind, bind_node(n->lhs, params));
    default:
      return make_node(n->kind, bind_node(n->lhs, params), bind_node(n->rhs, params));
  }
}

bool equal_nodes(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Constant:
      return a->value == b->value;
    case Kind::Variable:
      return true;
    case Kind::Param:
      return a->name == b->name;
    case Kind::Pow:
      return a->value == b->value && equal_nodes(a->lhs, b->lhs);
    case Kind::Exp:
    case Kind::Log:
      return equal_nodes(a->lhs, b->lhs);
    default:
      return equal_nodes(a->lhs, b->lhs) && equal_nodes(a->rhs, b->rhs);
  }
}

// --------------------------------------------------------------- printing

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Pow:
      return 3;
    default:
      return 4;
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest representation that round-trips.
  for (int digits = 1; digits <= 17; ++digits) {
    char trial[64];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    if (std::strtod(trial, nullptr) == v) return trial;
  }
  return buf;
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  const bool negative_const = child.kind == Kind::Constant && std::signbit(child.value);
  if (precedence(child.kind) < min_prec || (negative_const && min_prec > 0)) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Constant:
      if (std::signbit(n.value)) {
        out += "0-";
        out += format_number(-n.value);
      } else {
        out += format_number(n.value);
      }
      return;
    case Kind::Variable:
      out += 'x';
      return;
    case Kind::Param:
      out += n.name;
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const int p = precedence(n.kind);
      print_child(*n.lhs, p, out);
      out += n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-" : n.kind == Kind::Mul ? "*" : "/";
      // Left-associative: a same-precedence right operand needs parentheses.
      print_child(*n.rhs, p + 1, out);
      return;
    }
    case Kind::Pow:
      print_child(*n.lhs, 4, out);
      out += '^';
      out += format_number(n.value);
      return;
    case Kind::Exp:
    case Kind::Log:
      out += n.kind == Kind::Exp ? "exp(" : "log(";
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

// ---------------------------------------------------------- differentiation

NodePtr fold_add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_node(Kind::Add, std::move(a), std::move(b));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  return make_node(Kind::Sub, std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make_node(Kind::Mul, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b) && b->value != 0.0) return make_const(a->value / b->value);
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make_node(Kind::Div, std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr b, double p) {
  if (p == 0.0) return make_const(1.0);
  if (p == 1.0) return b;
  if (is_const(b) && !(b->value < 0.0 && p != std::floor(p))) return make_const(std::pow(b->value, p));
  return make_pow_node(std::move(b), p);
}

NodePtr derive(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Constant:
    case Kind::Param:
      return make_const(0.0);
    case Kind::Variable:
      return make_const(1.0);
    case Kind::Add:
      return fold_add(derive(n->lhs), derive(n->rhs));
    case Kind::Sub:
      return fold_sub(derive(n->lhs), derive(n->rhs));
    case Kind::Mul:
      return fold_add(fold_mul(derive(n->lhs), n->rhs), fold_mul(n->lhs, derive(n->rhs)));
    case Kind::Div:
      return fold_div(fold_sub(fold_mul(derive(n->lhs), n->rhs), fold_mul(n->lhs, derive(n->rhs))),
                      fold_pow(n->rhs, 2.0));
    case Kind::Pow:
      return fold_mul(fold_mul(make_const(n->value), fold_pow(n->lhs, n->value - 1.0)), derive(n->lhs));
    case Kind::Exp:
      return fold_mul(n, derive(n->lhs));
    case Kind::Log:
      return fold_div(derive(n->lhs), n->lhs);
  }
  return make_const(0.0);
}

}  // namespace

Expr Expr::constant(double v) { return Expr(make_const(v)); }
Expr Expr::variable() { return Expr(make_node(Kind::Variable)); }
Expr Expr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Param;
  n->name = std::move(name);
  return Expr(n);
}

std::set<std::string> Expr::params() const {
  std::set<std::string> out;
  collect_params(root_, out);
  return out;
}

Expr Expr::bind(const ParamMap& params) const { return Expr(bind_node(root_, params)); }

double Expr::eval(double x, const ParamMap& params) const {
  const double v = eval_node(*root_, x, params);
  if (std::isnan(v)) throw DomainError("expression is undefined at x = " + std::to_string(x));
  return v;
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) { return equal_nodes(a.root_, b.root_); }

Expr parse(std::string_view text) { return Expr(Parser(text, nullptr).parse_all()); }

Expr parse(std::string_view text, const std::set<std::string>& allowed_params) {
  return Expr(Parser(text, &allowed_params).parse_all());
}

Expr differentiate(const Expr& e) { return Expr(derive(e.root())); }

}  // namespace l2ext
