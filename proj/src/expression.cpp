#include "dirackit/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace dk {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, const std::vector<std::string>& vars, const ParamMap& params)
      : src_(src), vars_(vars), params_(params) {}

  Expression run() {
    if (src_.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw ParseError("empty expression", 0);
    }
    const int root = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    Expression e;
    e.vars_ = vars_;
    e.nodes_ = std::make_shared<const std::vector<Expression::Node>>(std::move(nodes_));
    e.root_ = root;
    return e;
  }

 private:
  using Op = Expression::Op;

  std::string_view src_;
  const std::vector<std::string>& vars_;
  const ParamMap& params_;
  std::size_t pos_ = 0;
  std::vector<Expression::Node> nodes_;

  int add(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = add({Op::Add, lhs, parse_product()});
      } else if (accept('-')) {
        lhs = add({Op::Sub, lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = add({Op::Mul, lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = add({Op::Div, lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) return add({Op::Neg, parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      negative = src_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("exponent must be an integer literal", start);
    int k = 0;
    auto res = std::from_chars(src_.data() + digits, src_.data() + pos_, k);
    if (res.ec != std::errc() || k > 64) throw ParseError("exponent out of range", start);
    Expression::Node n{Op::Pow, base};
    n.index = negative ? -k : k;
    return add(n);
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t i) {
      return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (!is_digit(q)) throw ParseError("malformed exponent in number", pos_);
      pos_ = q;
      while (is_digit(pos_)) ++pos_;
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      throw ParseError("malformed number", start);
    }
    Expression::Node n{Op::Const};
    n.value = v;
    return add(n);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "sin" || name == "cos" || name == "sqrt") {
      if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
      const int arg = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      const Op op = name == "sin" ? Op::Sin : name == "cos" ? Op::Cos : Op::Sqrt;
      return add({op, arg});
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        Expression::Node n{Op::Var};
        n.index = static_cast<int>(i);
        return add(n);
      }
    }
    auto it = params_.find(name);
    if (it != params_.end()) {
      Expression::Node n{Op::Const};
      n.value = it->second;
      return add(n);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

Expression::Expression() {
  Node n{Op::Const};
  nodes_ = std::make_shared<const std::vector<Node>>(std::vector<Node>{n});
}

Expression Expression::parse(std::string_view src, const std::vector<std::string>& variables,
                             const ParamMap& params) {
  return ExpressionParser(src, variables, params).run();
}

Expression Expression::constant(double c, const std::vector<std::string>& variables) {
  Expression e;
  Node n{Op::Const};
  n.value = c;
  e.vars_ = variables;
  e.nodes_ = std::make_shared<const std::vector<Node>>(std::vector<Node>{n});
  return e;
}

bool Expression::is_constant() const {
  for (const Node& n : *nodes_) {
    if (n.op == Op::Var) return false;
  }
  return true;
}

bool Expression::is_zero_literal() const {
  const Node& r = (*nodes_)[root_];
  return r.op == Op::Const && r.value == 0.0;
}

Jet Expression::eval(const JetList& vars, int dim) const {
  if (vars.size() != vars_.size()) {
    throw DimensionError("expression over " + std::to_string(vars_.size()) +
                         " variables evaluated with " + std::to_string(vars.size()) + " jets");
  }
  return eval_node(root_, vars, dim);
}

double Expression::eval(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != vars_.size()) {
    throw DimensionError("expression evaluated at a point of the wrong dimension");
  }
  return eval_node(root_, x);
}

Jet Expression::eval_node(int i, const JetList& vars, int dim) const {
  const Node& n = (*nodes_)[i];
  switch (n.op) {
    case Op::Const: return Jet::constant(n.value, dim);
    case Op::Var: return vars[n.index];
    case Op::Add: return eval_node(n.a, vars, dim) + eval_node(n.b, vars, dim);
    case Op::Sub: return eval_node(n.a, vars, dim) - eval_node(n.b, vars, dim);
    case Op::Mul: return eval_node(n.a, vars, dim) * eval_node(n.b, vars, dim);
    case Op::Div: return eval_node(n.a, vars, dim) / eval_node(n.b, vars, dim);
    case Op::Neg: return -eval_node(n.a, vars, dim);
    case Op::Pow: return pow(eval_node(n.a, vars, dim), n.index);
    case Op::Sin: return sin(eval_node(n.a, vars, dim));
    case Op::Cos: return cos(eval_node(n.a, vars, dim));
    case Op::Sqrt: return sqrt(eval_node(n.a, vars, dim));
  }
  return Jet::constant(0.0, dim);
}

double Expression::eval_node(int i, const Eigen::VectorXd& x) const {
  const Node& n = (*nodes_)[i];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x(n.index);
    case Op::Add: return eval_node(n.a, x) + eval_node(n.b, x);
    case Op::Sub: return eval_node(n.a, x) - eval_node(n.b, x);
    case Op::Mul: return eval_node(n.a, x) * eval_node(n.b, x);
    case Op::Div: return eval_node(n.a, x) / eval_node(n.b, x);
    case Op::Neg: return -eval_node(n.a, x);
    case Op::Pow: return std::pow(eval_node(n.a, x), n.index);
    case Op::Sin: return std::sin(eval_node(n.a, x));
    case Op::Cos: return std::cos(eval_node(n.a, x));
    case Op::Sqrt: return std::sqrt(eval_node(n.a, x));
  }
  return 0.0;
}

namespace {

// Binding strength used by the printer: 1 additive, 2 multiplicative,
// 3 unary minus, 4 power, 5 atoms and calls.
int precedence(const Expression::Node& n) {
  using Op = Expression::Op;
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Expression::print_node(int i) const {
  const std::vector<Node>& nodes = *nodes_;
  const Node& n = nodes[i];
  auto wrap = [&](int child, bool paren) {
    std::string s = print_node(child);
    return paren ? "(" + s + ")" : s;
  };
  switch (n.op) {
    case Op::Const: return format_number(n.value);
    case Op::Var: return vars_[n.index];
    case Op::Add:
    case Op::Sub: {
      const bool right_paren = precedence(nodes[n.b]) <= 1;
      return wrap(n.a, false) + (n.op == Op::Add ? " + " : " - ") + wrap(n.b, right_paren);
    }
    case Op::Mul:
    case Op::Div: {
      const bool left_paren = precedence(nodes[n.a]) < 2;
      const bool right_paren = precedence(nodes[n.b]) <= 2;
      return wrap(n.a, left_paren) + (n.op == Op::Mul ? "*" : "/") + wrap(n.b, right_paren);
    }
    case Op::Neg: return "-" + wrap(n.a, precedence(nodes[n.a]) < 3);
    case Op::Pow: return wrap(n.a, precedence(nodes[n.a]) < 5) + "^" + std::to_string(n.index);
    case Op::Sin: return "sin(" + print_node(n.a) + ")";
    case Op::Cos: return "cos(" + print_node(n.a) + ")";
    case Op::Sqrt: return "sqrt(" + print_node(n.a) + ")";
  }
  return "0";
}

std::string Expression::to_string() const { return print_node(root_); }

}  // namespace dk
