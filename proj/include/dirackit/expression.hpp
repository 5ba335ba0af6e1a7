#pragma once

#include "dirackit/errors.hpp"
#include "dirackit/jet.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dk {

using ParamMap = std::map<std::string, double>;

/// Syntax or name-resolution error with the byte offset into the source.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : InputError(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/**
 * Parsed coefficient expression.
 *
 * Grammar: real literals, variable names, parameters (folded to their
 * values at parse time), binary + - * /, unary -, integer powers `^`, and
 * the functions sin, cos, sqrt.  Evaluation over jets composes exactly, so
 * an expression in T*Q coordinates can be evaluated on the jets of an
 * embedding to obtain the jets of the pulled-back function.
 */
class Expression {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Sqrt };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double value = 0.0;  ///< Const literal
    int index = 0;       ///< Var slot or Pow exponent
  };

  Expression();  ///< the constant 0 with no variables

  static Expression parse(std::string_view src, const std::vector<std::string>& variables,
                          const ParamMap& params = {});
  static Expression constant(double c, const std::vector<std::string>& variables = {});

  /// Canonical text; parse(to_string()) reproduces the same text.
  std::string to_string() const;

  Jet eval(const JetList& vars, int dim) const;
  double eval(const Eigen::VectorXd& x) const;

  const std::vector<std::string>& variables() const { return vars_; }
  bool is_constant() const;
  /// True for a literal 0 (used to skip work on sparse component lists).
  bool is_zero_literal() const;

 private:
  std::vector<std::string> vars_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  int root_ = 0;

  Jet eval_node(int i, const JetList& vars, int dim) const;
  double eval_node(int i, const Eigen::VectorXd& x) const;
  std::string print_node(int i) const;

  friend class ExpressionParser;
};

}  // namespace dk
