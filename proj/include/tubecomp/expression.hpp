#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tubecomp {

class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(const std::string& message, size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

/// Value with first and second derivative in one variable (forward-mode jet).
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Parsed arithmetic expression in the variables t and x.
///
/// Grammar: +, -, *, /, ^ (right-associative), sin, cos, sinh, cosh, exp,
/// numeric literals, the constant pi, and the variables t and x. Derivatives
/// come from forward-mode differentiation of the expression tree, so second
/// derivatives are exact.
class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view text);

  double eval(double t, double x = 0.0) const;
  /// Jet with respect to t (x held fixed).
  Jet jet_t(double t, double x = 0.0) const;
  /// Jet with respect to x (t held fixed).
  Jet jet_x(double t, double x) const;

  bool uses_x() const;
  bool uses_t() const;
  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Parses a standalone numeric value: an expression with no variables,
/// evaluated once (accepts e.g. "2*pi").
double parse_numeric(std::string_view text);

}  // namespace tubecomp
