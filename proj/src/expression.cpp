#include "tubecomp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace tubecomp {

struct Expression::Node {
  enum class Kind {
    constant,
    var_t,
    var_x,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    fn_sin,
    fn_cos,
    fn_sinh,
    fn_cosh,
    fn_exp
  };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using Kind = Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_space();
    if (pos_ != text_.size())
      throw ExpressionError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = make(Kind::add, e, parse_term());
      else if (consume('-'))
        e = make(Kind::sub, e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      if (consume('*'))
        e = make(Kind::mul, e, parse_factor());
      else if (consume('/'))
        e = make(Kind::div, e, parse_factor());
      else
        return e;
    }
  }

  // '-' binds looser than '^': -t^2 is -(t^2); 2^3^2 is 2^(3^2).
  NodePtr parse_factor() {
    if (consume('-')) return make(Kind::neg, parse_factor());
    if (consume('+')) return parse_factor();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (consume('^')) return make(Kind::pow, base, parse_factor());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ExpressionError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!consume(')')) throw ExpressionError("expected ')'", pos_);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ExpressionError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ExpressionError("malformed number", pos_);
    pos_ += static_cast<size_t>(end - begin);
    return make(Kind::constant, nullptr, nullptr, v);
  }

  NodePtr parse_ident() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") return make(Kind::var_t);
    if (name == "x") return make(Kind::var_x);
    if (name == "pi") return make(Kind::constant, nullptr, nullptr, M_PI);
    Kind k;
    if (name == "sin")
      k = Kind::fn_sin;
    else if (name == "cos")
      k = Kind::fn_cos;
    else if (name == "sinh")
      k = Kind::fn_sinh;
    else if (name == "cosh")
      k = Kind::fn_cosh;
    else if (name == "exp")
      k = Kind::fn_exp;
    else
      throw ExpressionError("unknown identifier '" + std::string(name) + "'", start);
    if (!consume('(')) throw ExpressionError("expected '(' after function name", pos_);
    NodePtr arg = parse_expr();
    if (!consume(')')) throw ExpressionError("expected ')'", pos_);
    return make(k, arg);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

double eval_node(const Node& n, double t, double x) {
  switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::var_t: return t;
    case Kind::var_x: return x;
    case Kind::add: return eval_node(*n.a, t, x) + eval_node(*n.b, t, x);
    case Kind::sub: return eval_node(*n.a, t, x) - eval_node(*n.b, t, x);
    case Kind::mul: return eval_node(*n.a, t, x) * eval_node(*n.b, t, x);
    case Kind::div: return eval_node(*n.a, t, x) / eval_node(*n.b, t, x);
    case Kind::pow: {
      const double base = eval_node(*n.a, t, x);
      const double ex = eval_node(*n.b, t, x);
      return std::pow(base, ex);
    }
    case Kind::neg: return -eval_node(*n.a, t, x);
    case Kind::fn_sin: return std::sin(eval_node(*n.a, t, x));
    case Kind::fn_cos: return std::cos(eval_node(*n.a, t, x));
    case Kind::fn_sinh: return std::sinh(eval_node(*n.a, t, x));
    case Kind::fn_cosh: return std::cosh(eval_node(*n.a, t, x));
    case Kind::fn_exp: return std::exp(eval_node(*n.a, t, x));
  }
  return 0.0;
}

Jet jet_mul(const Jet& f, const Jet& g) {
  return {f.v * g.v, f.d1 * g.v + f.v * g.d1,
          f.d2 * g.v + 2.0 * f.d1 * g.d1 + f.v * g.d2};
}

Jet jet_div(const Jet& f, const Jet& g) {
  const double q = f.v / g.v;
  const double q1 = (f.d1 - q * g.d1) / g.v;
  const double q2 = (f.d2 - 2.0 * q1 * g.d1 - q * g.d2) / g.v;
  return {q, q1, q2};
}

Jet jet_chain(double h, double dh, double d2h, const Jet& f) {
  return {h, dh * f.d1, d2h * f.d1 * f.d1 + dh * f.d2};
}

// var_is_t selects which variable carries the derivative seed.
Jet jet_node(const Node& n, double t, double x, bool var_is_t) {
  switch (n.kind) {
    case Kind::constant: return {n.value, 0.0, 0.0};
    case Kind::var_t: return {t, var_is_t ? 1.0 : 0.0, 0.0};
    case Kind::var_x: return {x, var_is_t ? 0.0 : 1.0, 0.0};
    case Kind::add: {
      const Jet a = jet_node(*n.a, t, x, var_is_t), b = jet_node(*n.b, t, x, var_is_t);
      return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
    }
    case Kind::sub: {
      const Jet a = jet_node(*n.a, t, x, var_is_t), b = jet_node(*n.b, t, x, var_is_t);
      return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
    }
    case Kind::mul:
      return jet_mul(jet_node(*n.a, t, x, var_is_t), jet_node(*n.b, t, x, var_is_t));
    case Kind::div:
      return jet_div(jet_node(*n.a, t, x, var_is_t), jet_node(*n.b, t, x, var_is_t));
    case Kind::pow: {
      const Jet f = jet_node(*n.a, t, x, var_is_t);
      if (n.b->kind == Kind::constant) {
        const double c = n.b->value;
        const double fp = std::pow(f.v, c);
        const double fp1 = c * std::pow(f.v, c - 1.0);
        const double fp2 = c * (c - 1.0) * std::pow(f.v, c - 2.0);
        return {fp, fp1 * f.d1, fp2 * f.d1 * f.d1 + fp1 * f.d2};
      }
      const Jet g = jet_node(*n.b, t, x, var_is_t);
      if (!(f.v > 0.0))
        throw std::domain_error(
            "expression: x^y with non-constant exponent requires positive base");
      // f^g = exp(g log f)
      const double lf = std::log(f.v);
      const Jet logf = {lf, f.d1 / f.v, (f.d2 - f.d1 * f.d1 / f.v) / f.v};
      const Jet prod = jet_mul(g, logf);
      const double e = std::exp(prod.v);
      return jet_chain(e, e, e, prod);
    }
    case Kind::neg: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      return {-a.v, -a.d1, -a.d2};
    }
    case Kind::fn_sin: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      return jet_chain(std::sin(a.v), std::cos(a.v), -std::sin(a.v), a);
    }
    case Kind::fn_cos: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      return jet_chain(std::cos(a.v), -std::sin(a.v), -std::cos(a.v), a);
    }
    case Kind::fn_sinh: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      return jet_chain(std::sinh(a.v), std::cosh(a.v), std::sinh(a.v), a);
    }
    case Kind::fn_cosh: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      return jet_chain(std::cosh(a.v), std::sinh(a.v), std::cosh(a.v), a);
    }
    case Kind::fn_exp: {
      const Jet a = jet_node(*n.a, t, x, var_is_t);
      const double e = std::exp(a.v);
      return jet_chain(e, e, e, a);
    }
  }
  return {};
}

bool node_uses(const Node& n, Kind var) {
  if (n.kind == var) return true;
  if (n.a && node_uses(*n.a, var)) return true;
  if (n.b && node_uses(*n.b, var)) return true;
  return false;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser parser(text);
  Expression e;
  e.root_ = parser.run();
  e.text_ = std::string(text);
  return e;
}

double Expression::eval(double t, double x) const {
  if (!root_) throw std::logic_error("Expression: evaluating empty expression");
  return eval_node(*root_, t, x);
}

Jet Expression::jet_t(double t, double x) const {
  if (!root_) throw std::logic_error("Expression: evaluating empty expression");
  return jet_node(*root_, t, x, true);
}

Jet Expression::jet_x(double t, double x) const {
  if (!root_) throw std::logic_error("Expression: evaluating empty expression");
  return jet_node(*root_, t, x, false);
}

bool Expression::uses_x() const { return root_ && node_uses(*root_, Node::Kind::var_x); }
bool Expression::uses_t() const { return root_ && node_uses(*root_, Node::Kind::var_t); }

double parse_numeric(std::string_view text) {
  Expression e = Expression::parse(text);
  if (e.uses_x() || e.uses_t())
    throw ExpressionError("numeric value must not reference variables", 0);
  return e.eval(0.0, 0.0);
}

}  // namespace tubecomp
