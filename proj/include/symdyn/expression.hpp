#pragma once

// Scalar fields H(x, y) given as text, compiled to a postfix program.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' signed_number)?
//   primary := number | 'x' | 'y' | 'r2' | 'pi'
//            | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//
// r2 is x^2 + y^2. Exponents must be numeric literals.

#include "symdyn/types.hpp"

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace symdyn {

/// Value, gradient and Hessian of a scalar field at a point.
template <typename Scalar>
struct Jet2 {
  Scalar v{0};
  Vec2<Scalar> g{Vec2<Scalar>::Zero()};
  Mat2<Scalar> h{Mat2<Scalar>::Zero()};

  static Jet2 constant(Scalar c) {
    Jet2 j;
    j.v = c;
    return j;
  }
  static Jet2 variable(Scalar value, int index) {
    Jet2 j;
    j.v = value;
    j.g[index] = Scalar(1);
    return j;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
  friend Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.h}; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v, a.v * b.g + b.v * a.g,
            a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

  /// Chain rule through a scalar function with derivatives f0, f1, f2 at v.
  Jet2 compose(Scalar f0, Scalar f1, Scalar f2) const {
    return {f0, f1 * g, f1 * h + f2 * g * g.transpose()};
  }
  friend Jet2 reciprocal(const Jet2& a) {
    const Scalar inv = Scalar(1) / a.v;
    return a.compose(inv, -inv * inv, Scalar(2) * inv * inv * inv);
  }
  friend Jet2 sin(const Jet2& a) {
    using std::cos;
    using std::sin;
    return a.compose(sin(a.v), cos(a.v), -sin(a.v));
  }
  friend Jet2 cos(const Jet2& a) {
    using std::cos;
    using std::sin;
    return a.compose(cos(a.v), -sin(a.v), -cos(a.v));
  }
  friend Jet2 exp(const Jet2& a) {
    using std::exp;
    const Scalar e = exp(a.v);
    return a.compose(e, e, e);
  }
  friend Jet2 pow(const Jet2& a, Scalar c) {
    using std::pow;
    if (c == Scalar(0)) return constant(Scalar(1));
    if (c == Scalar(1)) return a;
    if (c == Scalar(2)) return a * a;
    return a.compose(pow(a.v, c), c * pow(a.v, c - Scalar(1)),
                     c * (c - Scalar(1)) * pow(a.v, c - Scalar(2)));
  }
};

class Expression {
 public:
  /// Parses `text`; throws ParseError with the character offset on failure.
  static Expression parse(std::string_view text);

  const std::string& source() const { return source_; }

  template <typename T>
  T evaluate(const T& x, const T& y) const;

  double value(const DiskPoint& p) const { return evaluate<double>(p.x(), p.y()); }
  Jet2<double> jet(const DiskPoint& p) const {
    return evaluate(Jet2<double>::variable(p.x(), 0), Jet2<double>::variable(p.y(), 1));
  }

 private:
  enum class Op : unsigned char { Const, X, Y, R2, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Pow };
  struct Instr {
    Op op;
    double arg = 0.0;
  };
  static constexpr std::size_t kMaxStack = 64;

  friend class ExpressionParser;
  std::string source_;
  std::vector<Instr> code_;
};

namespace detail {
inline double pow_const(double a, double c) {
  if (c == 2.0) return a * a;
  return std::pow(a, c);
}
template <typename Scalar>
Jet2<Scalar> pow_const(const Jet2<Scalar>& a, double c) {
  return pow(a, Scalar(c));
}
template <typename T>
T make_const(double c) {
  if constexpr (std::is_same_v<T, double>) {
    return c;
  } else {
    return T::constant(c);
  }
}
}  // namespace detail

template <typename T>
T Expression::evaluate(const T& x, const T& y) const {
  std::array<T, kMaxStack> stack;
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: stack[top++] = detail::make_const<T>(in.arg); break;
      case Op::X: stack[top++] = x; break;
      case Op::Y: stack[top++] = y; break;
      case Op::R2: stack[top++] = x * x + y * y; break;
      case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
      case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
      case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
      case Op::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Sin: { using std::sin; stack[top - 1] = sin(stack[top - 1]); break; }
      case Op::Cos: { using std::cos; stack[top - 1] = cos(stack[top - 1]); break; }
      case Op::Exp: { using std::exp; stack[top - 1] = exp(stack[top - 1]); break; }
      case Op::Pow: stack[top - 1] = detail::pow_const(stack[top - 1], in.arg); break;
    }
  }
  return stack[0];
}

}  // namespace symdyn
