#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace symdyn {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

/// Cartesian point of the closed unit disk.
using DiskPoint = Vec2<double>;
using Matrix2 = Mat2<double>;

inline constexpr double kBoundarySlack = 1e-12;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Rotation by `turns` full revolutions.
template <typename Scalar>
Mat2<Scalar> rotation(const Scalar& turns) {
  using std::cos;
  using std::sin;
  const Scalar a = Scalar(kTwoPi) * turns;
  Mat2<Scalar> r;
  r << cos(a), -sin(a), sin(a), cos(a);
  return r;
}

/// The complex structure J = rotation by a quarter turn.
template <typename Scalar>
Mat2<Scalar> quarter_turn() {
  Mat2<Scalar> j;
  j << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
  return j;
}

/// Signed angle (radians, in (-pi, pi]) from a to b.
template <typename Derived1, typename Derived2>
auto signed_angle(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  using std::atan2;
  return atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
}

inline bool in_disk(const DiskPoint& p, double slack = kBoundarySlack) {
  return p.squaredNorm() <= 1.0 + slack;
}

// Error hierarchy. CLI maps InputError to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (map specs, sketches, configs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Expression grammar violation; carries the offending character offset.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : InputError(msg + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Numerical failure: non-convergence, resolution failure, collisions.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency violation (index bugs, estimator disagreement).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace symdyn
