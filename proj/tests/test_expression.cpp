#include "symdyn/expression.hpp"

#include <doctest.h>

#include <cmath>

using symdyn::DiskPoint;
using symdyn::Expression;

TEST_CASE("expression evaluates arithmetic and functions") {
  const auto e = Expression::parse("pi*(x^2+y^2)^2/2 - 3*x*y + sin(x) * exp(-r2) + cos(y)");
  const double x = 0.3, y = -0.4;
  const double expect = M_PI * std::pow(x * x + y * y, 2) / 2 - 3 * x * y + std::sin(x) * std::exp(-(x * x + y * y)) +
                        std::cos(y);
  CHECK(e.value(DiskPoint(x, y)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("expression jet matches finite differences") {
  const auto e = Expression::parse("0.001*(1-r2)^2*(x^3-3*x*y^2) + sin(2*x)*cos(y) - 1/(2+x)");
  const DiskPoint p(0.21, -0.37);
  const auto jet = e.jet(p);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    DiskPoint dp = DiskPoint::Zero();
    dp[i] = h;
    const double fd = (e.value(p + dp) - e.value(p - dp)) / (2 * h);
    CHECK(jet.g[i] == doctest::Approx(fd).epsilon(1e-8));
    const auto jp = e.jet(p + dp), jm = e.jet(p - dp);
    for (int k = 0; k < 2; ++k) CHECK(jet.h(i, k) == doctest::Approx((jp.g[k] - jm.g[k]) / (2 * h)).epsilon(1e-7));
  }
  CHECK(jet.v == doctest::Approx(e.value(p)));
}

TEST_CASE("parse errors report grammar position") {
  try {
    (void)Expression::parse("x + * y");
    FAIL("expected parse error");
  } catch (const symdyn::ParseError& err) {
    CHECK(err.position() == 4);
  }
  CHECK_THROWS_AS((void)Expression::parse("foo(x)"), symdyn::ParseError);
  CHECK_THROWS_AS((void)Expression::parse("x^y"), symdyn::ParseError);
  CHECK_THROWS_AS((void)Expression::parse("(x + 1"), symdyn::ParseError);
  CHECK_THROWS_AS((void)Expression::parse("x 1"), symdyn::ParseError);
}
