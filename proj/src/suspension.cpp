#include "symdyn/suspension.hpp"

#include <algorithm>
#include <cmath>

namespace symdyn {

MappingTorus MappingTorus::make(DiskIsotopy iso, int n, double action_constant) {
  if (n < 1) throw InputError("mapping torus period must be positive");
  if (!(action_constant > 0.0)) throw InputError("action constant must be positive");
  const double hmax = iso.max_abs_hamiltonian();
  if (hmax > 0.0 && !(action_constant > 2.0 * hmax + 1.0))
    throw InputError("action constant must exceed 2 max|H| + 1");
  return MappingTorus{std::move(iso), n, action_constant};
}

MappingTorus MappingTorus::with_period(int m) const { return make(iso, m, action_constant); }

void sweep_periods(const DiskIsotopy& iso, const DiskPoint& p, int periods, int resolution,
                   const DiskIsotopy::Visitor& visit) {
  DiskPoint cur = p;
  Matrix2 acc = Matrix2::Identity();
  for (int k = 0; k < periods; ++k) {
    DiskPoint end = cur;
    Matrix2 endJ = acc;
    const Matrix2 before = acc;
    bool first = true;
    iso.sweep(cur, resolution, [&](double t, const DiskPoint& q, const Matrix2& J) {
      const Matrix2 full = J * before;
      if (!(first && k > 0)) visit(k + t, q, full);
      first = false;
      end = q;
      endJ = full;
    });
    cur = end;
    acc = endJ;
  }
}

int resolution_for(const DiskIsotopy& iso, double max_dt) {
  const int base = iso.grid_size(1);
  return std::max(1, static_cast<int>(std::ceil(1.0 / (max_dt * base))));
}

SuspensionLoop make_loop(const MappingTorus& torus, const DiskPoint& base, int period) {
  if (period < 1) throw InputError("loop period must be positive");
  SuspensionLoop loop{base, period, {}};
  sweep_periods(torus.iso, base, period, resolution_for(torus.iso, 1e-2),
                [&](double t, const DiskPoint& q, const Matrix2&) { loop.samples.emplace_back(t, q); });
  if ((loop.samples.back().second - base).norm() > 1e-8)
    throw InputError("base point is not periodic with the requested period");
  return loop;
}

void TurnCounter::push(const DiskPoint& v) {
  if (!(v.norm() >= kCollisionDistance)) throw NumericalError("winding vector vanished (orbit collision)");
  if (started_) {
    const double d = signed_angle(last_, v);
    radians_ += d;
    max_step_ = std::max(max_step_, std::abs(d));
  }
  started_ = true;
  last_ = v;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Angle swept by loop_fn on [a, b]; bisects while a step exceeds pi/2.
double swept(const std::function<DiskPoint(double)>& f, double a, const DiskPoint& fa, double b,
             const DiskPoint& fb, int depth) {
  if (!(fb.norm() >= kCollisionDistance)) throw NumericalError("winding vector vanished (orbit collision)");
  const double d = signed_angle(fa, fb);
  if (std::abs(d) <= kHalfPi) return d;
  if (depth == 0) {
    if (std::abs(d) > std::numbers::pi - 1e-12) throw NumericalError("winding resolution failure: angular step exceeds pi");
    return d;
  }
  const double m = 0.5 * (a + b);
  const DiskPoint fm = f(m);
  if (!(fm.norm() >= kCollisionDistance)) throw NumericalError("winding vector vanished (orbit collision)");
  return swept(f, a, fa, m, fm, depth - 1) + swept(f, m, fm, b, fb, depth - 1);
}

}  // namespace

int winding_number(const std::function<DiskPoint(double)>& loop_fn, double t0, double t1, int samples) {
  if (samples < 1 || !(t1 > t0)) throw InputError("winding range must be nonempty");
  DiskPoint prev = loop_fn(t0);
  if (!(prev.norm() >= kCollisionDistance)) throw NumericalError("winding vector vanished (orbit collision)");
  const DiskPoint first = prev;
  double total = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double a = t0 + (t1 - t0) * (i - 1) / samples;
    const double b = t0 + (t1 - t0) * i / samples;
    const DiskPoint cur = loop_fn(b);
    total += swept(loop_fn, a, prev, b, cur, 24);
    prev = cur;
  }
  const double closure = std::abs(signed_angle(first, prev));
  if (closure > 1e-6) throw InputError("winding loop is not closed");
  return static_cast<int>(std::lround(total / kTwoPi));
}

int winding_number(const MappingTorus& torus, const std::function<DiskPoint(double)>& loop_fn) {
  return winding_number(loop_fn, 0.0, static_cast<double>(torus.n), 256 * torus.n);
}

std::function<double(double)> boundary_lift(const MappingTorus& torus) {
  if (const auto rot = torus.iso.boundary_rotation_closed_form()) {
    const double shift = torus.n * *rot;
    return [shift](double s) { return s + shift; };
  }
  const DiskIsotopy iso = torus.iso;
  const int n = torus.n;
  return [iso, n](double s) {
    const double a = kTwoPi * s;
    const DiskPoint p(std::cos(a), std::sin(a));
    for (int res = 1; res <= 64; res *= 2) {
      TurnCounter counter;
      sweep_periods(iso, p, n, res, [&](double, const DiskPoint& q, const Matrix2&) { counter.push(q); });
      if (counter.max_step() <= kHalfPi) return s + counter.turns();
    }
    throw NumericalError("boundary lift resolution failure: angular step exceeds pi/2 at maximal refinement");
  };
}

namespace {

std::optional<double> action_value(const MappingTorus& torus, const DiskPoint& base, int period, bool strict) {
  const double c = torus.action_constant;
  if (const auto rho = torus.iso.total_twist()) {
    const double s = base.squaredNorm();
    return c * period + period * std::numbers::pi * rho->at_s(s) * s;
  }
  if (torus.iso.is_pure_hamiltonian()) {
    double integral = 0.0;
    DiskPoint z = base;
    for (int k = 0; k < period; ++k) {
      const auto [a, w] = torus.iso.hamiltonian_action_period(z);
      integral += a;
      z = w;
    }
    return c * period + integral;
  }
  if (strict) throw InputError("unsupported action model: family mixes Hamiltonian and twist/rotation factors");
  return std::nullopt;
}

}  // namespace

double action(const MappingTorus& torus, const SuspensionLoop& orbit) {
  return *action_value(torus, orbit.base, orbit.period, true);
}

double action_at(const MappingTorus& torus, const DiskPoint& base, int period) {
  return *action_value(torus, base, period, true);
}

std::optional<double> try_action(const MappingTorus& torus, const DiskPoint& base, int period) {
  return action_value(torus, base, period, false);
}

}  // namespace symdyn
