#include "symdyn/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace symdyn {

TwistInterval TwistInterval::between(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

std::vector<int> integers_in(const TwistInterval& tw) {
  std::vector<int> out;
  if (tw.empty()) return out;
  for (double m = std::floor(tw.lo) + 1; m < tw.hi; m += 1.0) out.push_back(static_cast<int>(m));
  return out;
}

BoundaryRotation boundary_rotation_data(const MappingTorus& torus, int n) {
  if (n < 1) throw InputError("period must be positive");
  BoundaryRotation out;
  if (const auto rot = torus.iso.boundary_rotation_closed_form()) {
    out.value = out.lo = out.hi = n * *rot;
    out.exact = true;
    return out;
  }
  const auto lift = boundary_lift(torus.with_period(n));
  constexpr int kBudget = 10000;
  const double s0 = 0.0;
  double s = s0;
  int m = 0;
  double prev_estimate = 0.0, prev_richardson = 0.0;
  bool have_prev = false, have_richardson = false;
  for (int target = 1; target <= kBudget; target *= 2) {
    while (m < target) {
      s = lift(s);
      ++m;
    }
    const double estimate = (s - s0) / m;
    out.value = estimate;
    out.lo = (s - s0 - 1.0) / m;
    out.hi = (s - s0 + 1.0) / m;
    out.iterations = m;
    if (have_prev) {
      const double richardson = 2.0 * estimate - prev_estimate;
      if (std::abs(estimate - prev_estimate) < 1e-9) return out;
      if (have_richardson && std::abs(richardson - prev_richardson) < 1e-9) {
        out.value = std::clamp(richardson, out.lo, out.hi);
        return out;
      }
      prev_richardson = richardson;
      have_richardson = true;
    }
    prev_estimate = estimate;
    have_prev = true;
  }
  out.low_precision = true;
  return out;
}

double boundary_rotation(const MappingTorus& torus, int n) { return boundary_rotation_data(torus, n).value; }

InfinitesimalRotation infinitesimal_rotation_data(const MappingTorus& torus, const PeriodicOrbitRecord& record,
                                                  int K) {
  if (record.boundary) throw InputError("infinitesimal rotation needs an interior fixed point");
  if (K < 1) throw InputError("K must be positive");
  InfinitesimalRotation out;
  out.K = K;
  const WindingInterval w = winding_interval(torus, record, K);
  out.winding_estimate = w.mean / K;
  out.value = out.winding_estimate;
  if (record.stability == Stability::Degenerate) return out;
  if (const auto mu = checked_index(w, iterate_stability(record.monodromy, K))) {
    out.index_estimate = 0.5 * *mu / K;
    if (std::abs(*out.index_estimate - out.winding_estimate) > 1.0 / K + 1e-6)
      throw ConsistencyError("infinitesimal rotation estimators disagree");
  }
  if (record.stability != Stability::Elliptic) {
    const auto mu = record.cz ? record.cz : conley_zehnder(torus, record);
    out.value = 0.5 * *mu;
  }
  return out;
}

double infinitesimal_rotation(const MappingTorus& torus, const PeriodicOrbitRecord& record, int K) {
  return infinitesimal_rotation_data(torus, record, K).value;
}

TwistInterval twist_interval(const MappingTorus& torus, const PeriodicOrbitRecord& record) {
  return TwistInterval::between(infinitesimal_rotation(torus, record),
                                boundary_rotation(torus, record.ambient_period));
}

double approximant(double alpha, int n) {
  if (n < 1) throw InputError("approximant needs n >= 1");
  return std::floor(n * alpha) / n;
}

RotationData rotation_data(const MappingTorus& torus, const OrbitSearchResult& search) {
  RotationData data;
  data.n = search.n;
  data.boundary = boundary_rotation_data(torus, search.n);
  for (const auto& r : search.records) {
    if (r.boundary) continue;
    OrbitRotation o;
    o.id = r.id;
    o.rot = infinitesimal_rotation(torus, r);
    o.twist = TwistInterval::between(o.rot, data.boundary.value);
    o.integers = integers_in(o.twist);
    data.orbits.push_back(std::move(o));
  }
  return data;
}

}  // namespace symdyn
