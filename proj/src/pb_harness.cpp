#include "symdyn/pb_harness.hpp"

#include <cmath>
#include <numeric>

namespace symdyn {

namespace {

bool on_orbit(const PeriodicOrbitRecord& orbit, const DiskPoint& p, double dist) {
  for (const auto& q : orbit.orbit_points)
    if ((q - p).norm() < dist) return true;
  return (orbit.base - p).norm() < dist;
}

PeriodicOrbitRecord center_at(const PeriodicOrbitRecord& center, int n) {
  if (center.ambient_period == n) return center;
  if (n % center.ambient_period != 0)
    throw InputError("period must be a multiple of the center's ambient period");
  return iterate_record(center, n / center.ambient_period);
}

}  // namespace

PBReport verify_pb(const MappingTorus& torus, const PeriodicOrbitRecord& center, int k,
                   const OrbitSearchResult& search) {
  PBReport rep;
  rep.n = search.n;
  rep.k = k;
  rep.center_id = center.id;
  const PeriodicOrbitRecord c = center_at(center, search.n);
  rep.twist = TwistInterval::between(infinitesimal_rotation(torus, c), boundary_rotation(torus, search.n));
  rep.vacuous = !rep.twist.contains(k);
  if (rep.vacuous) return rep;
  for (const auto& r : search.records) {
    if (r.boundary || on_orbit(c, r.base, 1e-6)) continue;
    if (linking_number(torus, r, c) == k) rep.witnesses.push_back(r.id);
  }
  for (const auto& circle : search.circles) {
    if (circle.boundary) continue;
    if (linking_number(torus, circle.sample, c.base, search.n) == k) rep.circle_witnesses.push_back(circle.id);
  }
  rep.satisfied = rep.witnesses.size() >= 2 || !rep.circle_witnesses.empty();
  return rep;
}

PBReport verify_pb(const MappingTorus& torus, const PeriodicOrbitRecord& center, int n, int k,
                   const SearchOptions& options) {
  const PeriodicOrbitRecord c = center_at(center, n);
  const TwistInterval tw = TwistInterval::between(infinitesimal_rotation(torus, c), boundary_rotation(torus, n));
  if (!tw.contains(k)) {
    PBReport rep;
    rep.n = n;
    rep.k = k;
    rep.center_id = center.id;
    rep.twist = tw;
    rep.vacuous = true;
    return rep;
  }
  return verify_pb(torus, center, k, find_periodic_points(torus, n, options));
}

PeriodicOrbitRecord default_center(const MappingTorus& torus, const SearchOptions& options) {
  PeriodicOrbitRecord c = make_record(torus, DiskPoint::Zero(), 1);
  if (c.residual >= 1e-10) {
    const auto search = find_periodic_points(torus, 1, options);
    const PeriodicOrbitRecord* first = nullptr;
    for (const auto& r : search.records)
      if (!r.boundary) {
        first = &r;
        break;
      }
    if (!first) throw NumericalError("no interior fixed point found for the center");
    c = *first;
  }
  c.id = "center";
  return c;
}

long long coprime_count(double a, double b, int N) {
  if (!(a < b)) throw InputError("coprime_count needs a < b");
  if (N < 1) throw InputError("coprime_count needs N >= 1");
  long long count = 0;
  for (long long q = 1; q <= N; ++q) {
    const long long pmin = static_cast<long long>(std::floor(q * a)) + 1;
    const long long pmax = static_cast<long long>(std::ceil(q * b)) - 1;
    for (long long p = pmin; p <= pmax; ++p)
      if (std::gcd(p < 0 ? -p : p, q) == 1) ++count;
  }
  return count;
}

double growth_bound(double a, double b) { return 3.0 * std::abs(b - a) / (std::numbers::pi * std::numbers::pi); }

namespace {

struct CircleKey {
  bool boundary;
  long long num, den;  // k / n reduced
  double radius;
};

CircleKey key_of(const FixedCircle& c) {
  const long long g = std::gcd(static_cast<long long>(std::abs(c.k)), static_cast<long long>(c.ambient_period));
  const long long den = c.ambient_period / (g == 0 ? 1 : g);
  return {c.boundary, g == 0 ? 0 : c.k / g, g == 0 ? 1 : den, c.radius};
}

}  // namespace

CensusReport census(const MappingTorus& torus, int N_max, double a, double b, const SearchOptions& options) {
  if (N_max < 1) throw InputError("census needs N_max >= 1");
  CensusReport rep;
  rep.N_max = N_max;
  rep.a = a;
  rep.b = b;
  rep.bound_constant = growth_bound(a, b);
  std::vector<PeriodicOrbitRecord> orbits;
  std::vector<CircleKey> circles;
  for (int n = 1; n <= N_max; ++n) {
    const auto search = find_periodic_points(torus, n, options);
    CensusLevel level;
    level.n = n;
    level.diagnostics = search.diagnostics;
    for (const auto& r : search.records) {
      bool known = false;
      for (const auto& o : orbits) known = known || on_orbit(o, r.base, 1e-5);
      if (known) continue;
      orbits.push_back(r);
      ++level.new_orbits;
    }
    for (const auto& c : search.circles) {
      const CircleKey key = key_of(c);
      bool known = false;
      for (const auto& o : circles)
        known = known || (o.boundary == key.boundary && o.num == key.num && o.den == key.den &&
                          std::abs(o.radius - key.radius) < 1e-2);
      if (known) continue;
      circles.push_back(key);
      ++level.new_circles;
      rep.circles_flagged = true;
    }
    level.mu = static_cast<long long>(orbits.size() + circles.size());
    level.coprime = a < b ? coprime_count(a, b, n) : 0;
    level.bound_times_n2 = rep.bound_constant * n * n;
    rep.levels.push_back(level);
  }
  return rep;
}

CensusReport census(const MappingTorus& torus, int N_max, const SearchOptions& options) {
  const PeriodicOrbitRecord c = default_center(torus, options);
  const TwistInterval tw = twist_interval(torus, c);
  return census(torus, N_max, tw.lo, tw.hi, options);
}

}  // namespace symdyn
