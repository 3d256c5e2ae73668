#include "symdyn/orbits.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace symdyn {

Stability classify(const Matrix2& monodromy) {
  const double tr = monodromy.trace();
  if (std::abs(std::abs(tr) - 2.0) <= kDegenerateTraceBand) return Stability::Degenerate;
  if (std::abs(tr) < 2.0) return Stability::Elliptic;
  return tr > 0 ? Stability::HyperbolicPositive : Stability::HyperbolicNegative;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Elliptic: return "elliptic";
    case Stability::HyperbolicPositive: return "hyperbolic_positive";
    case Stability::HyperbolicNegative: return "hyperbolic_negative";
    case Stability::Degenerate: return "degenerate";
  }
  return "degenerate";
}

Stability stability_from_string(const std::string& name) {
  for (auto s : {Stability::Elliptic, Stability::HyperbolicPositive, Stability::HyperbolicNegative,
                 Stability::Degenerate})
    if (to_string(s) == name) return s;
  throw InputError("unknown stability class '" + name + "'");
}

bool odd_parity(Stability s) { return s == Stability::Elliptic || s == Stability::HyperbolicNegative; }

const PeriodicOrbitRecord* OrbitSearchResult::find_record(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

const FixedCircle* OrbitSearchResult::find_circle(const std::string& id) const {
  for (const auto& c : circles)
    if (c.id == id) return &c;
  return nullptr;
}

int worker_threads(int requested) {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SYMDYN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = std::min(cap, v);
  }
  return requested > 0 ? std::min(requested, cap) : cap;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kPeriodTolerance = 1e-8;
constexpr double kAcceptResidual = 1e-10;
constexpr double kCircleRadialGap = 5e-3;
constexpr int kCircleMinPoints = 16;

double polar_angle(const DiskPoint& p) {
  const double a = std::atan2(p.y(), p.x());
  return a < 0 ? a + kTwoPi : a;
}

bool radius_angle_less(const DiskPoint& a, const DiskPoint& b) {
  const double ra = a.norm(), rb = b.norm();
  if (ra != rb) return ra < rb;
  return polar_angle(a) < polar_angle(b);
}

std::vector<int> divisors(int n) {
  std::vector<int> d;
  for (int i = 1; i <= n; ++i)
    if (n % i == 0) d.push_back(i);
  return d;
}

int minimal_period_of(const DiskIsotopy& iso, const DiskPoint& p, int n) {
  for (int d : divisors(n)) {
    if (d == n) return n;
    if ((iso.evaluate(d, p) - p).norm() < kPeriodTolerance) return d;
  }
  return n;
}

std::vector<DiskPoint> orbit_of(const DiskIsotopy& iso, const DiskPoint& p, int d) {
  std::vector<DiskPoint> pts{p};
  for (int i = 1; i < d; ++i) pts.push_back(iso.step(pts.back()).point);
  return pts;
}

struct NewtonOutcome {
  bool converged = false;
  DiskPoint point = DiskPoint::Zero();
  double residual = 0.0;
  Matrix2 monodromy = Matrix2::Identity();
};

DiskPoint clamp_to_disk(const DiskPoint& q) {
  const double r = q.norm();
  return r > 1.0 ? DiskPoint(q / r) : q;
}

NewtonOutcome newton(const DiskIsotopy& iso, int n, DiskPoint p, const SearchOptions& o) {
  FlowSample s = iso.flow(n, p);
  double r = (s.point - p).norm();
  for (int it = 0; it < o.max_iterations; ++it) {
    const DiskPoint F = s.point - p;
    const Matrix2 A = s.jacobian - Matrix2::Identity();
    Eigen::JacobiSVD<Matrix2> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-9);
    const DiskPoint delta = svd.rank() == 0 ? DiskPoint(DiskPoint::Zero()) : DiskPoint(svd.solve(F));
    if (r <= o.tolerance && delta.norm() <= 1e-10 * std::max(1.0, p.norm())) return {true, p, r, s.jacobian};
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= o.max_halvings; ++h, lambda *= 0.5) {
      const DiskPoint q = clamp_to_disk(p - lambda * delta);
      const FlowSample sq = iso.flow(n, q);
      const double rq = (sq.point - q).norm();
      if (rq < r) {
        p = q;
        s = sq;
        r = rq;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {r <= kAcceptResidual, p, r, s.jacobian};
}

std::optional<WindingInterval> try_winding(const LinearizedPath& path, int k) {
  const auto& S = path.samples;
  if (S.size() < 2) throw InputError("linearized path needs at least two samples");
  std::vector<DiskPoint> dirs;
  constexpr int kDirections = 64;
  for (int j = 0; j < kDirections; ++j) {
    const double a = std::numbers::pi * j / kDirections;
    dirs.emplace_back(std::cos(a), std::sin(a));
  }
  const Matrix2& M = S.back();
  if (std::abs(M.trace()) > 2.0) {
    Eigen::EigenSolver<Matrix2> es(M);
    for (int i = 0; i < 2; ++i) {
      const DiskPoint v = es.eigenvectors().col(i).real();
      if (v.norm() > 0) dirs.push_back(v.normalized());
    }
  }
  WindingInterval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    DiskPoint w = dirs[j];
    double total = 0.0;
    for (int rep = 0; rep < k; ++rep) {
      DiskPoint prev = w;
      for (std::size_t i = 1; i < S.size(); ++i) {
        const DiskPoint u = S[i] * w;
        const double d = signed_angle(prev, u);
        if (std::abs(d) > kHalfPi) return std::nullopt;
        total += d;
        prev = u;
      }
      w = prev.normalized();
    }
    const double turns = total / kTwoPi;
    out.lo = std::min(out.lo, turns);
    out.hi = std::max(out.hi, turns);
    if (j < static_cast<std::size_t>(kDirections)) out.mean += turns / kDirections;
  }
  return out;
}

}  // namespace

// Stability of M^k from the eigenvalue structure of M (no powers formed).
Stability iterate_stability(const Matrix2& M, int k) {
  const Stability s = classify(M);
  switch (s) {
    case Stability::HyperbolicPositive: return s;
    case Stability::HyperbolicNegative: return k % 2 == 0 ? Stability::HyperbolicPositive : s;
    case Stability::Degenerate: return s;
    case Stability::Elliptic: {
      const double theta = std::acos(std::clamp(M.trace() / 2.0, -1.0, 1.0));
      Matrix2 Mk;
      const double tk = 2.0 * std::cos(k * theta);
      Mk << tk, 0, 0, 0;
      return classify(Mk);
    }
  }
  return s;
}

namespace {

template <typename F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

PeriodicOrbitRecord make_record(const MappingTorus& torus, const DiskPoint& base, int n) {
  if (n < 1) throw InputError("period must be positive");
  const FlowSample s = torus.iso.flow(n, base);
  PeriodicOrbitRecord rec;
  rec.base = base;
  rec.ambient_period = n;
  rec.minimal_period = minimal_period_of(torus.iso, base, n);
  rec.monodromy = s.jacobian;
  rec.stability = classify(s.jacobian);
  rec.residual = (s.point - base).norm();
  rec.boundary = base.norm() > 1.0 - 1e-9;
  rec.orbit_points = orbit_of(torus.iso, base, rec.minimal_period);
  rec.action = try_action(torus, base, n);
  rec.cz = conley_zehnder(torus, rec);
  return rec;
}

PeriodicOrbitRecord iterate_record(const PeriodicOrbitRecord& record, int k) {
  if (k < 1) throw InputError("iterate count must be positive");
  PeriodicOrbitRecord out = record;
  out.ambient_period = record.ambient_period * k;
  Matrix2 M = Matrix2::Identity();
  for (int i = 0; i < k; ++i) M = record.monodromy * M;
  out.monodromy = M;
  out.stability = iterate_stability(record.monodromy, k);
  out.cz.reset();
  if (record.action) out.action = *record.action * k;
  return out;
}

LinearizedPath linearized_path(const MappingTorus& torus, const PeriodicOrbitRecord& record, int resolution) {
  LinearizedPath path;
  sweep_periods(torus.iso, record.base, record.ambient_period, resolution,
                [&](double, const DiskPoint&, const Matrix2& J) { path.samples.push_back(J); });
  return path;
}

WindingInterval winding_interval(const LinearizedPath& path, int k) {
  if (k < 1) throw InputError("iterate count must be positive");
  const auto w = try_winding(path, k);
  if (!w) throw NumericalError("winding resolution failure: linearized direction turns more than pi/2 between samples");
  return *w;
}

WindingInterval winding_interval(const MappingTorus& torus, const PeriodicOrbitRecord& record, int k) {
  if (k < 1) throw InputError("iterate count must be positive");
  for (int res = 1; res <= 64; res *= 2)
    if (const auto w = try_winding(linearized_path(torus, record, res), k)) return *w;
  throw NumericalError("winding resolution failure at maximal refinement");
}

int index_from_interval(const WindingInterval& w) {
  if (w.hi - w.lo > 0.5) throw ConsistencyError("winding interval wider than 1/2 (sampling bug)");
  constexpr double kSlack = 1e-9;
  const double m = std::ceil(w.lo - kSlack);
  if (m <= w.hi + kSlack) return static_cast<int>(2 * m);
  return static_cast<int>(2 * std::floor(w.lo) + 1);
}

int conley_zehnder_index(const LinearizedPath& path) { return index_from_interval(winding_interval(path, 1)); }

std::optional<int> checked_index(const WindingInterval& w, Stability s) {
  if (s == Stability::Degenerate) return std::nullopt;
  const int mu = index_from_interval(w);
  if ((std::abs(mu) % 2 == 1) != odd_parity(s))
    throw ConsistencyError("Conley-Zehnder parity disagrees with stability " + to_string(s));
  return mu;
}

std::optional<int> conley_zehnder(const MappingTorus& torus, const PeriodicOrbitRecord& record, int k) {
  const Stability s = k == 1 ? record.stability : iterate_stability(record.monodromy, k);
  if (s == Stability::Degenerate) return std::nullopt;
  return checked_index(winding_interval(torus, record, k), s);
}

std::optional<int> conley_zehnder(const MappingTorus& torus, const PeriodicOrbitRecord& record) {
  return conley_zehnder(torus, record, 1);
}

namespace {

// Turns of the vector field t -> f(psi_t(a), psi_t(b)) over [0, n], refining the sweep.
template <typename VecFn>
double tracked_turns(const DiskIsotopy& iso, const DiskPoint& a, const DiskPoint& b, int n, VecFn vec,
                     double collision) {
  for (int res = 1; res <= 64; res *= 2) {
    std::vector<DiskPoint> pa, pb;
    sweep_periods(iso, a, n, res, [&](double, const DiskPoint& q, const Matrix2&) { pa.push_back(q); });
    sweep_periods(iso, b, n, res, [&](double, const DiskPoint& q, const Matrix2&) { pb.push_back(q); });
    TurnCounter counter;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const DiskPoint v = vec(pa[i], pb[i]);
      if (v.norm() < collision) throw NumericalError("orbit collision: suspension loops meet");
      counter.push(v);
    }
    if (counter.max_step() <= kHalfPi) return counter.turns();
  }
  throw NumericalError("winding resolution failure at maximal refinement");
}

int to_integer(double turns) {
  const double r = std::round(turns);
  if (std::abs(turns - r) > 1e-6) throw NumericalError("winding of a closed suspension loop is not an integer");
  return static_cast<int>(r);
}

}  // namespace

int linking_number(const MappingTorus& torus, const DiskPoint& a, const DiskPoint& b, int n) {
  return to_integer(tracked_turns(
      torus.iso, a, b, n, [](const DiskPoint& x, const DiskPoint& y) -> DiskPoint { return x - y; }, 1e-8));
}

int linking_number(const MappingTorus& torus, const PeriodicOrbitRecord& a, const PeriodicOrbitRecord& b) {
  if (a.ambient_period != b.ambient_period)
    throw InputError("linking number needs records with the same ambient period");
  return linking_number(torus, a.base, b.base, a.ambient_period);
}

int center_winding(const MappingTorus& torus, const DiskPoint& p, int n) {
  return to_integer(tracked_turns(
      torus.iso, p, p, n, [](const DiskPoint& x, const DiskPoint&) -> DiskPoint { return x; }, kCollisionDistance));
}

namespace {

struct BoundaryFindings {
  std::optional<FixedCircle> circle;
  std::vector<DiskPoint> points;
};

BoundaryFindings boundary_fixed_points(const MappingTorus& torus, int n, int seeds) {
  BoundaryFindings out;
  const auto make_circle = [&](int k) {
    FixedCircle c;
    c.radius = 1.0;
    c.k = k;
    c.ambient_period = n;
    c.sample = DiskPoint(1, 0);
    c.boundary = true;
    c.minimal_period = minimal_period_of(torus.iso, c.sample, n);
    return c;
  };
  if (const auto rot = torus.iso.boundary_rotation_closed_form()) {
    const double total = n * *rot;
    if (std::abs(total - std::round(total)) < 1e-12) out.circle = make_circle(static_cast<int>(std::round(total)));
    return out;
  }
  const auto lift = boundary_lift(torus.with_period(n));
  std::vector<double> g(static_cast<std::size_t>(seeds) + 1);
  for (int j = 0; j <= seeds; ++j) {
    const double s = static_cast<double>(j) / seeds;
    g[j] = lift(s) - s;
  }
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  if (*hi - *lo < 1e-9 && std::abs(*lo - std::round(*lo)) < 1e-9) {
    out.circle = make_circle(static_cast<int>(std::round(*lo)));
    return out;
  }
  for (double m = std::ceil(*lo); m <= *hi; m += 1.0) {
    for (int j = 0; j < seeds; ++j) {
      const double a = g[j] - m, b = g[j + 1] - m;
      double root;
      if (a == 0.0) {
        root = static_cast<double>(j) / seeds;
      } else if (a * b < 0.0) {
        boost::uintmax_t iters = 100;
        const auto bracket = boost::math::tools::toms748_solve(
            [&](double s) { return lift(s) - s - m; }, static_cast<double>(j) / seeds,
            static_cast<double>(j + 1) / seeds, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
        root = 0.5 * (bracket.first + bracket.second);
      } else {
        continue;
      }
      out.points.emplace_back(std::cos(kTwoPi * root), std::sin(kTwoPi * root));
    }
  }
  return out;
}

void dedup_sorted(std::vector<NewtonOutcome>& pts, double dist) {
  std::sort(pts.begin(), pts.end(),
            [](const NewtonOutcome& a, const NewtonOutcome& b) { return radius_angle_less(a.point, b.point); });
  std::vector<NewtonOutcome> kept;
  for (const auto& p : pts) {
    const double r = p.point.norm();
    bool dup = false;
    for (auto it = kept.rbegin(); it != kept.rend() && it->point.norm() >= r - dist; ++it)
      if ((it->point - p.point).norm() < dist) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(p);
  }
  pts = std::move(kept);
}

}  // namespace

OrbitSearchResult find_periodic_points(const MappingTorus& torus, int n, const SearchOptions& o) {
  if (n < 1) throw InputError("period must be positive");
  if (o.radial < 4 || o.angular < 4) throw InputError("seed grid counts must be at least 4");
  const DiskIsotopy& iso = torus.iso;

  std::vector<DiskPoint> seeds{DiskPoint::Zero()};
  for (int i = 0; i < o.radial; ++i) {
    const double r = (i + 0.5) / o.radial;
    for (int j = 0; j < o.angular; ++j) {
      const double a = kTwoPi * j / o.angular;
      seeds.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  }
  std::vector<NewtonOutcome> outcomes(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), worker_threads(o.threads),
               [&](int i) { outcomes[i] = newton(iso, n, seeds[i], o); });

  OrbitSearchResult result;
  result.n = n;
  auto& diag = result.diagnostics;
  diag.seeds = static_cast<int>(seeds.size()) + o.boundary_seeds;
  std::vector<NewtonOutcome> interior;
  for (const auto& out : outcomes) {
    if (!out.converged) {
      ++diag.diverged;
      continue;
    }
    ++diag.converged;
    if (out.point.norm() > 1.0 - 1e-9) {
      ++diag.boundary_hits;
      continue;
    }
    if (classify(out.monodromy) == Stability::Degenerate) ++diag.singular;
    interior.push_back(out);
  }
  dedup_sorted(interior, o.dedup_distance);
  diag.distinct_points = static_cast<int>(interior.size());

  // Circle detection on degenerate points: single linkage in radius.
  std::vector<std::size_t> degenerate;
  for (std::size_t i = 0; i < interior.size(); ++i)
    if (classify(interior[i].monodromy) == Stability::Degenerate) degenerate.push_back(i);
  std::stable_sort(degenerate.begin(), degenerate.end(),
                   [&](std::size_t a, std::size_t b) { return interior[a].point.norm() < interior[b].point.norm(); });
  std::vector<bool> in_circle(interior.size(), false);
  std::vector<FixedCircle> circles;
  for (std::size_t start = 0; start < degenerate.size();) {
    std::size_t end = start + 1;
    while (end < degenerate.size() &&
           interior[degenerate[end]].point.norm() - interior[degenerate[end - 1]].point.norm() < kCircleRadialGap)
      ++end;
    std::vector<DiskPoint> pts;
    for (std::size_t i = start; i < end; ++i) pts.push_back(interior[degenerate[i]].point);
    std::vector<double> angles;
    for (const auto& p : pts) angles.push_back(polar_angle(p));
    std::sort(angles.begin(), angles.end());
    double max_gap = angles.empty() ? kTwoPi : kTwoPi - angles.back() + angles.front();
    for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    if (static_cast<int>(pts.size()) >= kCircleMinPoints && max_gap < kHalfPi) {
      FixedCircle c;
      double lo = 1.0, hi = 0.0, sum = 0.0;
      for (const auto& p : pts) {
        lo = std::min(lo, p.norm());
        hi = std::max(hi, p.norm());
        sum += p.norm();
      }
      c.radius = sum / static_cast<double>(pts.size());
      c.spread = hi - lo;
      c.ambient_period = n;
      c.sample = pts.front();
      c.minimal_period = minimal_period_of(iso, c.sample, n);
      c.k = center_winding(torus, c.sample, n);
      c.deformed = c.spread > 1e-6;
      if (!c.deformed) {
        for (int j = 0; j < 64 && !c.deformed; ++j) {
          const double a = kTwoPi * j / 64;
          const DiskPoint p(c.radius * std::cos(a), c.radius * std::sin(a));
          if ((iso.evaluate(n, p) - p).norm() >= 1e-8) c.deformed = true;
        }
      }
      if (c.deformed) c.points = pts;
      circles.push_back(std::move(c));
      for (std::size_t i = start; i < end; ++i) in_circle[degenerate[i]] = true;
    }
    start = end;
  }

  // Group remaining points into psi-orbits, representative first in (radius, angle) order.
  const double assign_distance = 10 * o.dedup_distance;
  std::vector<bool> assigned(interior.size(), false);
  std::vector<PeriodicOrbitRecord> records;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (in_circle[i] || assigned[i]) continue;
    const DiskPoint base = interior[i].point;
    PeriodicOrbitRecord rec;
    rec.base = base;
    rec.ambient_period = n;
    rec.monodromy = interior[i].monodromy;
    rec.residual = interior[i].residual;
    rec.stability = classify(rec.monodromy);
    rec.minimal_period = minimal_period_of(iso, base, n);
    rec.orbit_points = orbit_of(iso, base, rec.minimal_period);
    for (std::size_t j = i; j < interior.size(); ++j)
      for (const auto& q : rec.orbit_points)
        if ((interior[j].point - q).norm() < assign_distance) assigned[j] = true;
    records.push_back(std::move(rec));
  }

  BoundaryFindings bnd = boundary_fixed_points(torus, n, o.boundary_seeds);
  if (bnd.circle) circles.push_back(*bnd.circle);
  std::sort(bnd.points.begin(), bnd.points.end(), radius_angle_less);
  std::vector<PeriodicOrbitRecord> boundary_records;
  for (const auto& p : bnd.points) {
    bool seen = false;
    for (const auto& r : boundary_records)
      for (const auto& q : r.orbit_points) seen = seen || (q - p).norm() < assign_distance;
    if (seen) continue;
    PeriodicOrbitRecord rec = make_record(torus, p, n);
    rec.boundary = true;
    boundary_records.push_back(std::move(rec));
  }

  parallel_for(static_cast<int>(records.size()), worker_threads(o.threads), [&](int i) {
    auto& rec = records[i];
    rec.action = try_action(torus, rec.base, n);
    rec.cz = conley_zehnder(torus, rec);
  });

  int next = 0;
  for (auto& r : records) r.id = "o" + std::to_string(next++);
  for (auto& r : boundary_records) {
    r.id = "o" + std::to_string(next++);
    records.push_back(std::move(r));
  }
  std::stable_sort(circles.begin(), circles.end(),
                   [](const FixedCircle& a, const FixedCircle& b) { return a.radius < b.radius; });
  for (std::size_t i = 0; i < circles.size(); ++i) circles[i].id = "c" + std::to_string(i);
  result.records = std::move(records);
  result.circles = std::move(circles);
  return result;
}

}  // namespace symdyn
