#include "symdyn/foliation.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace symdyn {

namespace {

constexpr double kTwistAgreement = 1e-6;
constexpr double kAreaTolerance = 1e-8;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(const TwistInterval& tw) { return "(" + fmt(tw.lo) + ", " + fmt(tw.hi) + ")"; }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

struct NodeInfo {
  TwistInterval twist;
  bool degenerate = false;
  bool circle = false;
  int shear = 0;
  std::optional<double> action;
};

// Does the node have k inside its twist interval? For a circle of fixed
// points the answer refers to the elliptic points of a generic breakup,
// whose rotation sits just below k on the side of positive shear.
bool carries(const NodeInfo& info, int k, double boundary_rotation) {
  if (info.circle) return info.shear * (boundary_rotation - k) > 0;
  return info.twist.contains(k);
}

void check_structure(const FoliationSketch& sketch) {
  const int m = static_cast<int>(sketch.nodes.size());
  std::set<std::string> refs;
  for (const auto& node : sketch.nodes)
    if (!refs.insert(node.ref).second) throw InputError("orbit '" + node.ref + "' appears twice in the sketch");
  for (std::size_t i = 0; i < sketch.leaves.size(); ++i) {
    const Leaf& l = sketch.leaves[i];
    const std::string where = "leaf " + std::to_string(i);
    if (l.a < 0 || l.a >= m) throw InputError(where + ": node index out of range");
    if (l.kind == LeafKind::HalfCylinder) {
      if (l.b != kBoundaryEnd) throw InputError(where + ": half cylinder must end on the boundary");
    } else if (l.b < 0 || l.b >= m || l.b == l.a) {
      throw InputError(where + ": cylinder must join two distinct nodes");
    }
    if (!std::isfinite(l.area)) throw InputError(where + ": area is not finite");
  }
}

std::vector<NodeInfo> resolve(const FoliationSketch& sketch, const OrbitDatabase& db) {
  std::vector<NodeInfo> out;
  for (const auto& node : sketch.nodes) {
    if (!db.contains(node.ref)) throw InputError("unresolved orbit reference '" + node.ref + "'");
    NodeInfo info;
    info.circle = db.find_circle(node.ref) != nullptr;
    if (info.circle != node.circle)
      throw InputError("node '" + node.ref + "' circle flag disagrees with the orbit database");
    auto tw = db.twists.find(node.ref);
    if (tw == db.twists.end()) throw InputError("missing rotation data for '" + node.ref + "'");
    info.twist = tw->second;
    if (node.twist && (std::abs(node.twist->lo - info.twist.lo) > kTwistAgreement ||
                       std::abs(node.twist->hi - info.twist.hi) > kTwistAgreement))
      throw InputError("twist interval of '" + node.ref + "' disagrees with the rotation data");
    info.degenerate = db.degenerate(node.ref);
    if (info.circle) {
      auto s = db.shear.find(node.ref);
      if (s == db.shear.end()) throw InputError("missing shear data for circle '" + node.ref + "'");
      info.shear = s->second;
    }
    info.action = node.action ? node.action : db.action(node.ref);
    out.push_back(info);
  }
  return out;
}

CheckResult check_linking(const FoliationSketch& sketch, const OrbitDatabase& db) {
  CheckResult r{'a', "pairwise linking equals k", true, {}};
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < sketch.nodes.size(); ++j) {
      const auto& a = sketch.nodes[i].ref;
      const auto& b = sketch.nodes[j].ref;
      const auto lk = db.link(a, b);
      if (!lk) throw InputError("orbit database has no linking number for '" + a + "', '" + b + "'");
      if (*lk != sketch.k) bad.push_back("lk(" + a + ", " + b + ") = " + std::to_string(*lk));
    }
  r.passed = bad.empty();
  r.evidence = bad.empty() ? (sketch.nodes.size() < 2 ? "single spanning orbit" : "all pairs link k times")
                           : join(bad);
  return r;
}

CheckResult check_boundary(const FoliationSketch& sketch, const std::vector<NodeInfo>& info) {
  CheckResult r{'b', "k outside the twist interval of boundary-connected orbits", true, {}};
  std::vector<std::string> bad, skipped;
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i) {
    if (!sketch.boundary_connected(static_cast<int>(i))) continue;
    if (info[i].circle) {
      skipped.push_back(sketch.nodes[i].ref);
      continue;
    }
    if (info[i].twist.contains(sketch.k))
      bad.push_back(std::to_string(sketch.k) + " in twist(" + sketch.nodes[i].ref + ") = " + fmt(info[i].twist));
  }
  r.passed = bad.empty();
  if (!bad.empty())
    r.evidence = join(bad);
  else
    r.evidence = skipped.empty() ? "ok" : "circle nodes skipped: " + join(skipped);
  return r;
}

CheckResult check_twist_carrier(const FoliationSketch& sketch, const std::vector<NodeInfo>& info,
                                const OrbitDatabase& db, bool simple) {
  CheckResult r{'c', "non-simple foliation has an orbit with k in its twist interval", true, {}};
  if (simple) {
    r.evidence = "simple";
    return r;
  }
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i)
    if (carries(info[i], sketch.k, db.boundary_rotation)) {
      r.evidence = std::to_string(sketch.k) + " in twist(" + sketch.nodes[i].ref + ")";
      return r;
    }
  r.passed = false;
  r.evidence = "no spanning orbit has " + std::to_string(sketch.k) + " in its twist interval";
  return r;
}

CheckResult check_areas(const FoliationSketch& sketch, const std::vector<NodeInfo>& info) {
  CheckResult r{'d', "leaf areas (Stokes identity and positivity)", true, {}};
  std::vector<std::string> bad;
  const double boundary = sketch.boundary_term();
  for (std::size_t i = 0; i < sketch.leaves.size(); ++i) {
    const Leaf& l = sketch.leaves[i];
    const std::string name = "leaf " + std::to_string(i);
    if (l.sign_a == l.sign_b) {
      bad.push_back(name + ": needs one positive and one negative end");
      continue;
    }
    if (!(l.area > 0)) bad.push_back(name + ": area " + fmt(l.area) + " not positive");
    const std::optional<double> A = info[l.a].action;
    const std::optional<double> B =
        l.kind == LeafKind::HalfCylinder ? std::optional<double>(boundary) : info[l.b].action;
    if (!A || !B) continue;
    const double expected = l.sign_a == EndSign::Positive ? *A - *B : *B - *A;
    if (std::abs(l.area - expected) >= kAreaTolerance)
      bad.push_back(name + ": area " + fmt(l.area) + " but actions give " + fmt(expected));
    if (l.kind == LeafKind::HalfCylinder && l.sign_a == EndSign::Negative && !(*A < boundary))
      bad.push_back(name + ": action of " + sketch.nodes[l.a].ref + " exceeds the boundary term");
  }
  r.passed = bad.empty();
  r.evidence = bad.empty() ? "ok" : join(bad);
  return r;
}

CheckResult check_local_models(const FoliationSketch& sketch, const std::vector<NodeInfo>& info,
                               const OrbitDatabase& db) {
  CheckResult r{'e', "local leaf counts", true, {}};
  std::vector<std::string> bad;
  const bool any_half = std::any_of(sketch.leaves.begin(), sketch.leaves.end(),
                                    [](const Leaf& l) { return l.kind == LeafKind::HalfCylinder; });
  if (!any_half) bad.push_back("no half cylinder leaf");
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i) {
    const auto& node = sketch.nodes[i];
    const int deg = sketch.degree(static_cast<int>(i));
    if (!info[i].degenerate) {
      const Parity expected =
          odd_parity(db.find_record(node.ref)->stability) ? Parity::Odd : Parity::Even;
      if (expected != node.parity) {
        bad.push_back(node.ref + ": parity " + to_string(node.parity) + " but orbit is " + to_string(expected));
        continue;
      }
      if (node.parity == Parity::Even && deg != 4) {
        bad.push_back(node.ref + ": even orbit with " + std::to_string(deg) + " leaves");
        continue;
      }
    }
    if (deg < 1) bad.push_back(node.ref + ": no leaves");
  }
  r.passed = bad.empty();
  r.evidence = bad.empty() ? "ok" : join(bad);
  return r;
}

}  // namespace

std::string to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }
std::string to_string(LeafKind k) { return k == LeafKind::HalfCylinder ? "half_cylinder" : "cylinder"; }

int FoliationSketch::degree(int i) const {
  int d = 0;
  for (const auto& l : leaves) d += (l.a == i) + (l.b == i);
  return d;
}

bool FoliationSketch::boundary_connected(int i) const {
  return std::any_of(leaves.begin(), leaves.end(),
                     [i](const Leaf& l) { return l.kind == LeafKind::HalfCylinder && l.a == i; });
}

bool ValidationReport::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& ValidationReport::check(char id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw InputError(std::string("no check '") + id + "'");
}

std::string ValidationReport::summary() const {
  std::string out = simple ? "simple" : "non-simple";
  if (valid()) return out + ", all checks pass";
  std::vector<std::string> failed;
  for (const auto& c : checks)
    if (!c.passed) failed.push_back(std::string("(") + c.id + ")");
  std::string list;
  for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
  return out + ", failed: " + list;
}

bool simple_by_reachability(const FoliationSketch& sketch) {
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i)
    if (!sketch.boundary_connected(static_cast<int>(i))) return false;
  return true;
}

bool simple_by_acyclicity(const FoliationSketch& sketch) {
  for (const auto& node : sketch.nodes)
    if (node.circle) return false;
  UnionFind uf(sketch.nodes.size());
  for (const auto& l : sketch.leaves) {
    if (l.kind != LeafKind::Cylinder) continue;
    if (l.a == l.b || !uf.unite(l.a, l.b)) return false;
  }
  return true;
}

bool is_simple(const FoliationSketch& sketch) {
  const bool reach = simple_by_reachability(sketch);
  const bool acyclic = simple_by_acyclicity(sketch);
  if (reach != acyclic)
    throw ConsistencyError(std::string("simplicity tests disagree: boundary reachability says ") +
                           (reach ? "simple" : "non-simple") + ", leaf cycles say " +
                           (acyclic ? "simple" : "non-simple"));
  return reach;
}

ValidationReport validate(const FoliationSketch& sketch, const OrbitDatabase& db) {
  if (sketch.n != db.n)
    throw InputError("sketch period " + std::to_string(sketch.n) + " differs from database period " +
                     std::to_string(db.n));
  check_structure(sketch);
  const std::vector<NodeInfo> info = resolve(sketch, db);
  ValidationReport report;
  report.simple = is_simple(sketch);
  report.checks.push_back(check_linking(sketch, db));
  report.checks.push_back(check_boundary(sketch, info));
  report.checks.push_back(check_twist_carrier(sketch, info, db, report.simple));
  report.checks.push_back(check_areas(sketch, info));
  report.checks.push_back(check_local_models(sketch, info, db));
  return report;
}

std::vector<double> level_radii(const RadialProfile& profile, double value) {
  namespace bt = boost::math::tools;
  constexpr int kSamples = 4096;
  const auto solve = [](auto f, double lo, double hi, double flo, double fhi) {
    boost::uintmax_t iters = 200;
    const auto br = bt::toms748_solve(f, lo, hi, flo, fhi, bt::eps_tolerance<double>(52), iters);
    return std::abs(f(br.first)) <= std::abs(f(br.second)) ? br.first : br.second;
  };

  // Monotone pieces of rho in s = r^2.
  std::vector<double> breaks{0.0};
  const auto slope = [&](double s) { return profile.slope_s(s); };
  double prev = slope(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double s0 = static_cast<double>(i - 1) / kSamples, s1 = static_cast<double>(i) / kSamples;
    const double cur = slope(s1);
    if (prev * cur < 0) breaks.push_back(solve(slope, s0, s1, prev, cur));
    else if (cur == 0.0 && i < kSamples) breaks.push_back(s1);
    prev = cur;
  }
  breaks.push_back(1.0);

  const auto f = [&](double s) { return profile.at_s(s) - value; };
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (!(hi > lo)) continue;
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) roots.push_back(lo);
    else if (flo * fhi < 0) roots.push_back(solve(f, lo, hi, flo, fhi));
  }
  std::vector<double> radii;
  for (double s : roots) {
    if (!(s > 0.0 && s < 1.0)) continue;
    const double r = std::sqrt(s);
    if (radii.empty() || r - radii.back() > 1e-12) radii.push_back(r);
  }
  return radii;
}

OrbitDatabase integrable_database(const RadialProfile& profile, int n, int k, double action_constant) {
  if (n < 1) throw InputError("period must be positive");
  const MappingTorus torus = MappingTorus::make(DiskIsotopy::radial_twist(profile), 1, action_constant);
  OrbitSearchResult search;
  search.n = n;
  PeriodicOrbitRecord center = make_record(torus, DiskPoint::Zero(), n);
  center.id = "center";
  search.records.push_back(center);
  const auto radii = level_radii(profile.scaled(n), k);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    FixedCircle c;
    c.id = "c" + std::to_string(i + 1);
    c.radius = radii[i];
    c.k = k;
    c.ambient_period = n;
    c.minimal_period = n / std::gcd(n, std::abs(k));
    c.sample = DiskPoint(radii[i], 0.0);
    search.circles.push_back(c);
  }
  return make_orbit_database(torus, search);
}

FoliationSketch build_integrable_sketch(const RadialProfile& profile, int n, int k, bool allow_k_zero,
                                        double action_constant) {
  if (k == 0 && !allow_k_zero)
    throw InputError("boundary condition k = 0 does not determine the spanning orbits; pass the override");
  const OrbitDatabase db = integrable_database(profile, n, k, action_constant);
  FoliationSketch sketch;
  sketch.n = n;
  sketch.k = k;
  sketch.longitude_action = db.longitude_action;
  sketch.meridian_action = db.meridian_action;

  const auto node_for = [&](const std::string& ref, bool circle) {
    SpanningOrbitNode node;
    node.ref = ref;
    node.circle = circle;
    node.twist = db.twists.at(ref);
    node.action = db.action(ref);
    const auto* rec = db.find_record(ref);
    const bool even = rec && rec->stability != Stability::Degenerate && !odd_parity(rec->stability);
    node.parity = even ? Parity::Even : Parity::Odd;
    return node;
  };
  sketch.nodes.push_back(node_for("center", false));
  for (const auto& c : db.circles) sketch.nodes.push_back(node_for(c.id, true));

  const auto orient = [](Leaf& l, double A, double B) {
    l.sign_a = A >= B ? EndSign::Positive : EndSign::Negative;
    l.sign_b = A >= B ? EndSign::Negative : EndSign::Positive;
    l.area = std::abs(A - B);
  };
  const int m = static_cast<int>(sketch.nodes.size());
  for (int i = 0; i + 1 < m; ++i) {
    Leaf l;
    l.kind = LeafKind::Cylinder;
    l.a = i;
    l.b = i + 1;
    orient(l, *sketch.nodes[i].action, *sketch.nodes[i + 1].action);
    sketch.leaves.push_back(l);
  }
  Leaf out;
  out.kind = LeafKind::HalfCylinder;
  out.a = m - 1;
  out.b = kBoundaryEnd;
  orient(out, *sketch.nodes[m - 1].action, sketch.boundary_term());
  sketch.leaves.push_back(out);
  return sketch;
}

LimitFoliation asymptotic_circles(const RadialProfile& profile, double omega,
                                  const std::function<long long(int)>& k_sequence) {
  if (!std::isfinite(omega)) throw InputError("omega must be finite");
  for (int n = 100; n <= 1000; ++n) {
    const double err = std::abs(static_cast<double>(k_sequence(n)) / n - omega);
    if (err > 2.0 / std::sqrt(static_cast<double>(n)))
      throw InputError("k_n / n does not approach omega (n = " + std::to_string(n) + ")");
  }
  LimitFoliation out;
  out.omega = omega;
  for (double r : level_radii(profile, omega)) {
    LimitCircle c;
    c.radius = r;
    c.rho = profile(r);
    const double slope = profile.slope_s(r * r);
    c.slope_sign = slope > 0 ? 1 : (slope < 0 ? -1 : 0);
    out.circles.push_back(c);
  }
  double inner = 0.0;
  for (const auto& c : out.circles) {
    out.regions.push_back({inner, c.radius, inner == 0.0});
    inner = c.radius;
  }
  out.regions.push_back({inner, 1.0, inner == 0.0});
  return out;
}

std::vector<LeafTrace> sketch_traces(const FoliationSketch& sketch, const OrbitDatabase& db, int samples) {
  if (samples < 2) throw InputError("trace needs at least 2 samples");
  std::vector<DiskPoint> pos;
  for (const auto& node : sketch.nodes) pos.push_back(db.position(node.ref));

  std::vector<LeafTrace> out;
  for (std::size_t i = 0; i < sketch.nodes.size(); ++i) {
    if (!sketch.nodes[i].circle) continue;
    LeafTrace t;
    t.node = static_cast<int>(i);
    t.closed = true;
    const double r = pos[i].norm();
    for (int j = 0; j < samples; ++j) {
      const double a = kTwoPi * j / samples;
      t.points.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    out.push_back(std::move(t));
  }

  std::map<std::pair<int, int>, int> parallel;
  std::map<int, int> halves;
  for (std::size_t li = 0; li < sketch.leaves.size(); ++li) {
    const Leaf& l = sketch.leaves[li];
    LeafTrace t;
    t.leaf = static_cast<int>(li);
    const DiskPoint p = pos[l.a];
    if (l.kind == LeafKind::HalfCylinder) {
      // Radially out, fanning when a node has several half cylinders.
      const int j = halves[l.a]++;
      const double base = p.norm() > 1e-12 ? std::atan2(p.y(), p.x()) : 0.0;
      const double a = base + 0.35 * j + 0.01 * l.a;
      const DiskPoint q(std::cos(a), std::sin(a));
      for (int s = 0; s <= samples; ++s) t.points.push_back(p + (q - p) * (static_cast<double>(s) / samples));
    } else {
      const DiskPoint q = pos[l.b];
      const auto key = std::minmax(l.a, l.b);
      const int j = parallel[{key.first, key.second}]++;
      // Parallel cylinders bow to alternating sides of the chord.
      const double bow = j == 0 ? 0.0 : (j % 2 ? 1.0 : -1.0) * 0.25 * ((j + 1) / 2);
      const DiskPoint d = q - p;
      const DiskPoint ctrl = 0.5 * (p + q) + bow * DiskPoint(-d.y(), d.x());
      for (int s = 0; s <= samples; ++s) {
        const double u = static_cast<double>(s) / samples;
        t.points.push_back((1 - u) * (1 - u) * p + 2 * u * (1 - u) * ctrl + u * u * q);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

int trace_loops(const std::vector<LeafTrace>& traces) {
  std::map<std::pair<long long, long long>, int> ids;
  int next = 0;
  std::vector<std::pair<int, int>> edges;
  int loops = 0;
  const auto vertex = [&](const DiskPoint& p) {
    if (p.norm() > 1.0 - 1e-9) return next++;  // boundary ends stay distinct
    const std::pair<long long, long long> key{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9)};
    auto [it, inserted] = ids.emplace(key, next);
    if (inserted) ++next;
    return it->second;
  };
  for (const auto& t : traces) {
    if (t.points.empty()) continue;
    if (t.closed) {
      ++loops;
      continue;
    }
    edges.emplace_back(vertex(t.points.front()), vertex(t.points.back()));
  }
  UnionFind uf(static_cast<std::size_t>(next));
  for (auto [a, b] : edges)
    if (!uf.unite(a, b)) ++loops;
  return loops;
}

}  // namespace symdyn
