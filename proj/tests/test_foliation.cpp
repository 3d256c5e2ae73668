#include "sketch_gen.hpp"
#include "symdyn/foliation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace symdyn;

namespace {

PeriodicOrbitRecord rec(const std::string& id, DiskPoint base, Stability s) {
  PeriodicOrbitRecord r;
  r.id = id;
  r.base = base;
  r.stability = s;
  return r;
}

// Center with Rot = -0.3, an elliptic e' and a positive hyperbolic h on the
// Rot = 0 circle, boundary rotation 0.4. All pairs unlinked.
OrbitDatabase fig9_db() {
  OrbitDatabase db;
  db.n = 1;
  db.boundary_rotation = 0.4;
  db.longitude_action = 10.0;
  db.records = {rec("g0", {0.0, 0.0}, Stability::Elliptic), rec("e1", {-0.65, 0.0}, Stability::Elliptic),
                rec("h", {0.65, 0.0}, Stability::HyperbolicPositive)};
  db.twists = {{"g0", TwistInterval::between(-0.3, 0.4)},
               {"e1", TwistInterval::between(0.02, 0.4)},
               {"h", TwistInterval::between(0.0, 0.4)}};
  db.set_link("g0", "e1", 0);
  db.set_link("g0", "h", 0);
  db.set_link("e1", "h", 0);
  return db;
}

SpanningOrbitNode node(const std::string& ref, Parity p) {
  SpanningOrbitNode n;
  n.ref = ref;
  n.parity = p;
  return n;
}

Leaf half(int a, double area) {
  Leaf l;
  l.kind = LeafKind::HalfCylinder;
  l.a = a;
  l.area = area;
  return l;
}

Leaf cyl(int a, int b, double area) {
  Leaf l;
  l.kind = LeafKind::Cylinder;
  l.a = a;
  l.b = b;
  l.area = area;
  return l;
}

FoliationSketch fig9_sketch() {
  FoliationSketch s;
  s.n = 1;
  s.k = 0;
  s.longitude_action = 10.0;
  s.nodes = {node("g0", Parity::Odd), node("e1", Parity::Odd), node("h", Parity::Even)};
  s.leaves = {cyl(0, 1, 0.3), cyl(1, 2, 0.2), cyl(1, 2, 0.25), half(2, 0.5), half(2, 0.6)};
  return s;
}

FoliationSketch center_alone(int k, int halves) {
  FoliationSketch s;
  s.n = 1;
  s.k = k;
  s.longitude_action = 10.0;
  s.nodes = {node("g0", Parity::Odd)};
  for (int i = 0; i < halves; ++i) s.leaves.push_back(half(0, 1.0 + i));
  return s;
}

std::vector<bool> outcome(const ValidationReport& r) {
  std::vector<bool> v;
  for (const auto& c : r.checks) v.push_back(c.passed);
  return v;
}

// Flips exactly the check `id`, nothing else.
void expect_only(const ValidationReport& before, const ValidationReport& after, char id) {
  for (std::size_t i = 0; i < before.checks.size(); ++i) {
    CAPTURE(before.checks[i].id);
    if (before.checks[i].id == id)
      CHECK(before.checks[i].passed != after.checks[i].passed);
    else
      CHECK(before.checks[i].passed == after.checks[i].passed);
  }
}

}  // namespace

TEST_CASE("is_simple examples") {
  CHECK(is_simple(center_alone(1, 1)));

  FoliationSketch pair;
  pair.nodes = {node("a", Parity::Odd), node("b", Parity::Odd), node("c", Parity::Odd)};
  pair.leaves = {cyl(0, 1, 1.0), cyl(1, 0, 1.0), half(2, 1.0)};
  CHECK_FALSE(is_simple(pair));

  CHECK_FALSE(is_simple(fig9_sketch()));
}

TEST_CASE("is_simple rejects sketches whose two characterizations disagree") {
  // Center hanging off a boundary-connected node: acyclic but not reachable.
  FoliationSketch path;
  path.nodes = {node("a", Parity::Odd), node("b", Parity::Odd)};
  path.leaves = {cyl(0, 1, 1.0), half(1, 1.0)};
  CHECK_FALSE(simple_by_reachability(path));
  CHECK(simple_by_acyclicity(path));
  CHECK_THROWS_AS(is_simple(path), ConsistencyError);
}

TEST_CASE("is_simple characterizations agree on random realizable sketches") {
  std::mt19937_64 rng(20240611);
  int simple = 0, non_simple = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = sketch_gen::random_sketch(rng);
    CAPTURE(trial);
    CHECK(simple_by_reachability(g.sketch) == g.simple);
    CHECK(simple_by_acyclicity(g.sketch) == g.simple);
    REQUIRE_NOTHROW(is_simple(g.sketch));
    (g.simple ? simple : non_simple)++;
  }
  CHECK(simple > 20);
  CHECK(non_simple > 20);
}

TEST_CASE("validate: the three reference sketches") {
  const OrbitDatabase db = fig9_db();

  const auto ok = validate(center_alone(1, 2), db);
  CHECK(ok.valid());
  CHECK(ok.simple);
  CHECK(ok.summary() == "simple, all checks pass");

  const auto bad = validate(center_alone(0, 2), db);
  CHECK_FALSE(bad.valid());
  CHECK_FALSE(bad.check('b').passed);
  CHECK(bad.check('a').passed);
  CHECK(bad.check('c').passed);
  CHECK(bad.check('d').passed);
  CHECK(bad.check('e').passed);
  CHECK(bad.summary() == "simple, failed: (b)");

  const auto fig9 = validate(fig9_sketch(), db);
  CHECK(fig9.valid());
  CHECK_FALSE(fig9.simple);
  CHECK(fig9.summary() == "non-simple, all checks pass");
}

TEST_CASE("validate: individual checks") {
  const OrbitDatabase db = fig9_db();

  SUBCASE("linking") {
    auto s = fig9_sketch();
    s.k = 1;
    const auto r = validate(s, db);
    CHECK_FALSE(r.check('a').passed);
  }
  SUBCASE("twist carrier for non-simple sketches") {
    auto db2 = db;
    db2.twists["g0"] = TwistInterval::between(0.1, 0.4);
    const auto r = validate(fig9_sketch(), db2);
    CHECK_FALSE(r.check('c').passed);
    CHECK(r.check('b').passed);
  }
  SUBCASE("even node leaf count") {
    auto s = fig9_sketch();
    s.leaves.push_back(half(2, 0.7));
    CHECK_FALSE(validate(s, db).check('e').passed);
  }
  SUBCASE("parity must match stability") {
    auto s = fig9_sketch();
    s.nodes[1].parity = Parity::Even;
    CHECK_FALSE(validate(s, db).check('e').passed);
  }
  SUBCASE("a sketch needs a half cylinder") {
    FoliationSketch s;
    s.n = 1;
    s.nodes = {node("g0", Parity::Odd), node("e1", Parity::Odd)};
    s.leaves = {cyl(0, 1, 1.0), cyl(0, 1, 2.0)};
    CHECK_FALSE(simple_by_acyclicity(s));
    CHECK_FALSE(simple_by_reachability(s));
    CHECK_FALSE(validate(s, db).check('e').passed);
  }
  SUBCASE("leaf signs and areas") {
    auto s = fig9_sketch();
    s.leaves[0].sign_b = s.leaves[0].sign_a;
    CHECK_FALSE(validate(s, db).check('d').passed);
    s = fig9_sketch();
    s.leaves[3].area = 0.0;
    CHECK_FALSE(validate(s, db).check('d').passed);
  }
  SUBCASE("Stokes identity with actions") {
    auto s = center_alone(1, 1);
    s.nodes[0].action = 10.0 + 0.25;
    // boundary term L + k m = 10 + pi; half cylinder area = pi - 0.25
    s.leaves[0].area = std::numbers::pi - 0.25;
    CHECK(validate(s, db).check('d').passed);
    s.leaves[0].area += 1e-6;
    CHECK_FALSE(validate(s, db).check('d').passed);
    s.leaves[0].area = 1.0;
    s.nodes[0].action = 10.0 + 4.0;  // above the boundary term
    CHECK_FALSE(validate(s, db).check('d').passed);
  }
  SUBCASE("input errors") {
    auto s = fig9_sketch();
    s.nodes[0].ref = "nope";
    CHECK_THROWS_AS(validate(s, db), InputError);
    auto db2 = db;
    db2.twists.erase("h");
    CHECK_THROWS_AS(validate(fig9_sketch(), db2), InputError);
    s = fig9_sketch();
    s.nodes[2].twist = TwistInterval::between(0.1, 0.4);
    CHECK_THROWS_AS(validate(s, db), InputError);
    s = fig9_sketch();
    s.leaves[1].b = 7;
    CHECK_THROWS_AS(validate(s, db), InputError);
    s = fig9_sketch();
    s.n = 2;
    CHECK_THROWS_AS(validate(s, db), InputError);
  }
}

TEST_CASE("validate checks are independent under mutation") {
  const OrbitDatabase db = fig9_db();
  const auto base = validate(fig9_sketch(), db);
  REQUIRE(base.valid());

  auto s = fig9_sketch();
  s.leaves[0].area = -1.0;
  expect_only(base, validate(s, db), 'd');

  auto db2 = db;
  db2.set_link("g0", "e1", 1);
  expect_only(base, validate(fig9_sketch(), db2), 'a');

  s = fig9_sketch();
  s.leaves.erase(s.leaves.begin() + 4);  // one of h's half cylinders
  expect_only(base, validate(s, db), 'e');

  // Removing a witness of a failing check leaves the other checks alone.
  const auto failing = validate(center_alone(0, 2), db);
  REQUIRE_FALSE(failing.check('b').passed);
  const auto fewer = validate(center_alone(0, 1), db);
  CHECK(outcome(fewer) == outcome(failing));
}

TEST_CASE("integrable sketches") {
  SUBCASE("rho = 2.5 r^2, n = 1, k = 1") {
    const RadialProfile rho({0.0, 2.5});
    const auto s = build_integrable_sketch(rho, 1, 1);
    const auto db = integrable_database(rho, 1, 1);
    REQUIRE(s.nodes.size() == 2);
    CHECK(s.nodes[0].ref == "center");
    CHECK(s.nodes[0].parity == Parity::Odd);  // degenerate center, flagged
    CHECK(s.nodes[1].circle);
    CHECK(db.find_circle("c1")->radius == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
    CHECK(db.degenerate("c1"));
    // Stokes oracle: areas are pi k (s_outer - s_inner)
    REQUIRE(s.leaves.size() == 2);
    CHECK(s.leaves[0].area == doctest::Approx(std::numbers::pi * 0.4).epsilon(1e-12));
    CHECK(s.leaves[1].area == doctest::Approx(std::numbers::pi * 0.6).epsilon(1e-12));
    const auto r = validate(s, db);
    CHECK(r.valid());
    CHECK_FALSE(r.simple);
  }
  SUBCASE("rho = 2.5 r^2, n = 2, k = 3") {
    const RadialProfile rho({0.0, 2.5});
    const auto s = build_integrable_sketch(rho, 2, 3);
    const auto db = integrable_database(rho, 2, 3);
    REQUIRE(s.nodes.size() == 2);
    CHECK(db.find_circle("c1")->radius == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
    CHECK(db.link("center", "c1") == 3);
    CHECK(validate(s, db).valid());
  }
  SUBCASE("no resonance: center alone") {
    const RadialProfile rho({0.2, 0.2});
    const auto s = build_integrable_sketch(rho, 1, 5);
    REQUIRE(s.nodes.size() == 1);
    REQUIRE(s.leaves.size() == 1);
    CHECK(s.leaves[0].kind == LeafKind::HalfCylinder);
    const auto r = validate(s, integrable_database(rho, 1, 5));
    CHECK(r.valid());
    CHECK(r.simple);
  }
  SUBCASE("k = 0 needs the override") {
    const RadialProfile rho({-0.5, 1.0});
    CHECK_THROWS_AS(build_integrable_sketch(rho, 1, 0), InputError);
    CHECK_NOTHROW(build_integrable_sketch(rho, 1, 0, true));
  }
}

TEST_CASE("integrable sketches always validate") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  int with_circles = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RadialProfile rho({coeff(rng), coeff(rng), coeff(rng), coeff(rng)});
    const int n = 1 + trial % 3;
    int k = static_cast<int>(std::lround(n * rho(std::sqrt(0.5))));
    if (k == 0) k = 1;
    CAPTURE(trial);
    const auto s = build_integrable_sketch(rho, n, k);
    const auto r = validate(s, integrable_database(rho, n, k));
    CHECK(r.valid());
    if (s.nodes.size() > 1) ++with_circles;
  }
  CHECK(with_circles >= 10);
}

TEST_CASE("level radii and limit circles") {
  SUBCASE("rho = r^2, omega = 1/4") {
    const auto lim = asymptotic_circles(RadialProfile({0.0, 1.0}), 0.25,
                                        [](int n) { return static_cast<long long>(std::floor(0.25 * n)); });
    REQUIRE(lim.circles.size() == 1);
    CHECK(lim.circles[0].radius == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lim.circles[0].zero_energy_leaf);
    REQUIRE(lim.regions.size() == 2);
    CHECK(lim.regions[0].contains_center);
    CHECK(lim.regions[1].outer == 1.0);
  }
  SUBCASE("three roots in outward order") {
    // rho(s) = 0.5 + 10 (s - 0.2)(s - 0.5)(s - 0.8)
    const RadialProfile rho({-0.3, 6.6, -15.0, 10.0});
    const double omega = 0.5;
    const auto lim = asymptotic_circles(rho, omega, [&](int n) { return static_cast<long long>(std::floor(omega * n)); });
    REQUIRE(lim.circles.size() == 3);
    const double expect[] = {std::sqrt(0.2), std::sqrt(0.5), std::sqrt(0.8)};
    for (int i = 0; i < 3; ++i) {
      CHECK(lim.circles[i].radius == doctest::Approx(expect[i]).epsilon(1e-10));
      CHECK(std::abs(rho(lim.circles[i].radius) - omega) < 1e-10);
    }
    CHECK(lim.circles[0].slope_sign == 1);
    CHECK(lim.circles[1].slope_sign == -1);
    CHECK(lim.circles[2].slope_sign == 1);
    CHECK(lim.regions.size() == 4);
  }
  SUBCASE("omega out of range") {
    const auto lim = asymptotic_circles(RadialProfile({0.0, 1.0}), 1.5, [](int n) { return 3LL * n / 2; });
    CHECK(lim.circles.empty());
    REQUIRE(lim.regions.size() == 1);
    CHECK(lim.regions[0].contains_center);
  }
  SUBCASE("sequences that miss omega are rejected") {
    CHECK_THROWS_AS(asymptotic_circles(RadialProfile({0.0, 1.0}), 0.25, [](int n) { return n / 2; }), InputError);
  }
}

TEST_CASE("sketch traces") {
  const OrbitDatabase db = fig9_db();
  const auto simple = sketch_traces(center_alone(1, 2), db);
  CHECK(simple.size() == 2);
  CHECK(trace_loops(simple) == 0);
  CHECK(trace_loops(sketch_traces(fig9_sketch(), db)) == 1);

  const RadialProfile rho({0.0, 2.5});
  const auto tr = sketch_traces(build_integrable_sketch(rho, 1, 1), integrable_database(rho, 1, 1));
  CHECK(trace_loops(tr) == 1);
  for (const auto& t : tr)
    for (const auto& p : t.points) CHECK(p.norm() <= 1.0 + 1e-12);
}
