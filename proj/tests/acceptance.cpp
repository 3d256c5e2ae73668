// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "sketch_gen.hpp"
#include "symdyn/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

using namespace symdyn;

namespace {

const std::string kData = SYMDYN_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
  double limit_seconds = 0.0;  // 0: none

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.limit_seconds > 0 && secs > out.limit_seconds)
    out.require(false, "runtime " + std::to_string(secs) + " s over " + std::to_string(out.limit_seconds) + " s");
  if (!out.pass) ++failures;
  std::printf("%s %d %s (%.1f s)%s%s\n", out.pass ? "PASS" : "FAIL", id, name, secs, out.detail.empty() ? "" : ": ",
              out.detail.c_str());
  std::fflush(stdout);
}

std::string str(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

MappingTorus benchmark() { return load_map(kData + "/perturbed_twist.json"); }

// Non-monotone twist followed by a Hamiltonian flow that is flat at the boundary.
MappingTorus hamiltonian_family() {
  return MappingTorus::make(DiskIsotopy::composition(
      {DiskIsotopy::radial_twist(RadialProfile({0.35, -0.2, 0.6})),
       DiskIsotopy::hamiltonian(HamiltonianSpec::make(Expression::parse("0.02*(1-r2)^2*x*y"), 0.05))}));
}

// Distinct reduced fractions in (a, b) with denominator <= N.
long long fraction_oracle(double a, double b, int N) {
  std::set<std::pair<long long, long long>> seen;
  for (long long q = 1; q <= N; ++q)
    for (long long p = static_cast<long long>(std::floor(q * a)); p <= static_cast<long long>(std::ceil(q * b)); ++p) {
      if (!(q * a < p && p < q * b)) continue;
      const long long g = std::gcd(p < 0 ? -p : p, q);
      seen.emplace(p / g, q / g);
    }
  return static_cast<long long>(seen.size());
}

Outcome rotation_scaling() {
  Outcome o;
  o.limit_seconds = 30;
  const std::vector<std::pair<std::string, MappingTorus>> families = {
      {"rotation", MappingTorus::make(DiskIsotopy::rigid_rotation(0.3), 1)},
      {"benchmark", benchmark()},
      {"hamiltonian", hamiltonian_family()},
  };
  int checks = 0;
  for (const auto& [name, torus] : families) {
    const double one = boundary_rotation(torus, 1);
    for (int n : {1, 2, 3, 5, 8}) {
      const double err = std::abs(boundary_rotation(torus, n) - n * one);
      o.require(err < 1e-9, name + " boundary n=" + std::to_string(n) + " err " + str(err));
      const auto rec = make_record(torus, DiskPoint::Zero(), n);
      const double rot_n = infinitesimal_rotation(torus, rec);
      for (int k : {2, 3}) {
        const double rot_kn = infinitesimal_rotation(torus, iterate_record(rec, k));
        const double e = std::abs(rot_kn - k * rot_n);
        o.require(e < 2.0 / k + 1e-9, name + " center n=" + std::to_string(n) + " k=" + std::to_string(k));
        ++checks;
      }
    }
  }
  o.detail = o.pass ? std::to_string(checks) + " interior and 15 boundary checks" : o.detail;
  return o;
}

Outcome linking_algebra() {
  Outcome o;
  o.limit_seconds = 120;
  const MappingTorus torus = benchmark();
  const auto search = find_periodic_points(torus, 1);
  const auto& recs = search.records;
  int pairs = 0;
  for (std::size_t i = 0; i < recs.size(); ++i)
    for (std::size_t j = i + 1; j < recs.size(); ++j) {
      const int lk = linking_number(torus, recs[i], recs[j]);
      o.require(lk == linking_number(torus, recs[j], recs[i]), "asymmetric " + recs[i].id + "," + recs[j].id);
      for (int k : {2, 3, 5})
        o.require(linking_number(torus, iterate_record(recs[i], k), iterate_record(recs[j], k)) == k * lk,
                  "nonlinear " + recs[i].id + "," + recs[j].id + " k=" + std::to_string(k));
      ++pairs;
    }
  o.require(pairs >= 20, "only " + std::to_string(pairs) + " pairs");
  if (o.pass) o.detail = std::to_string(pairs) + " pairs";
  return o;
}

Outcome estimator_consistency() {
  Outcome o;
  const MappingTorus torus = benchmark();
  int checked = 0;
  for (int n : {1, 2}) {
    for (const auto& r : find_periodic_points(torus, n).records) {
      if (r.boundary || r.stability == Stability::Degenerate) continue;
      const auto d = infinitesimal_rotation_data(torus, r, 200);
      o.require(d.index_estimate.has_value(), r.id + " has no index estimate");
      if (d.index_estimate)
        o.require(std::abs(*d.index_estimate - d.winding_estimate) <= 1.0 / 200 + 1e-6, r.id + " estimators differ");
      ++checked;
    }
  }
  o.require(checked > 0, "no nondegenerate orbits");
  if (o.pass) o.detail = std::to_string(checked) + " nondegenerate orbits (n = 1, 2)";
  return o;
}

Outcome poincare_birkhoff() {
  Outcome o;
  o.limit_seconds = 300;
  const MappingTorus torus = benchmark();
  const auto center = default_center(torus);
  const auto search = find_periodic_points(torus, 1);
  std::string counts;
  for (int k : {1, 2}) {
    const PBReport r = verify_pb(torus, center, k, search);
    o.require(!r.vacuous, "k=" + std::to_string(k) + " vacuous");
    o.require(r.witnesses.size() >= 2, "k=" + std::to_string(k) + " has " + std::to_string(r.witnesses.size()) +
                                           " isolated witnesses");
    for (const auto& id : r.witnesses)
      o.require(linking_number(torus, *search.find_record(id), center) == k, id + " does not link k times");
    counts += (counts.empty() ? "" : ", ") + ("k=" + std::to_string(k) + ": " + std::to_string(r.witnesses.size()));
  }
  if (o.pass) o.detail = "isolated witnesses " + counts;
  return o;
}

Outcome growth_census() {
  Outcome o;
  const long long c200 = coprime_count(0, 1, 200);
  o.require(c200 == fraction_oracle(0, 1, 200), "count disagrees with fraction enumeration");
  const double c = 3.0 / (std::numbers::pi * std::numbers::pi);
  const double rel = std::abs(static_cast<double>(c200) / (200.0 * 200.0) - c) / c;
  o.require(rel < 0.01, "density off by " + str(rel));

  const CensusReport rep = census(benchmark(), 6, 0.0, 2.5);
  std::string row;
  for (const auto& l : rep.levels) {
    o.require(l.coprime == fraction_oracle(0.0, 2.5, l.n), "lattice count mismatch at N=" + std::to_string(l.n));
    o.require(l.mu >= l.coprime, "mu(" + std::to_string(l.n) + ") = " + std::to_string(l.mu) + " < " +
                                     std::to_string(l.coprime));
    row += (row.empty() ? "" : " ") + std::to_string(l.mu) + "/" + std::to_string(l.coprime);
  }
  if (o.pass) o.detail = "density error " + str(100 * rel) + "%; mu/coprime for N=1..6: " + row;
  return o;
}

Outcome foliation_lemmas() {
  Outcome o;
  const MappingTorus torus = load_map(kData + "/fig9_map.json");
  const OrbitDatabase db = make_orbit_database(torus, find_periodic_points(torus, 1));
  const auto sketch = [](const std::string& f) { return sketch_from_json(read_json_file(kData + "/" + f)); };

  const auto simple = validate(sketch("center_k1.json"), db);
  o.require(simple.valid() && simple.simple, "simple example: " + simple.summary());
  const auto violation = validate(sketch("center_k0.json"), db);
  bool only_b = !violation.check('b').passed;
  for (char id : {'a', 'c', 'd', 'e'}) only_b = only_b && violation.check(id).passed;
  o.require(only_b, "boundary violation example: " + violation.summary());
  const auto fig9 = validate(sketch("fig9.json"), db);
  o.require(fig9.valid() && !fig9.simple, "figure 9 example: " + fig9.summary());

  std::mt19937_64 rng(4242);
  int agree = 0, non_simple = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = sketch_gen::random_sketch(rng);
    const bool reach = simple_by_reachability(g.sketch), acyclic = simple_by_acyclicity(g.sketch);
    if (reach == acyclic && reach == g.simple) ++agree;
    non_simple += !g.simple;
  }
  o.require(agree == 100, std::to_string(100 - agree) + " random sketches disagree");
  if (o.pass)
    o.detail = "pass / fail-(b) / non-simple pass; 100 random sketches agree (" + std::to_string(non_simple) +
               " non-simple)";
  return o;
}

Outcome pseudo_rotation() {
  Outcome o;
  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  const MappingTorus torus = load_map(kData + "/golden_rotation.json");
  const CensusReport rep = census(torus, 8);
  for (const auto& l : rep.levels)
    o.require(l.mu == 1, "N=" + std::to_string(l.n) + " reports " + std::to_string(l.mu) + " orbits");
  o.require(rep.levels.size() == 8, "census stopped early");
  double worst = 0.0;
  for (int n = 1; n <= 1000; ++n) {
    const double err = std::abs(approximant(alpha, n) - alpha);
    worst = std::max(worst, err * n);
    o.require(err < 1.0 / n, "approximant n=" + std::to_string(n));
  }
  if (o.pass) o.detail = "one orbit for N <= 8; max n|approx - alpha| = " + str(worst);
  return o;
}

Outcome limit_circles() {
  Outcome o;
  const RadialProfile rho = load_map(kData + "/three_root.json").iso.profile();
  const double omega = 1.0 / std::numbers::sqrt2 - 0.2;
  const auto lim = asymptotic_circles(rho, omega, [&](int n) { return static_cast<long long>(std::floor(omega * n)); });
  o.require(lim.circles.size() == 3, std::to_string(lim.circles.size()) + " circles");
  // Oracle: sign changes of rho - omega on a fine radial grid, bisected.
  std::vector<double> roots;
  const int M = 100000;
  const auto f = [&](double r) { return rho(r) - omega; };
  for (int i = 0; i < M; ++i) {
    double a = static_cast<double>(i) / M, b = static_cast<double>(i + 1) / M;
    if (f(a) * f(b) > 0) continue;
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      const double m = 0.5 * (a + b);
      (f(a) * f(m) <= 0 ? b : a) = m;
    }
    roots.push_back(0.5 * (a + b));
  }
  o.require(roots.size() == 3, "oracle found " + std::to_string(roots.size()) + " roots");
  for (std::size_t i = 0; i < lim.circles.size(); ++i) {
    const double r = lim.circles[i].radius;
    o.require(std::abs(rho(r) - omega) < 1e-10, "residual at circle " + std::to_string(i));
    if (i > 0) o.require(r > lim.circles[i - 1].radius, "circles not ordered outward");
    if (i < roots.size()) o.require(std::abs(r - roots[i]) < 1e-9, "circle " + std::to_string(i) + " misplaced");
  }
  o.require(lim.regions.size() == 4, "expected 4 regions");
  if (o.pass && lim.circles.size() == 3)
    o.detail = "r = " + str(lim.circles[0].radius) + ", " + str(lim.circles[1].radius) + ", " +
               str(lim.circles[2].radius);
  return o;
}

}  // namespace

int main() {
  criterion(1, "rotation scaling", rotation_scaling);
  criterion(2, "linking algebra", linking_algebra);
  criterion(3, "estimator consistency", estimator_consistency);
  criterion(4, "Poincare-Birkhoff witnesses", poincare_birkhoff);
  criterion(5, "growth census", growth_census);
  criterion(6, "foliation lemma suite", foliation_lemmas);
  criterion(7, "pseudo-rotation", pseudo_rotation);
  criterion(8, "integrable limit circles", limit_circles);
  return failures == 0 ? 0 : 1;
}
