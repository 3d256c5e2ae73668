#pragma once

// Combinatorial finite energy foliations of a mapping torus: spanning orbits
// joined by rigid leaves, their validation, and the foliations of integrable
// twist maps together with their limit circles.

#include "symdyn/orbit_db.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace symdyn {

enum class Parity { Odd, Even };
enum class LeafKind { HalfCylinder, Cylinder };
enum class EndSign { Positive, Negative };

inline constexpr int kBoundaryEnd = -1;

struct SpanningOrbitNode {
  std::string ref;  // record or circle id in the orbit database
  Parity parity = Parity::Odd;
  std::optional<TwistInterval> twist;  // must agree with the database when given
  std::optional<double> action;  // falls back to the database
  bool circle = false;  // the node is a circle of fixed points
};

struct Leaf {
  LeafKind kind = LeafKind::Cylinder;
  int a = 0;
  int b = kBoundaryEnd;  // kBoundaryEnd for half cylinders
  EndSign sign_a = EndSign::Negative;
  EndSign sign_b = EndSign::Positive;
  double area = 0.0;
};

struct FoliationSketch {
  int n = 1;
  int k = 0;
  std::vector<SpanningOrbitNode> nodes;
  std::vector<Leaf> leaves;
  double longitude_action = 0.0;
  double meridian_action = std::numbers::pi;

  /// Action of the boundary end of a half cylinder: L + k m.
  double boundary_term() const { return longitude_action + k * meridian_action; }
  /// Number of leaves touching node i.
  int degree(int i) const;
  bool boundary_connected(int i) const;
};

struct CheckResult {
  char id = 'a';
  std::string name;
  bool passed = true;
  std::string evidence;
};

struct ValidationReport {
  bool simple = false;
  std::vector<CheckResult> checks;  // (a) .. (e) in order

  bool valid() const;
  const CheckResult& check(char id) const;
  /// "simple, all checks pass", "non-simple, failed: (b)", ...
  std::string summary() const;
};

/// Checks (a) pairwise linking = k, (b) k outside the twist interval of
/// boundary-connected nodes, (c) a node with k in its twist interval when
/// the sketch is non-simple, (d) leaf areas, (e) local leaf counts.
/// Throws InputError on unresolved references or missing rotation data.
ValidationReport validate(const FoliationSketch& sketch, const OrbitDatabase& db);

/// Every node joined to the boundary by a leaf. Cross-checked against the
/// absence of cycles among rigid leaves (each half cylinder ending at its own
/// boundary point, circle nodes counting as cycles); ConsistencyError when the
/// two tests disagree.
bool is_simple(const FoliationSketch& sketch);
bool simple_by_reachability(const FoliationSketch& sketch);
bool simple_by_acyclicity(const FoliationSketch& sketch);

/// Radii in (0, 1) where rho(r) = value, increasing.
std::vector<double> level_radii(const RadialProfile& profile, double value);

/// Orbit database of the integrable twist with profile rho at period n: the
/// center and the circles where n rho = k. Ids "center", "c1", "c2", ...
OrbitDatabase integrable_database(const RadialProfile& profile, int n, int k, double action_constant = 10.0);
/// The foliation with the center and the circles n rho = k as spanning orbits,
/// chained outward by cylinders and joined to the boundary by a half cylinder.
/// Throws InputError for k = 0 unless allowed explicitly.
FoliationSketch build_integrable_sketch(const RadialProfile& profile, int n, int k, bool allow_k_zero = false,
                                        double action_constant = 10.0);

struct LimitCircle {
  double radius = 0.0;
  double rho = 0.0;
  int slope_sign = 0;  // sign of d rho / dr
  bool zero_energy_leaf = true;
};

struct LimitRegion {
  double inner = 0.0;
  double outer = 1.0;
  bool contains_center = false;
};

struct LimitFoliation {
  double omega = 0.0;
  std::vector<LimitCircle> circles;  // ordered outward
  std::vector<LimitRegion> regions;  // circles.size() + 1 annuli
};

/// Circles rho = omega limiting the foliations with boundary conditions k_n
/// as k_n / n -> omega. Rejects sequences with |k_n/n - omega| > 2/sqrt(n)
/// for some n in [100, 1000].
LimitFoliation asymptotic_circles(const RadialProfile& profile, double omega,
                                  const std::function<long long(int)>& k_sequence);

/// Polyline of a rigid leaf (or a circle node) in the disk slice.
struct LeafTrace {
  int leaf = -1;  // -1 for circle nodes
  int node = -1;
  std::vector<DiskPoint> points;
  bool closed = false;
};

std::vector<LeafTrace> sketch_traces(const FoliationSketch& sketch, const OrbitDatabase& db, int samples = 32);
/// Independent closed loops formed by the traces; boundary endpoints are
/// never identified with each other.
int trace_loops(const std::vector<LeafTrace>& traces);

std::string to_string(Parity p);
std::string to_string(LeafKind k);

}  // namespace symdyn
