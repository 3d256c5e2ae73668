#pragma once

// Periodic orbits of psi^n: search, classification, Conley-Zehnder indices
// and linking numbers.

#include "symdyn/suspension.hpp"

#include <optional>
#include <string>
#include <vector>

namespace symdyn {

enum class Stability { Elliptic, HyperbolicPositive, HyperbolicNegative, Degenerate };

inline constexpr double kDegenerateTraceBand = 1e-8;

/// Trace test with the degenerate band |trace| = 2 +- 1e-8.
Stability classify(const Matrix2& monodromy);
std::string to_string(Stability s);
/// Throws InputError for unknown names.
Stability stability_from_string(const std::string& name);
/// Odd for elliptic / negative hyperbolic, even for positive hyperbolic.
bool odd_parity(Stability s);

struct PeriodicOrbitRecord {
  std::string id;
  DiskPoint base = DiskPoint::Zero();
  int minimal_period = 1;
  int ambient_period = 1;
  Matrix2 monodromy = Matrix2::Identity();
  Stability stability = Stability::Degenerate;
  std::optional<int> cz;  // nullopt for degenerate records
  std::optional<double> action;
  double residual = 0.0;
  bool boundary = false;
  /// base, psi(base), ..., psi^{d-1}(base) for d = minimal_period.
  std::vector<DiskPoint> orbit_points;
};

/// A circle (possibly slightly deformed) of non-isolated fixed points of psi^n.
struct FixedCircle {
  std::string id;
  double radius = 0.0;
  int k = 0;  // winding of psi_t(p) about the disk center over [0, n]
  int ambient_period = 1;
  int minimal_period = 1;
  DiskPoint sample = DiskPoint::Zero();
  double spread = 0.0;  // max - min radius over the cluster
  bool deformed = false;
  bool boundary = false;
  std::vector<DiskPoint> points;  // kept only for deformed circles
};

struct SearchOptions {
  int radial = 48;
  int angular = 96;
  int boundary_seeds = 32;
  int max_iterations = 60;
  int max_halvings = 8;
  double tolerance = 1e-12;
  double dedup_distance = 1e-6;
  /// 0: hardware concurrency, capped by SYMDYN_THREADS.
  int threads = 0;
};

struct SearchDiagnostics {
  int seeds = 0;
  int converged = 0;
  int diverged = 0;
  int singular = 0;  // converged with degenerate monodromy
  int boundary_hits = 0;
  int distinct_points = 0;
};

struct OrbitSearchResult {
  int n = 1;
  std::vector<PeriodicOrbitRecord> records;  // interior first, then boundary records
  std::vector<FixedCircle> circles;
  SearchDiagnostics diagnostics;

  const PeriodicOrbitRecord* find_record(const std::string& id) const;
  const FixedCircle* find_circle(const std::string& id) const;
};

/// Fixed points of psi^n grouped into psi-orbits, plus circles of fixed points.
OrbitSearchResult find_periodic_points(const MappingTorus& torus, int n, const SearchOptions& options = {});

/// Record for the point `base` as a fixed point of psi^n (no search).
PeriodicOrbitRecord make_record(const MappingTorus& torus, const DiskPoint& base, int n);

/// The same orbit viewed as a fixed point of psi^{k n}.
PeriodicOrbitRecord iterate_record(const PeriodicOrbitRecord& record, int k);

/// Winding statistics, in turns, of Phi_t v over t in [0, k n] for 64
/// directions v plus real eigenvectors of the monodromy.
struct WindingInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
};

/// Sampled linearized path Phi_t = D psi_t(base) over one ambient period.
struct LinearizedPath {
  std::vector<Matrix2> samples;  // samples.front() = I, samples.back() = monodromy
};

LinearizedPath linearized_path(const MappingTorus& torus, const PeriodicOrbitRecord& record, int resolution = 1);
/// Windings of the k-fold iterated path; throws NumericalError if a direction
/// turns by more than pi/2 between samples.
WindingInterval winding_interval(const LinearizedPath& path, int k = 1);
/// Same, resampling the path until every step is below pi/2.
WindingInterval winding_interval(const MappingTorus& torus, const PeriodicOrbitRecord& record, int k = 1);

/// Index from a winding interval: 2m if it contains the integer m, else
/// 2 floor(lo) + 1. Throws ConsistencyError when the interval is wider than 1/2.
int index_from_interval(const WindingInterval& w);
/// Index from an interval, checked against the parity of stability `s`
/// (ConsistencyError on mismatch); nullopt when `s` is degenerate.
std::optional<int> checked_index(const WindingInterval& w, Stability s);
/// Stability of the k-th power of a monodromy.
Stability iterate_stability(const Matrix2& monodromy, int k);
/// Conley-Zehnder index of a sampled symplectic path starting at I.
int conley_zehnder_index(const LinearizedPath& path);

/// nullopt for degenerate records. Enforces the stability parity rule.
std::optional<int> conley_zehnder(const MappingTorus& torus, const PeriodicOrbitRecord& record);
/// Index of the k-fold iterate; nullopt if the iterate is degenerate.
std::optional<int> conley_zehnder(const MappingTorus& torus, const PeriodicOrbitRecord& record, int k);

/// Winding of psi_t(a) - psi_t(b) over [0, n]; both must share ambient_period n.
int linking_number(const MappingTorus& torus, const PeriodicOrbitRecord& a, const PeriodicOrbitRecord& b);
/// Same for two base points, each a fixed point of psi^n.
int linking_number(const MappingTorus& torus, const DiskPoint& a, const DiskPoint& b, int n);
/// Winding of psi_t(p) about the disk center over [0, n].
int center_winding(const MappingTorus& torus, const DiskPoint& p, int n);

/// Number of worker threads: hardware concurrency capped by SYMDYN_THREADS.
int worker_threads(int requested = 0);

}  // namespace symdyn
