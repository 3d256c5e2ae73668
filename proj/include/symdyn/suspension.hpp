#pragma once

// Mapping-torus bookkeeping: the flow psi_t over t in [0, n], winding numbers
// along it, the canonical boundary lift and the action functional.

#include "symdyn/core_maps.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace symdyn {

inline constexpr double kCollisionDistance = 1e-10;

struct MappingTorus {
  DiskIsotopy iso;
  int n = 1;
  double action_constant = 10.0;

  /// Throws InputError if n < 1, c <= 0, or c <= 2 max|H| + 1 for families with Hamiltonian factors.
  static MappingTorus make(DiskIsotopy iso, int n = 1, double action_constant = 10.0);
  MappingTorus with_period(int m) const;
};

/// Visits (t, psi_t(p), D psi_t(p)) for t in [0, periods] on the family's
/// sweep grid, one unit interval at a time.
void sweep_periods(const DiskIsotopy& iso, const DiskPoint& p, int periods, int resolution,
                   const DiskIsotopy::Visitor& visit);

/// Resolution making the sweep spacing at most `max_dt`.
int resolution_for(const DiskIsotopy& iso, double max_dt);

struct SuspensionLoop {
  DiskPoint base;
  int period = 1;
  std::vector<std::pair<double, DiskPoint>> samples;
};

/// Samples t -> psi_t(base) on [0, period] with spacing <= 1e-2. Throws
/// InputError unless psi_period(base) = base within 1e-8.
SuspensionLoop make_loop(const MappingTorus& torus, const DiskPoint& base, int period);

/// Continuous angle bookkeeping for a sequence of nonzero vectors.
class TurnCounter {
 public:
  /// Adds the next vector; throws NumericalError on a (near) zero vector.
  void push(const DiskPoint& v);
  /// Accumulated turns since the first vector.
  double turns() const { return radians_ / kTwoPi; }
  /// Largest single angular step seen (radians).
  double max_step() const { return max_step_; }

 private:
  bool started_ = false;
  DiskPoint last_ = DiskPoint::Zero();
  double radians_ = 0.0;
  double max_step_ = 0.0;
};

/// Total winding of a closed loop of nonzero vectors, sampled uniformly on
/// [t0, t1] and refined where an angular step exceeds pi/2.
int winding_number(const std::function<DiskPoint(double)>& loop_fn, double t0, double t1, int samples = 256);
/// The loop is taken over [0, torus.n].
int winding_number(const MappingTorus& torus, const std::function<DiskPoint(double)>& loop_fn);

/// Canonical lift of psi^n restricted to the boundary, in turns.
std::function<double(double)> boundary_lift(const MappingTorus& torus);

/// Action c * period + loop integral (see README). Throws InputError for
/// families mixing Hamiltonian and twist/rotation factors.
double action(const MappingTorus& torus, const SuspensionLoop& orbit);
/// Same quantity from the base point alone.
double action_at(const MappingTorus& torus, const DiskPoint& base, int period);
/// Action when the model supports the family, nullopt otherwise.
std::optional<double> try_action(const MappingTorus& torus, const DiskPoint& base, int period);

}  // namespace symdyn
