#pragma once

// Area-preserving disk maps realized as isotopies psi_t, t in [0,1], from the
// identity. Times t > 1 follow psi_{t+1} = psi_t o psi_1.

#include "symdyn/expression.hpp"
#include "symdyn/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace symdyn {

/// Rotation number (turns) as a polynomial in s = r^2.
class RadialProfile {
 public:
  RadialProfile() = default;
  explicit RadialProfile(std::vector<double> coeffs_r2);

  const std::vector<double>& coefficients() const { return coeffs_; }

  template <typename Scalar>
  Scalar at_s(const Scalar& s) const {
    Scalar acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + Scalar(*it);
    return acc;
  }
  /// d rho / ds.
  double slope_s(double s) const;
  double operator()(double r) const { return at_s(r * r); }
  double center() const { return at_s(0.0); }
  double boundary() const { return at_s(1.0); }

  /// Sampled sup of |rho| and |d rho/ds| over s in [0,1].
  double max_abs() const { return max_abs_; }
  double max_abs_slope() const { return max_abs_slope_; }

  RadialProfile scaled(double factor) const;
  RadialProfile plus(const RadialProfile& other) const;

 private:
  std::vector<double> coeffs_;
  double max_abs_ = 0.0;
  double max_abs_slope_ = 0.0;
};

/// Autonomous Hamiltonian integrated by the implicit midpoint rule.
struct HamiltonianSpec {
  Expression H;
  double step = 1e-3;

  /// Throws InputError unless H is constant on the boundary circle
  /// (256 samples, deviation < 1e-9) and step lies in (0, 1].
  static HamiltonianSpec make(Expression H, double step = 1e-3);
};

struct FlowSample {
  DiskPoint point;
  Matrix2 jacobian;
};

/// One implicit midpoint step of X_H = J grad H; `jacobian` is the exact
/// derivative of the discrete step (a Cayley transform, det = 1).
FlowSample midpoint_step(const Expression& H, const DiskPoint& z, double h);

class DiskIsotopy {
 public:
  enum class Kind { RigidRotation, RadialTwist, Hamiltonian, Composition, Iterate };

  static DiskIsotopy rigid_rotation(double alpha);
  static DiskIsotopy radial_twist(RadialProfile profile);
  static DiskIsotopy hamiltonian(HamiltonianSpec spec);
  /// Composition({A, B}) has time-one map B o A.
  static DiskIsotopy composition(std::vector<DiskIsotopy> factors);
  static DiskIsotopy iterate(DiskIsotopy base, int n);

  Kind kind() const;
  double alpha() const;
  const RadialProfile& profile() const;
  const HamiltonianSpec& hamiltonian_spec() const;
  const std::vector<DiskIsotopy>& factors() const;
  int iterate_count() const;
  /// Factors in application order: composition factors, or n copies of an iterate's base.
  std::vector<const DiskIsotopy*> parts() const;

  /// psi_t(p) and D psi_t(p); t >= 0 with the extended convention.
  FlowSample flow(double t, const DiskPoint& p) const;
  DiskPoint evaluate(double t, const DiskPoint& p) const { return flow(t, p).point; }
  Matrix2 jacobian(double t, const DiskPoint& p) const { return flow(t, p).jacobian; }

  /// Time-one map with its derivative.
  FlowSample step(const DiskPoint& p) const;

  using Visitor = std::function<void(double t, const DiskPoint& point, const Matrix2& jacobian)>;
  /// Visits (t, psi_t(p), D psi_t(p)) on a grid of [0,1] that depends only on
  /// the family and `resolution` (>= 1), never on p. Starts with (0, p, I).
  void sweep(const DiskPoint& p, int resolution, const Visitor& visit) const;
  /// Number of grid intervals `sweep` uses per unit time.
  int grid_size(int resolution) const;

  /// Boundary rotation number of psi when every factor rotates the boundary rigidly.
  std::optional<double> boundary_rotation_closed_form() const;
  /// Total radial twist when the family is built only from rotations and twists.
  std::optional<RadialProfile> total_twist() const;
  /// True when every primitive factor is Hamiltonian.
  bool is_pure_hamiltonian() const;
  /// Sampled sup |H| over the disk over Hamiltonian factors (0 if none).
  double max_abs_hamiltonian() const;

  /// One period of the loop action integral  int (1/2)(x dy - y dx) - H ds
  /// for pure Hamiltonian families; returns the endpoint too.
  std::pair<double, DiskPoint> hamiltonian_action_period(const DiskPoint& p) const;

  struct Node;

 private:
  explicit DiskIsotopy(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Free-function forms of the core operations.
inline DiskPoint evaluate(const DiskIsotopy& iso, double t, const DiskPoint& p) {
  return iso.evaluate(t, p);
}
inline Matrix2 jacobian(const DiskIsotopy& iso, double t, const DiskPoint& p) {
  return iso.jacobian(t, p);
}
std::function<DiskPoint(const DiskPoint&)> time_one_map(const DiskIsotopy& iso);

}  // namespace symdyn
