#pragma once

// Boundary and infinitesimal rotation numbers (in turns) and twist intervals.

#include "symdyn/orbits.hpp"

#include <string>
#include <vector>

namespace symdyn {

/// Open interval between two rotation numbers; empty when the ends agree to 1e-9.
struct TwistInterval {
  double lo = 0.0;
  double hi = 0.0;

  static TwistInterval between(double a, double b);
  bool empty() const { return !(hi - lo > 1e-9); }
  bool contains(double x) const { return !empty() && lo < x && x < hi; }
};

/// Integers strictly inside the interval.
std::vector<int> integers_in(const TwistInterval& tw);

struct BoundaryRotation {
  double value = 0.0;
  double lo = 0.0;  // rigorous bracket
  double hi = 0.0;
  bool exact = false;
  bool low_precision = false;
  int iterations = 0;
};

/// Rot of psi^n on the boundary: closed form for rotations and twists, else
/// (fbar^m(s) - s)/m with doubling m <= 1e4 and Richardson stopping at 1e-9.
BoundaryRotation boundary_rotation_data(const MappingTorus& torus, int n);
double boundary_rotation(const MappingTorus& torus, int n);

struct InfinitesimalRotation {
  double value = 0.0;
  double winding_estimate = 0.0;  // mean direction winding over K periods / K
  std::optional<double> index_estimate;  // mu(gamma^K) / (2K), nondegenerate only
  int K = 200;
};

/// Throws InputError for boundary records and ConsistencyError when the two
/// estimators differ by more than 1/K + 1e-6.
InfinitesimalRotation infinitesimal_rotation_data(const MappingTorus& torus, const PeriodicOrbitRecord& record,
                                                  int K = 200);
double infinitesimal_rotation(const MappingTorus& torus, const PeriodicOrbitRecord& record, int K = 200);

TwistInterval twist_interval(const MappingTorus& torus, const PeriodicOrbitRecord& record);

/// floor(n alpha) / n.
double approximant(double alpha, int n);

struct OrbitRotation {
  std::string id;
  double rot = 0.0;
  TwistInterval twist;
  std::vector<int> integers;
};

struct RotationData {
  int n = 1;
  BoundaryRotation boundary;
  std::vector<OrbitRotation> orbits;
};

/// Rotation data for every interior record of a search.
RotationData rotation_data(const MappingTorus& torus, const OrbitSearchResult& search);

}  // namespace symdyn
