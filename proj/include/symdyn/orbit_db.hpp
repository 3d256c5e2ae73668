#pragma once

// Periodic orbits of psi^n together with the pairwise linking numbers,
// twist intervals and actions a foliation sketch refers to.

#include "symdyn/rotation.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symdyn {

struct OrbitDatabase {
  int n = 1;
  double boundary_rotation = 0.0;  // Rot of psi^n on the boundary
  double longitude_action = 0.0;   // c n
  double meridian_action = std::numbers::pi;
  std::vector<PeriodicOrbitRecord> records;
  std::vector<FixedCircle> circles;
  std::map<std::string, TwistInterval> twists;
  /// Sign of e_theta . D psi^n e_r at a circle sample (the radial shear).
  std::map<std::string, int> shear;
  std::map<std::string, double> circle_actions;
  /// Keyed by (min id, max id).
  std::map<std::pair<std::string, std::string>, int> links;

  const PeriodicOrbitRecord* find_record(const std::string& id) const;
  const FixedCircle* find_circle(const std::string& id) const;
  bool contains(const std::string& id) const { return find_record(id) || find_circle(id); }
  /// Interior point standing for the orbit (record base or circle sample).
  DiskPoint position(const std::string& id) const;
  bool degenerate(const std::string& id) const;
  std::optional<double> action(const std::string& id) const;
  std::optional<int> link(const std::string& a, const std::string& b) const;
  void set_link(const std::string& a, const std::string& b, int value);
};

/// Links all pairs of interior records and circles, and attaches rotation
/// data and actions. `torus` is the period-1 torus.
OrbitDatabase make_orbit_database(const MappingTorus& torus, const OrbitSearchResult& search);

}  // namespace symdyn
