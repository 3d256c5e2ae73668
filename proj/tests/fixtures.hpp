#pragma once

#include "symdyn/orbits.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fixtures {

inline symdyn::DiskIsotopy perturbed_twist() {
  using namespace symdyn;
  return DiskIsotopy::composition(
      {DiskIsotopy::radial_twist(RadialProfile({0.0, 2.5})),
       DiskIsotopy::hamiltonian(HamiltonianSpec::make(Expression::parse("0.001*(1-r2)^2*(x^3-3*x*y^2)"), 5e-2))});
}

inline symdyn::MappingTorus perturbed_torus() { return symdyn::MappingTorus::make(perturbed_twist(), 1, 10.0); }

inline double golden() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// Search on the benchmark with a 24 x 48 grid, computed once per period.
inline const symdyn::OrbitSearchResult& perturbed_search(int n) {
  static std::map<int, symdyn::OrbitSearchResult> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    symdyn::SearchOptions o;
    o.radial = 24;
    o.angular = 48;
    it = cache.emplace(n, symdyn::find_periodic_points(perturbed_torus(), n, o)).first;
  }
  return it->second;
}

}  // namespace fixtures
