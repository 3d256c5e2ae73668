#pragma once

// Poincare-Birkhoff witnesses, periodic-orbit censuses and the coprime
// lattice count behind the quadratic growth bound.

#include "symdyn/rotation.hpp"

#include <string>
#include <vector>

namespace symdyn {

struct PBReport {
  int n = 1;
  std::string center_id;
  int k = 0;
  TwistInterval twist;  // of the center at period n
  bool vacuous = false;  // k not strictly inside the twist interval
  std::vector<std::string> witnesses;  // isolated interior orbits with lk = k
  std::vector<std::string> circle_witnesses;  // flagged FixedCircle witnesses
  bool satisfied = false;
};

/// Searches fixed points of psi^n and collects those linking the center k times.
PBReport verify_pb(const MappingTorus& torus, const PeriodicOrbitRecord& center, int n, int k,
                   const SearchOptions& options = {});
/// Same, reusing an existing search at period n.
PBReport verify_pb(const MappingTorus& torus, const PeriodicOrbitRecord& center, int k,
                   const OrbitSearchResult& search);

/// Center of the disk map: the origin when psi fixes it, else the first
/// interior record of a period-1 search. Returned at period 1 with id "center".
PeriodicOrbitRecord default_center(const MappingTorus& torus, const SearchOptions& options = {});

/// |{(p, q) : q a < p < q b, 1 <= q <= N, gcd(p, q) = 1}|.
long long coprime_count(double a, double b, int N);
/// 3 |b - a| / pi^2.
double growth_bound(double a, double b);

struct CensusLevel {
  int n = 1;
  long long mu = 0;  // distinct orbits and circle families with minimal period <= n
  long long coprime = 0;
  double bound_times_n2 = 0.0;
  int new_orbits = 0;
  int new_circles = 0;
  SearchDiagnostics diagnostics;
};

struct CensusReport {
  int N_max = 1;
  double a = 0.0;
  double b = 0.0;
  double bound_constant = 0.0;
  bool circles_flagged = false;  // some count includes degenerate circle families
  std::vector<CensusLevel> levels;
};

/// Census over n = 1..N_max with (a, b) the center's twist interval at n = 1.
CensusReport census(const MappingTorus& torus, int N_max, const SearchOptions& options = {});
/// Census with an explicit interval for the lattice count.
CensusReport census(const MappingTorus& torus, int N_max, double a, double b, const SearchOptions& options = {});

}  // namespace symdyn
