#pragma once

// JSON / CSV persistence. Numbers are written with 17 significant digits so
// that records survive a round trip bit for bit.

#include "symdyn/foliation.hpp"
#include "symdyn/pb_harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace symdyn {

using json = nlohmann::json;

/// Serializes with %.17g numbers; object keys come out sorted.
std::string dump_json(const json& j, int indent = 2);
/// Parses text; syntax errors become InputError with the byte offset.
json parse_json(const std::string& text, const std::string& what = "input");
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Map specs: {"family": "radial_twist", "rho_coeffs_r2": [...]},
// {"family": "rigid_rotation", "alpha": a}, {"family": "hamiltonian", "H": "...", "step": h},
// {"family": "composition", "maps": [...]}, {"family": "iterate", "map": {...}, "n": k}.
// The top level may carry "action_constant".
DiskIsotopy isotopy_from_json(const json& j);
json to_json(const DiskIsotopy& iso);
MappingTorus torus_from_json(const json& j);
MappingTorus load_map(const std::filesystem::path& path);

json to_json(const PeriodicOrbitRecord& r);
PeriodicOrbitRecord record_from_json(const json& j);
json to_json(const FixedCircle& c);
FixedCircle circle_from_json(const json& j);
json to_json(const OrbitDatabase& db);
OrbitDatabase orbit_database_from_json(const json& j);

json to_json(const SuspensionLoop& loop);
json to_json(const RotationData& data);
json to_json(const PBReport& report);
json to_json(const CensusReport& report);
/// Columns N, mu, coprime_count, bound_constant_times_N2.
std::string census_csv(const CensusReport& report);

json to_json(const FoliationSketch& sketch);
FoliationSketch sketch_from_json(const json& j);
json to_json(const ValidationReport& report);
json to_json(const LimitFoliation& lim);

struct Tolerances {
  double newton = 1e-12;
  double dedup = 1e-6;
};

struct RunConfig {
  std::string map_spec;
  int n = 1;
  int radial = 48;
  int angular = 96;
  Tolerances tolerances;
  std::string output_dir;
  std::uint64_t seed = 1;

  SearchOptions search_options() const;
  /// Throws InputError on non-positive grids, periods or tolerances.
  void check() const;
};

RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& cfg);

}  // namespace symdyn
