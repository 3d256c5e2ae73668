#include "symdyn/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace symdyn {

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

bool is_flat(const json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void write_value(std::string& out, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool inline_array = indent == 0 || is_flat(j);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_array ? ", " : ",";
        if (!inline_array) out += "\n" + pad;
        write_value(out, e, indent, depth + 1);
        first = false;
      }
      if (!inline_array) out += "\n" + close_pad;
      out += ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        if (indent > 0) out += "\n" + pad;
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write_value(out, it.value(), indent, depth + 1);
        first = false;
      }
      if (indent > 0) out += "\n" + close_pad;
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key);
}

json point(const DiskPoint& p) { return json::array({p.x(), p.y()}); }

DiskPoint point_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError(std::string(what) + " must be a pair of numbers");
  return DiskPoint(j[0].get<double>(), j[1].get<double>());
}

json interval(const TwistInterval& t) { return json::array({t.lo, t.hi}); }

TwistInterval interval_from(const json& j) {
  const DiskPoint p = point_from(j, "twist");
  return TwistInterval{p.x(), p.y()};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

EndSign sign_from(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "+") return EndSign::Positive;
  if (s == "-" || s == "−") return EndSign::Negative;
  throw InputError("leaf sign must be '+' or '-', got '" + s + "'");
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  write_value(out, j, indent, 0);
  out += '\n';
  return out;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

DiskIsotopy isotopy_from_json(const json& j) {
  const std::string family = get<std::string>(j, "family");
  if (family == "rigid_rotation") return DiskIsotopy::rigid_rotation(get<double>(j, "alpha"));
  if (family == "radial_twist")
    return DiskIsotopy::radial_twist(RadialProfile(get<std::vector<double>>(j, "rho_coeffs_r2")));
  if (family == "hamiltonian")
    return DiskIsotopy::hamiltonian(
        HamiltonianSpec::make(Expression::parse(get<std::string>(j, "H")), get_or<double>(j, "step", 1e-3)));
  if (family == "composition") {
    const json& maps = field(j, "maps");
    if (!maps.is_array()) throw InputError("'maps' must be an array");
    std::vector<DiskIsotopy> factors;
    for (const auto& m : maps) factors.push_back(isotopy_from_json(m));
    return DiskIsotopy::composition(std::move(factors));
  }
  if (family == "iterate") return DiskIsotopy::iterate(isotopy_from_json(field(j, "map")), get<int>(j, "n"));
  throw InputError("unknown map family '" + family + "'");
}

json to_json(const DiskIsotopy& iso) {
  switch (iso.kind()) {
    case DiskIsotopy::Kind::RigidRotation:
      return {{"family", "rigid_rotation"}, {"alpha", iso.alpha()}};
    case DiskIsotopy::Kind::RadialTwist:
      return {{"family", "radial_twist"}, {"rho_coeffs_r2", iso.profile().coefficients()}};
    case DiskIsotopy::Kind::Hamiltonian:
      return {{"family", "hamiltonian"}, {"H", iso.hamiltonian_spec().H.source()}, {"step", iso.hamiltonian_spec().step}};
    case DiskIsotopy::Kind::Composition: {
      json maps = json::array();
      for (const auto& f : iso.factors()) maps.push_back(to_json(f));
      return {{"family", "composition"}, {"maps", maps}};
    }
    case DiskIsotopy::Kind::Iterate:
      return {{"family", "iterate"}, {"map", to_json(*iso.parts().front())}, {"n", iso.iterate_count()}};
  }
  throw ConsistencyError("unknown isotopy kind");
}

MappingTorus torus_from_json(const json& j) {
  return MappingTorus::make(isotopy_from_json(j), 1, get_or<double>(j, "action_constant", 10.0));
}

MappingTorus load_map(const std::filesystem::path& path) { return torus_from_json(read_json_file(path)); }

json to_json(const PeriodicOrbitRecord& r) {
  json pts = json::array();
  for (const auto& p : r.orbit_points) pts.push_back(point(p));
  return {{"id", r.id},
          {"base", point(r.base)},
          {"minimal_period", r.minimal_period},
          {"ambient_period", r.ambient_period},
          {"monodromy", json::array({json::array({r.monodromy(0, 0), r.monodromy(0, 1)}),
                                     json::array({r.monodromy(1, 0), r.monodromy(1, 1)})})},
          {"stability", to_string(r.stability)},
          {"cz", optional_json(r.cz)},
          {"action", optional_json(r.action)},
          {"residual", r.residual},
          {"boundary", r.boundary},
          {"orbit_points", pts}};
}

PeriodicOrbitRecord record_from_json(const json& j) {
  PeriodicOrbitRecord r;
  r.id = get<std::string>(j, "id");
  r.base = point_from(field(j, "base"), "base");
  r.minimal_period = get<int>(j, "minimal_period");
  r.ambient_period = get_or<int>(j, "ambient_period", r.minimal_period);
  if (j.contains("monodromy")) {
    const json& m = j.at("monodromy");
    if (!m.is_array() || m.size() != 2) throw InputError("monodromy must be a 2x2 array");
    const DiskPoint r0 = point_from(m[0], "monodromy row"), r1 = point_from(m[1], "monodromy row");
    r.monodromy << r0.x(), r0.y(), r1.x(), r1.y();
  }
  r.stability = stability_from_string(get<std::string>(j, "stability"));
  r.cz = get_opt<int>(j, "cz");
  r.action = get_opt<double>(j, "action");
  r.residual = get_or<double>(j, "residual", 0.0);
  r.boundary = get_or<bool>(j, "boundary", false);
  if (j.contains("orbit_points"))
    for (const auto& p : j.at("orbit_points")) r.orbit_points.push_back(point_from(p, "orbit point"));
  return r;
}

json to_json(const FixedCircle& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(point(p));
  return {{"id", c.id},
          {"radius", c.radius},
          {"k", c.k},
          {"ambient_period", c.ambient_period},
          {"minimal_period", c.minimal_period},
          {"sample", point(c.sample)},
          {"spread", c.spread},
          {"deformed", c.deformed},
          {"boundary", c.boundary},
          {"points", pts}};
}

FixedCircle circle_from_json(const json& j) {
  FixedCircle c;
  c.id = get<std::string>(j, "id");
  c.radius = get<double>(j, "radius");
  c.k = get<int>(j, "k");
  c.ambient_period = get_or<int>(j, "ambient_period", 1);
  c.minimal_period = get_or<int>(j, "minimal_period", c.ambient_period);
  c.sample = j.contains("sample") ? point_from(j.at("sample"), "sample") : DiskPoint(c.radius, 0.0);
  c.spread = get_or<double>(j, "spread", 0.0);
  c.deformed = get_or<bool>(j, "deformed", false);
  c.boundary = get_or<bool>(j, "boundary", false);
  if (j.contains("points"))
    for (const auto& p : j.at("points")) c.points.push_back(point_from(p, "circle point"));
  return c;
}

json to_json(const OrbitDatabase& db) {
  json records = json::array(), circles = json::array(), links = json::array();
  for (const auto& r : db.records) {
    json e = to_json(r);
    if (auto it = db.twists.find(r.id); it != db.twists.end()) e["twist"] = interval(it->second);
    records.push_back(e);
  }
  for (const auto& c : db.circles) {
    json e = to_json(c);
    if (auto it = db.twists.find(c.id); it != db.twists.end()) e["twist"] = interval(it->second);
    if (auto it = db.shear.find(c.id); it != db.shear.end()) e["shear"] = it->second;
    if (auto it = db.circle_actions.find(c.id); it != db.circle_actions.end()) e["action"] = it->second;
    circles.push_back(e);
  }
  for (const auto& [key, lk] : db.links) links.push_back({{"a", key.first}, {"b", key.second}, {"lk", lk}});
  return {{"n", db.n},
          {"boundary_rot", db.boundary_rotation},
          {"longitude_action", db.longitude_action},
          {"meridian_action", db.meridian_action},
          {"records", records},
          {"circles", circles},
          {"links", links}};
}

OrbitDatabase orbit_database_from_json(const json& j) {
  OrbitDatabase db;
  db.n = get<int>(j, "n");
  db.boundary_rotation = get_or<double>(j, "boundary_rot", 0.0);
  db.longitude_action = get_or<double>(j, "longitude_action", 0.0);
  db.meridian_action = get_or<double>(j, "meridian_action", std::numbers::pi);
  for (const auto& e : get_or<json>(j, "records", json::array())) {
    db.records.push_back(record_from_json(e));
    if (e.contains("twist")) db.twists[db.records.back().id] = interval_from(e.at("twist"));
  }
  for (const auto& e : get_or<json>(j, "circles", json::array())) {
    db.circles.push_back(circle_from_json(e));
    const std::string& id = db.circles.back().id;
    if (e.contains("twist")) db.twists[id] = interval_from(e.at("twist"));
    if (auto s = get_opt<int>(e, "shear")) db.shear[id] = *s;
    if (auto a = get_opt<double>(e, "action")) db.circle_actions[id] = *a;
  }
  for (const auto& e : get_or<json>(j, "links", json::array()))
    db.set_link(get<std::string>(e, "a"), get<std::string>(e, "b"), get<int>(e, "lk"));
  return db;
}

json to_json(const SuspensionLoop& loop) {
  json samples = json::array();
  for (const auto& [t, p] : loop.samples) samples.push_back(json::array({t, p.x(), p.y()}));
  return {{"period", loop.period}, {"samples", samples}};
}

json to_json(const RotationData& data) {
  json orbits = json::array();
  for (const auto& o : data.orbits)
    orbits.push_back({{"id", o.id}, {"rot", o.rot}, {"twist", interval(o.twist)}, {"integers", o.integers}});
  return {{"n", data.n},
          {"boundary_rot", data.boundary.value},
          {"boundary_bracket", json::array({data.boundary.lo, data.boundary.hi})},
          {"boundary_exact", data.boundary.exact},
          {"boundary_low_precision", data.boundary.low_precision},
          {"orbits", orbits}};
}

json to_json(const PBReport& r) {
  return {{"n", r.n},
          {"center_id", r.center_id},
          {"k", r.k},
          {"twist", interval(r.twist)},
          {"vacuous", r.vacuous},
          {"witnesses", r.witnesses},
          {"circle_witnesses", r.circle_witnesses},
          {"satisfied", r.satisfied}};
}

json to_json(const CensusReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"N", l.n},
                      {"mu", l.mu},
                      {"coprime_count", l.coprime},
                      {"bound_constant_times_N2", l.bound_times_n2},
                      {"new_orbits", l.new_orbits},
                      {"new_circles", l.new_circles}});
  return {{"N_max", r.N_max},
          {"a", r.a},
          {"b", r.b},
          {"bound_constant", r.bound_constant},
          {"circles_flagged", r.circles_flagged},
          {"levels", levels}};
}

std::string census_csv(const CensusReport& r) {
  std::string out = "N,mu,coprime_count,bound_constant_times_N2\n";
  for (const auto& l : r.levels) {
    out += std::to_string(l.n) + "," + std::to_string(l.mu) + "," + std::to_string(l.coprime) + ",";
    write_number(out, l.bound_times_n2);
    out += '\n';
  }
  return out;
}

json to_json(const FoliationSketch& s) {
  json nodes = json::array(), leaves = json::array();
  for (const auto& n : s.nodes) {
    json e = {{"ref", n.ref}, {"parity", to_string(n.parity)}};
    if (n.twist) e["twist"] = interval(*n.twist);
    if (n.action) e["action"] = *n.action;
    if (n.circle) e["circle"] = true;
    nodes.push_back(e);
  }
  for (const auto& l : s.leaves) {
    const json b = l.kind == LeafKind::HalfCylinder ? json("boundary") : json(l.b);
    leaves.push_back({{"kind", to_string(l.kind)},
                      {"ends", json::array({l.a, b})},
                      {"signs", json::array({l.sign_a == EndSign::Positive ? "+" : "-",
                                             l.sign_b == EndSign::Positive ? "+" : "-"})},
                      {"area", l.area}});
  }
  return {{"n", s.n},
          {"k", s.k},
          {"nodes", nodes},
          {"leaves", leaves},
          {"boundary", {{"L", s.longitude_action}, {"m", s.meridian_action}}}};
}

FoliationSketch sketch_from_json(const json& j) {
  FoliationSketch s;
  s.n = get<int>(j, "n");
  s.k = get<int>(j, "k");
  for (const auto& e : get<json>(j, "nodes")) {
    SpanningOrbitNode n;
    n.ref = get<std::string>(e, "ref");
    const std::string parity = get<std::string>(e, "parity");
    if (parity != "odd" && parity != "even") throw InputError("parity must be 'odd' or 'even'");
    n.parity = parity == "odd" ? Parity::Odd : Parity::Even;
    if (e.contains("twist") && !e.at("twist").is_null()) n.twist = interval_from(e.at("twist"));
    n.action = get_opt<double>(e, "action");
    n.circle = get_or<bool>(e, "circle", false);
    s.nodes.push_back(n);
  }
  for (const auto& e : get<json>(j, "leaves")) {
    Leaf l;
    const std::string kind = get<std::string>(e, "kind");
    if (kind == "half_cylinder") l.kind = LeafKind::HalfCylinder;
    else if (kind == "cylinder") l.kind = LeafKind::Cylinder;
    else throw InputError("unknown leaf kind '" + kind + "'");
    const json& ends = field(e, "ends");
    const json& signs = field(e, "signs");
    if (!ends.is_array() || ends.size() != 2 || !signs.is_array() || signs.size() != 2)
      throw InputError("leaf needs two ends and two signs");
    try {
      l.a = ends[0].get<int>();
      l.b = ends[1].is_string() && ends[1].get<std::string>() == "boundary" ? kBoundaryEnd : ends[1].get<int>();
      l.sign_a = sign_from(signs[0]);
      l.sign_b = sign_from(signs[1]);
    } catch (const json::exception& ex) {
      throw InputError(std::string("leaf: ") + ex.what());
    }
    l.area = get<double>(e, "area");
    s.leaves.push_back(l);
  }
  if (j.contains("boundary")) {
    s.longitude_action = get<double>(j.at("boundary"), "L");
    s.meridian_action = get<double>(j.at("boundary"), "m");
  }
  return s;
}

json to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", std::string(1, c.id)}, {"name", c.name}, {"passed", c.passed}, {"evidence", c.evidence}});
  return {{"summary", r.summary()}, {"simple", r.simple}, {"valid", r.valid()}, {"checks", checks}};
}

json to_json(const LimitFoliation& lim) {
  json circles = json::array(), regions = json::array();
  for (const auto& c : lim.circles)
    circles.push_back({{"radius", c.radius},
                       {"rho", c.rho},
                       {"slope_sign", c.slope_sign},
                       {"zero_energy_leaf", c.zero_energy_leaf}});
  for (const auto& r : lim.regions)
    regions.push_back({{"inner", r.inner}, {"outer", r.outer}, {"contains_center", r.contains_center}});
  return {{"omega", lim.omega}, {"circles", circles}, {"regions", regions}};
}

SearchOptions RunConfig::search_options() const {
  SearchOptions o;
  o.radial = radial;
  o.angular = angular;
  o.tolerance = tolerances.newton;
  o.dedup_distance = tolerances.dedup;
  return o;
}

void RunConfig::check() const {
  if (n < 1) throw InputError("n must be positive");
  if (radial < 1 || angular < 1) throw InputError("grid sizes must be positive");
  if (!(tolerances.newton > 0) || !(tolerances.dedup > 0)) throw InputError("tolerances must be positive");
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  c.map_spec = get_or<std::string>(j, "map_spec", "");
  c.n = get_or<int>(j, "n", 1);
  if (j.contains("grid")) {
    const auto g = get<std::vector<int>>(j, "grid");
    if (g.size() != 2) throw InputError("grid must be [radial, angular]");
    c.radial = g[0];
    c.angular = g[1];
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    c.tolerances.newton = get_or<double>(t, "newton", c.tolerances.newton);
    c.tolerances.dedup = get_or<double>(t, "dedup", c.tolerances.dedup);
  }
  c.output_dir = get_or<std::string>(j, "output_dir", "");
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.check();
  return c;
}

json to_json(const RunConfig& c) {
  return {{"map_spec", c.map_spec},
          {"n", c.n},
          {"grid", json::array({c.radial, c.angular})},
          {"tolerances", {{"newton", c.tolerances.newton}, {"dedup", c.tolerances.dedup}}},
          {"output_dir", c.output_dir},
          {"seed", c.seed}};
}

}  // namespace symdyn
