#include "symdyn/orbit_db.hpp"

#include <cmath>

namespace symdyn {

namespace {

std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

const PeriodicOrbitRecord* OrbitDatabase::find_record(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

const FixedCircle* OrbitDatabase::find_circle(const std::string& id) const {
  for (const auto& c : circles)
    if (c.id == id) return &c;
  return nullptr;
}

DiskPoint OrbitDatabase::position(const std::string& id) const {
  if (const auto* r = find_record(id)) return r->base;
  if (const auto* c = find_circle(id)) return c->sample;
  throw InputError("unknown orbit reference '" + id + "'");
}

bool OrbitDatabase::degenerate(const std::string& id) const {
  if (const auto* r = find_record(id)) return r->stability == Stability::Degenerate;
  if (find_circle(id)) return true;
  throw InputError("unknown orbit reference '" + id + "'");
}

std::optional<double> OrbitDatabase::action(const std::string& id) const {
  if (const auto* r = find_record(id)) return r->action;
  if (auto it = circle_actions.find(id); it != circle_actions.end()) return it->second;
  return std::nullopt;
}

std::optional<int> OrbitDatabase::link(const std::string& a, const std::string& b) const {
  auto it = links.find(key(a, b));
  if (it == links.end()) return std::nullopt;
  return it->second;
}

void OrbitDatabase::set_link(const std::string& a, const std::string& b, int value) { links[key(a, b)] = value; }

OrbitDatabase make_orbit_database(const MappingTorus& torus, const OrbitSearchResult& search) {
  const int n = search.n;
  OrbitDatabase db;
  db.n = n;
  db.records = search.records;
  db.circles = search.circles;
  db.longitude_action = torus.action_constant * n;

  const RotationData rot = rotation_data(torus, search);
  db.boundary_rotation = rot.boundary.value;
  for (const auto& o : rot.orbits) db.twists[o.id] = o.twist;

  std::vector<std::pair<std::string, DiskPoint>> interior;
  for (const auto& r : db.records)
    if (!r.boundary) interior.emplace_back(r.id, r.base);
  for (const auto& c : db.circles) {
    if (c.boundary) continue;
    interior.emplace_back(c.id, c.sample);
    db.twists[c.id] = TwistInterval::between(c.k, db.boundary_rotation);
    const Matrix2 M = make_record(torus, c.sample, n).monodromy;
    const DiskPoint er = c.sample.normalized();
    const DiskPoint et(-er.y(), er.x());
    const double s = et.dot(M * er);
    db.shear[c.id] = s > 0 ? 1 : (s < 0 ? -1 : 0);
    if (auto a = try_action(torus, c.sample, n)) db.circle_actions[c.id] = *a;
  }
  for (std::size_t i = 0; i < interior.size(); ++i)
    for (std::size_t j = i + 1; j < interior.size(); ++j)
      db.set_link(interior[i].first, interior[j].first,
                  linking_number(torus, interior[i].second, interior[j].second, n));
  return db;
}

}  // namespace symdyn
