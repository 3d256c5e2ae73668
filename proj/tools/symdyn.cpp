// symdyn command line: periodic orbits, rotation data, Poincare-Birkhoff
// checks, censuses and foliation sketches for area-preserving disk maps.
//
// Exit status: 0 success, 1 usage or input error, 2 mathematical invalidation.

#include "symdyn/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

using namespace symdyn;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string map;
  int n = 0;
  std::vector<int> grid;
  double newton = 0.0;
  double dedup = 0.0;
  std::string out;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, Common& c, bool with_map = true) {
  cmd->add_option("--config", c.config, "RunConfig JSON file");
  if (with_map) cmd->add_option("--map", c.map, "map spec JSON file");
  cmd->add_option("--n", c.n, "ambient period");
  cmd->add_option("--grid", c.grid, "seed grid: radial angular")->expected(2);
  cmd->add_option("--newton-tol", c.newton, "Newton residual tolerance");
  cmd->add_option("--dedup", c.dedup, "fixed point merge distance");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "seed for randomized sampling");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = run_config_from_json(read_json_file(c.config));
  if (!c.map.empty()) cfg.map_spec = c.map;
  if (c.n != 0) cfg.n = c.n;
  if (c.grid.size() == 2) {
    cfg.radial = c.grid[0];
    cfg.angular = c.grid[1];
  }
  if (c.newton != 0.0) cfg.tolerances.newton = c.newton;
  if (c.dedup != 0.0) cfg.tolerances.dedup = c.dedup;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  cfg.check();
  return cfg;
}

MappingTorus map_of(const RunConfig& cfg) {
  if (cfg.map_spec.empty()) throw InputError("no map spec given (--map or config map_spec)");
  return load_map(cfg.map_spec);
}

RadialProfile twist_profile(const MappingTorus& torus) {
  auto p = torus.iso.total_twist();
  if (!p) throw InputError("this command needs a map built from rotations and radial twists only");
  return *p;
}

// Prints `text` and stores it as output_dir/name when an output directory is set.
void emit(const RunConfig& cfg, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!cfg.output_dir.empty()) write_text_file(fs::path(cfg.output_dir) / name, text);
}

void store(const RunConfig& cfg, const std::string& name, const std::string& text) {
  if (!cfg.output_dir.empty()) write_text_file(fs::path(cfg.output_dir) / name, text);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int plotdata(const RunConfig& cfg, const std::string& orbits_path, const std::string& sketch_path, int seeds,
             int iterations, bool svg) {
  if (cfg.output_dir.empty()) throw InputError("plotdata needs --out");
  if (seeds < 1 || iterations < 1) throw InputError("seeds and iterations must be positive");
  const MappingTorus torus = map_of(cfg);
  const fs::path dir(cfg.output_dir);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::string portrait = "x,y,orbit_id\n";
  std::vector<DiskPoint> cloud;
  long long rows = 0;
  for (int i = 0; i < seeds; ++i) {
    const double r = (i + 0.5) / seeds;
    const double a = angle(rng);
    DiskPoint p(r * std::cos(a), r * std::sin(a));
    const std::string id = "p" + std::to_string(i);
    for (int j = 0; j < iterations; ++j) {
      portrait += num(p.x()) + "," + num(p.y()) + "," + id + "\n";
      cloud.push_back(p);
      ++rows;
      p = torus.iso.evaluate(1.0, p);
    }
  }
  write_text_file(dir / "portrait.csv", portrait);

  json summary = {{"portrait_rows", rows}};
  std::vector<std::pair<DiskPoint, std::string>> marks;
  if (!orbits_path.empty()) {
    const OrbitDatabase db = orbit_database_from_json(read_json_file(orbits_path));
    std::string fixed = "x,y,orbit_id,stability,cz,parity\n";
    for (const auto& r : db.records)
      for (const auto& p : r.orbit_points.empty() ? std::vector<DiskPoint>{r.base} : r.orbit_points) {
        const std::string parity =
            r.stability == Stability::Degenerate ? "degenerate" : (odd_parity(r.stability) ? "odd" : "even");
        fixed += num(p.x()) + "," + num(p.y()) + "," + r.id + "," + to_string(r.stability) + "," +
                 (r.cz ? std::to_string(*r.cz) : "") + "," + parity + "\n";
        marks.emplace_back(p, parity);
      }
    write_text_file(dir / "fixed_points.csv", fixed);
    std::string circles = "x,y,circle_id\n";
    for (const auto& c : db.circles)
      for (int j = 0; j < 256; ++j) {
        const double a = kTwoPi * j / 256;
        circles += num(c.radius * std::cos(a)) + "," + num(c.radius * std::sin(a)) + "," + c.id + "\n";
      }
    write_text_file(dir / "circles.csv", circles);
    summary["fixed_points"] = marks.size();

    if (!sketch_path.empty()) {
      const FoliationSketch sketch = sketch_from_json(read_json_file(sketch_path));
      const auto traces = sketch_traces(sketch, db);
      std::string out = "trace,leaf,node,seq,x,y,closed\n";
      for (std::size_t t = 0; t < traces.size(); ++t)
        for (std::size_t s = 0; s < traces[t].points.size(); ++s)
          out += std::to_string(t) + "," + std::to_string(traces[t].leaf) + "," + std::to_string(traces[t].node) +
                 "," + std::to_string(s) + "," + num(traces[t].points[s].x()) + "," + num(traces[t].points[s].y()) +
                 "," + (traces[t].closed ? "1" : "0") + "\n";
      write_text_file(dir / "traces.csv", out);
      summary["traces"] = traces.size();
      summary["trace_loops"] = trace_loops(traces);
    }
  } else if (!sketch_path.empty()) {
    throw InputError("sketch traces need --orbits");
  }

  if (svg) {
    std::string s =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"800\" height=\"800\">\n"
        "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\"/>\n";
    char buf[160];
    for (const auto& p : cloud) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.5f\" cy=\"%.5f\" r=\"0.002\" fill=\"#555\"/>\n", p.x(), -p.y());
      s += buf;
    }
    for (const auto& [p, parity] : marks) {
      const char* color = parity == "odd" ? "#d62728" : (parity == "even" ? "#1f77b4" : "#999");
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.5f\" cy=\"%.5f\" r=\"0.012\" fill=\"%s\"/>\n", p.x(), -p.y(),
                    color);
      s += buf;
    }
    s += "</svg>\n";
    write_text_file(dir / "portrait.svg", s);
  }
  std::cout << dump_json(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic orbits, rotation numbers and foliation sketches of area-preserving disk maps"};
  app.require_subcommand(1);

  Common common;
  int k = 0, N = 0;
  double a = 0.0, b = 0.0, omega = 0.0;
  bool has_ab = false, allow_k_zero = false, svg = false;
  std::string sketch_path, orbits_path;
  int seeds = 40, iterations = 256;

  auto* orbits = app.add_subcommand("orbits", "periodic orbits of psi^n as an orbit database");
  add_common(orbits, common);

  auto* rotation = app.add_subcommand("rotation", "boundary and infinitesimal rotation numbers");
  add_common(rotation, common);

  auto* pb = app.add_subcommand("pb", "Poincare-Birkhoff witnesses about the center");
  add_common(pb, common);
  pb->add_option("--k", k, "linking number with the center")->required();

  auto* cen = app.add_subcommand("census", "orbit counts against the coprime lattice count");
  add_common(cen, common);
  cen->add_option("--N", N, "largest period")->required();
  auto* opt_a = cen->add_option("--a", a, "lower end of the lattice interval");
  cen->add_option("--b", b, "upper end of the lattice interval")->needs(opt_a);

  auto* cop = app.add_subcommand("coprime", "coprime lattice count");
  cop->add_option("--a", a)->required();
  cop->add_option("--b", b)->required();
  cop->add_option("--N", N)->required();

  auto* fol = app.add_subcommand("foliation", "foliation sketches");
  fol->require_subcommand(1);
  auto* fval = fol->add_subcommand("validate", "validate a sketch against an orbit database");
  add_common(fval, common, false);
  fval->add_option("--sketch", sketch_path, "sketch JSON")->required();
  fval->add_option("--orbits", orbits_path, "orbit database JSON")->required();
  auto* fsk = fol->add_subcommand("sketch", "foliation sketch of an integrable twist map");
  add_common(fsk, common);
  fsk->add_option("--k", k, "boundary condition")->required();
  fsk->add_flag("--allow-k-zero", allow_k_zero, "accept k = 0");

  auto* circ = app.add_subcommand("circles", "limit circles rho = omega of an integrable twist map");
  add_common(circ, common);
  circ->add_option("--omega", omega, "limit of k_n / n")->required();

  auto* plot = app.add_subcommand("plotdata", "CSV point sets for plotting");
  add_common(plot, common);
  plot->add_option("--orbits", orbits_path, "orbit database JSON");
  plot->add_option("--sketch", sketch_path, "sketch JSON for leaf traces");
  plot->add_option("--seeds", seeds, "portrait seed count");
  plot->add_option("--iterations", iterations, "iterations per seed");
  plot->add_flag("--svg", svg, "also write portrait.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  has_ab = opt_a->count() > 0;

  try {
    if (*cop) {
      std::cout << coprime_count(a, b, N) << "\n";
      return 0;
    }
    const RunConfig cfg = resolve(common);
    if (*orbits) {
      const MappingTorus torus = map_of(cfg);
      const auto search = find_periodic_points(torus, cfg.n, cfg.search_options());
      emit(cfg, "orbits.json", dump_json(to_json(make_orbit_database(torus, search))));
      return 0;
    }
    if (*rotation) {
      const MappingTorus torus = map_of(cfg);
      const auto search = find_periodic_points(torus, cfg.n, cfg.search_options());
      emit(cfg, "rotation.json", dump_json(to_json(rotation_data(torus, search))));
      return 0;
    }
    if (*pb) {
      const MappingTorus torus = map_of(cfg);
      const auto center = default_center(torus, cfg.search_options());
      const PBReport r = verify_pb(torus, center, cfg.n, k, cfg.search_options());
      emit(cfg, "pb.json", dump_json(to_json(r)));
      return !r.vacuous && !r.satisfied ? 2 : 0;
    }
    if (*cen) {
      const MappingTorus torus = map_of(cfg);
      const CensusReport r =
          has_ab ? census(torus, N, a, b, cfg.search_options()) : census(torus, N, cfg.search_options());
      emit(cfg, "census.csv", census_csv(r));
      store(cfg, "census.json", dump_json(to_json(r)));
      return 0;
    }
    if (*fval) {
      const FoliationSketch sketch = sketch_from_json(read_json_file(sketch_path));
      const OrbitDatabase db = orbit_database_from_json(read_json_file(orbits_path));
      ValidationReport r;
      try {
        r = validate(sketch, db);
      } catch (const ConsistencyError& e) {
        std::cerr << "symdyn: " << e.what() << "\n";
        return 2;
      }
      emit(cfg, "validation.json", dump_json(to_json(r)));
      std::cerr << r.summary() << "\n";
      return r.valid() ? 0 : 2;
    }
    if (*fsk) {
      const MappingTorus torus = map_of(cfg);
      const RadialProfile rho = twist_profile(torus);
      const FoliationSketch s = build_integrable_sketch(rho, cfg.n, k, allow_k_zero, torus.action_constant);
      emit(cfg, "sketch.json", dump_json(to_json(s)));
      store(cfg, "orbits.json", dump_json(to_json(integrable_database(rho, cfg.n, k, torus.action_constant))));
      return 0;
    }
    if (*circ) {
      const RadialProfile rho = twist_profile(map_of(cfg));
      const auto lim = asymptotic_circles(rho, omega, [omega](int n) {
        return static_cast<long long>(std::floor(omega * n));
      });
      emit(cfg, "circles.json", dump_json(to_json(lim)));
      return 0;
    }
    if (*plot) return plotdata(cfg, orbits_path, sketch_path, seeds, iterations, svg);
  } catch (const InputError& e) {
    std::cerr << "symdyn: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "symdyn: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
