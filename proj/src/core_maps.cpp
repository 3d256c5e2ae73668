#include "symdyn/core_maps.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <variant>

namespace symdyn {

RadialProfile::RadialProfile(std::vector<double> coeffs_r2) : coeffs_(std::move(coeffs_r2)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw InputError("radial profile coefficients must be finite");
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double s = static_cast<double>(i) / kSamples;
    max_abs_ = std::max(max_abs_, std::abs(at_s(s)));
    max_abs_slope_ = std::max(max_abs_slope_, std::abs(slope_s(s)));
  }
}

double RadialProfile::slope_s(double s) const {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * s + static_cast<double>(i) * coeffs_[i];
  return acc;
}

RadialProfile RadialProfile::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= factor;
  return RadialProfile(std::move(c));
}

RadialProfile RadialProfile::plus(const RadialProfile& other) const {
  std::vector<double> c(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) c[i] += other.coeffs_[i];
  return RadialProfile(std::move(c));
}

HamiltonianSpec HamiltonianSpec::make(Expression H, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw InputError("hamiltonian step must lie in (0, 1]");
  constexpr int kBoundarySamples = 256;
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < kBoundarySamples; ++i) {
    const double a = kTwoPi * i / kBoundarySamples;
    const double v = H.value(DiskPoint(std::cos(a), std::sin(a)));
    if (!std::isfinite(v)) throw InputError("hamiltonian is not finite on the boundary");
    if (i == 0) lo = hi = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo >= 1e-9) throw InputError("hamiltonian must be constant on the boundary circle");
  return HamiltonianSpec{std::move(H), step};
}

FlowSample midpoint_step(const Expression& H, const DiskPoint& z, double h) {
  const Matrix2 J = quarter_turn<double>();
  DiskPoint w = z;
  Matrix2 A = Matrix2::Zero();
  bool finishing = false;
  for (int iter = 0; iter < 50; ++iter) {
    const DiskPoint m = 0.5 * (z + w);
    const Jet2<double> jet = H.jet(m);
    A = J * jet.h;
    const DiskPoint residual = w - z - h * (J * jet.g);
    const Matrix2 lhs = Matrix2::Identity() - 0.5 * h * A;
    const DiskPoint delta = -lhs.inverse() * residual;
    w += delta;
    if (!w.allFinite()) break;
    if (finishing) {
      const Matrix2 M = (Matrix2::Identity() - 0.5 * h * A).inverse() * (Matrix2::Identity() + 0.5 * h * A);
      return {w, M};
    }
    if (delta.norm() <= 1e-12 * std::max(1.0, w.norm())) finishing = true;
  }
  throw NumericalError("implicit midpoint iteration did not converge (step too large)");
}

struct DiskIsotopy::Node {
  struct Rot {
    double alpha;
  };
  struct Twist {
    RadialProfile profile;
  };
  struct Ham {
    HamiltonianSpec spec;
    int steps;
  };
  struct Comp {
    std::vector<DiskIsotopy> factors;
  };
  struct Iter {
    DiskIsotopy base;
    int n;
  };
  std::variant<Rot, Twist, Ham, Comp, Iter> data;
};

namespace {

using Node = DiskIsotopy::Node;

FlowSample twist_flow(const RadialProfile& profile, double tau, const DiskPoint& p) {
  const double s = p.squaredNorm();
  const Matrix2 R = rotation(tau * profile.at_s(s));
  const DiskPoint q = R * p;
  const Eigen::RowVector2d grad_phi = (kTwoPi * tau * profile.slope_s(s) * 2.0) * p.transpose();
  return {q, R + (quarter_turn<double>() * q) * grad_phi};
}

void check_inside(const DiskPoint& p) {
  if (!in_disk(p)) throw NumericalError("point escaped the disk (invalid family data or step too large)");
}

}  // namespace

DiskIsotopy DiskIsotopy::rigid_rotation(double alpha) {
  if (!std::isfinite(alpha)) throw InputError("rotation alpha must be finite");
  return DiskIsotopy(std::make_shared<const Node>(Node{Node::Rot{alpha}}));
}
DiskIsotopy DiskIsotopy::radial_twist(RadialProfile profile) {
  return DiskIsotopy(std::make_shared<const Node>(Node{Node::Twist{std::move(profile)}}));
}
DiskIsotopy DiskIsotopy::hamiltonian(HamiltonianSpec spec) {
  const int steps = static_cast<int>(std::ceil(1.0 / spec.step - 1e-9));
  return DiskIsotopy(std::make_shared<const Node>(Node{Node::Ham{std::move(spec), std::max(1, steps)}}));
}
DiskIsotopy DiskIsotopy::composition(std::vector<DiskIsotopy> factors) {
  if (factors.empty()) throw InputError("composition needs at least one factor");
  return DiskIsotopy(std::make_shared<const Node>(Node{Node::Comp{std::move(factors)}}));
}
DiskIsotopy DiskIsotopy::iterate(DiskIsotopy base, int n) {
  if (n < 1) throw InputError("iterate count must be positive");
  return DiskIsotopy(std::make_shared<const Node>(Node{Node::Iter{std::move(base), n}}));
}

DiskIsotopy::Kind DiskIsotopy::kind() const { return static_cast<Kind>(node_->data.index()); }
double DiskIsotopy::alpha() const { return std::get<Node::Rot>(node_->data).alpha; }
const RadialProfile& DiskIsotopy::profile() const { return std::get<Node::Twist>(node_->data).profile; }
const HamiltonianSpec& DiskIsotopy::hamiltonian_spec() const { return std::get<Node::Ham>(node_->data).spec; }
const std::vector<DiskIsotopy>& DiskIsotopy::factors() const { return std::get<Node::Comp>(node_->data).factors; }
int DiskIsotopy::iterate_count() const { return std::get<Node::Iter>(node_->data).n; }

namespace {

// Flow of a single isotopy for local time tau in [0, 1].
FlowSample local_flow(const Node& node, double tau, const DiskPoint& p);

FlowSample chain(const std::vector<const DiskIsotopy*>& parts, double tau, const DiskPoint& p) {
  const int m = static_cast<int>(parts.size());
  const double pos = tau * m;
  const int j = std::min(m - 1, static_cast<int>(std::floor(pos)));
  FlowSample acc{p, Matrix2::Identity()};
  for (int i = 0; i < j; ++i) {
    const FlowSample s = parts[i]->step(acc.point);
    acc = {s.point, s.jacobian * acc.jacobian};
  }
  const FlowSample s = parts[j]->flow(pos - j, acc.point);
  return {s.point, s.jacobian * acc.jacobian};
}

std::vector<const DiskIsotopy*> parts_of(const Node& node) {
  std::vector<const DiskIsotopy*> parts;
  if (const auto* c = std::get_if<Node::Comp>(&node.data)) {
    for (const auto& f : c->factors) parts.push_back(&f);
  } else if (const auto* it = std::get_if<Node::Iter>(&node.data)) {
    parts.assign(static_cast<std::size_t>(it->n), &it->base);
  }
  return parts;
}

FlowSample local_flow(const Node& node, double tau, const DiskPoint& p) {
  return std::visit(
      [&](const auto& d) -> FlowSample {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Node::Rot>) {
          const Matrix2 R = rotation(tau * d.alpha);
          return {R * p, R};
        } else if constexpr (std::is_same_v<T, Node::Twist>) {
          return twist_flow(d.profile, tau, p);
        } else if constexpr (std::is_same_v<T, Node::Ham>) {
          const double h = 1.0 / d.steps;
          const int full = std::min(d.steps, static_cast<int>(std::floor(tau * d.steps)));
          FlowSample acc{p, Matrix2::Identity()};
          for (int k = 0; k < full; ++k) {
            const FlowSample s = midpoint_step(d.spec.H, acc.point, h);
            check_inside(s.point);
            acc = {s.point, s.jacobian * acc.jacobian};
          }
          const double rest = tau - full * h;
          if (rest > 1e-15) {
            const FlowSample s = midpoint_step(d.spec.H, acc.point, rest);
            acc = {s.point, s.jacobian * acc.jacobian};
          }
          return acc;
        } else {
          return chain(parts_of(node), tau, p);
        }
      },
      node.data);
}

}  // namespace

FlowSample DiskIsotopy::step(const DiskPoint& p) const { return local_flow(*node_, 1.0, p); }

FlowSample DiskIsotopy::flow(double t, const DiskPoint& p) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("isotopy time must be finite and non-negative");
  if (!in_disk(p)) throw InputError("point lies outside the disk");
  if (t == 0.0) return {p, Matrix2::Identity()};
  const double whole = std::floor(t);
  double frac = t - whole;
  int periods = static_cast<int>(whole);
  if (frac == 0.0) {
    --periods;
    frac = 1.0;
  }
  FlowSample acc{p, Matrix2::Identity()};
  for (int i = 0; i < periods; ++i) {
    const FlowSample s = step(acc.point);
    acc = {s.point, s.jacobian * acc.jacobian};
  }
  const FlowSample s = local_flow(*node_, frac, acc.point);
  check_inside(s.point);
  return {s.point, s.jacobian * acc.jacobian};
}

int DiskIsotopy::grid_size(int resolution) const {
  return std::visit(
      [&](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Node::Rot>) {
          return std::max(16, static_cast<int>(std::ceil(8.0 * std::abs(d.alpha)))) * resolution;
        } else if constexpr (std::is_same_v<T, Node::Twist>) {
          const double shear = 4.0 * std::numbers::pi * d.profile.max_abs_slope();
          return std::max(16, static_cast<int>(std::ceil(8.0 * d.profile.max_abs() + 2.0 * shear))) * resolution;
        } else if constexpr (std::is_same_v<T, Node::Ham>) {
          return d.steps * resolution;
        } else if constexpr (std::is_same_v<T, Node::Comp>) {
          int total = 0;
          for (const auto& f : d.factors) total += f.grid_size(resolution);
          return total;
        } else {
          return d.n * d.base.grid_size(resolution);
        }
      },
      node_->data);
}

namespace {

// Sweeps `node` over global times [t0, t0 + dt]; returns the end sample.
FlowSample sweep_node(const DiskIsotopy& iso, const DiskPoint& p, const Matrix2& before, double t0,
                      double dt, int resolution, bool skip_first, const DiskIsotopy::Visitor& visit) {
  switch (iso.kind()) {
    case DiskIsotopy::Kind::RigidRotation:
    case DiskIsotopy::Kind::RadialTwist: {
      const int G = iso.grid_size(resolution);
      FlowSample last{p, before};
      for (int j = skip_first ? 1 : 0; j <= G; ++j) {
        const double tau = static_cast<double>(j) / G;
        const FlowSample s = iso.kind() == DiskIsotopy::Kind::RigidRotation
                                 ? FlowSample{rotation(tau * iso.alpha()) * p, rotation(tau * iso.alpha())}
                                 : twist_flow(iso.profile(), tau, p);
        last = {s.point, s.jacobian * before};
        visit(t0 + tau * dt, last.point, last.jacobian);
      }
      return last;
    }
    case DiskIsotopy::Kind::Hamiltonian: {
      const auto& H = iso.hamiltonian_spec().H;
      const int N = iso.grid_size(1);
      const double h = 1.0 / N;
      FlowSample cur{p, before};
      if (!skip_first) visit(t0, cur.point, cur.jacobian);
      for (int k = 0; k < N; ++k) {
        for (int i = 1; i < resolution; ++i) {
          const double sub = h * i / resolution;
          const FlowSample s = midpoint_step(H, cur.point, sub);
          visit(t0 + (k * h + sub) * dt, s.point, s.jacobian * cur.jacobian);
        }
        const FlowSample s = midpoint_step(H, cur.point, h);
        check_inside(s.point);
        cur = {s.point, s.jacobian * cur.jacobian};
        visit(t0 + (k + 1) * h * dt, cur.point, cur.jacobian);
      }
      return cur;
    }
    default: {
      const auto parts = iso.parts();
      const int m = static_cast<int>(parts.size());
      FlowSample cur{p, before};
      for (int j = 0; j < m; ++j)
        cur = sweep_node(*parts[j], cur.point, cur.jacobian, t0 + dt * j / m, dt / m, resolution,
                         skip_first || j > 0, visit);
      return cur;
    }
  }
}

}  // namespace

std::vector<const DiskIsotopy*> DiskIsotopy::parts() const { return parts_of(*node_); }

void DiskIsotopy::sweep(const DiskPoint& p, int resolution, const Visitor& visit) const {
  if (resolution < 1) throw InputError("sweep resolution must be positive");
  sweep_node(*this, p, Matrix2::Identity(), 0.0, 1.0, resolution, false, visit);
}

std::optional<double> DiskIsotopy::boundary_rotation_closed_form() const {
  return std::visit(
      [&](const auto& d) -> std::optional<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Node::Rot>) {
          return d.alpha;
        } else if constexpr (std::is_same_v<T, Node::Twist>) {
          return d.profile.boundary();
        } else if constexpr (std::is_same_v<T, Node::Ham>) {
          return std::nullopt;
        } else {
          double total = 0.0;
          for (const DiskIsotopy* part : parts()) {
            const auto r = part->boundary_rotation_closed_form();
            if (!r) return std::nullopt;
            total += *r;
          }
          return total;
        }
      },
      node_->data);
}

std::optional<RadialProfile> DiskIsotopy::total_twist() const {
  return std::visit(
      [&](const auto& d) -> std::optional<RadialProfile> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Node::Rot>) {
          return RadialProfile({d.alpha});
        } else if constexpr (std::is_same_v<T, Node::Twist>) {
          return d.profile;
        } else if constexpr (std::is_same_v<T, Node::Ham>) {
          return std::nullopt;
        } else {
          RadialProfile total({0.0});
          for (const DiskIsotopy* part : parts()) {
            const auto r = part->total_twist();
            if (!r) return std::nullopt;
            total = total.plus(*r);
          }
          return total;
        }
      },
      node_->data);
}

bool DiskIsotopy::is_pure_hamiltonian() const {
  switch (kind()) {
    case Kind::Hamiltonian: return true;
    case Kind::RigidRotation:
    case Kind::RadialTwist: return false;
    default: {
      const auto ps = parts();
      return std::all_of(ps.begin(), ps.end(), [](const DiskIsotopy* f) { return f->is_pure_hamiltonian(); });
    }
  }
}

double DiskIsotopy::max_abs_hamiltonian() const {
  switch (kind()) {
    case Kind::Hamiltonian: {
      const auto& H = hamiltonian_spec().H;
      double m = 0.0;
      for (int i = 0; i <= 32; ++i) {
        const double r = static_cast<double>(i) / 32;
        for (int j = 0; j < 64; ++j) {
          const double a = kTwoPi * j / 64;
          m = std::max(m, std::abs(H.value(DiskPoint(r * std::cos(a), r * std::sin(a)))));
        }
      }
      return m;
    }
    case Kind::RigidRotation:
    case Kind::RadialTwist: return 0.0;
    default: {
      double m = 0.0;
      for (const DiskIsotopy* f : parts()) m = std::max(m, f->max_abs_hamiltonian());
      return m;
    }
  }
}

std::pair<double, DiskPoint> DiskIsotopy::hamiltonian_action_period(const DiskPoint& p) const {
  switch (kind()) {
    case Kind::Hamiltonian: {
      const auto& H = hamiltonian_spec().H;
      const int N = grid_size(1);
      const double h = 1.0 / N;
      DiskPoint z = p;
      double area = 0.0, energy = 0.0;
      double Hz = H.value(z);
      for (int k = 0; k < N; ++k) {
        const DiskPoint w = midpoint_step(H, z, h).point;
        const double Hw = H.value(w);
        area += 0.5 * (z.x() * w.y() - w.x() * z.y());
        energy += 0.5 * h * (Hz + Hw);
        z = w;
        Hz = Hw;
      }
      return {area - energy, z};
    }
    case Kind::RigidRotation:
    case Kind::RadialTwist:
      throw InputError("unsupported action model: family mixes non-Hamiltonian factors");
    default: {
      double total = 0.0;
      DiskPoint z = p;
      for (const DiskIsotopy* f : parts()) {
        const auto [a, w] = f->hamiltonian_action_period(z);
        total += a;
        z = w;
      }
      return {total, z};
    }
  }
}

std::function<DiskPoint(const DiskPoint&)> time_one_map(const DiskIsotopy& iso) {
  return [iso](const DiskPoint& p) { return iso.evaluate(1.0, p); };
}

}  // namespace symdyn
