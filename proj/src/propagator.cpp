#include "hfscat/propagator.hpp"

#include <cmath>

namespace hfscat {

Eigen::ArrayXcd free_multiplier(const Grid& g, double t) {
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) k2 += g.frequency_component(a).square();
  Eigen::ArrayXcd out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out[i] = std::polar(1.0, -0.5 * t * k2[i]);
  return out;
}

PropagationPlan::PropagationPlan(const Grid& g, double t) : grid_(g), time_(t), multiplier_(free_multiplier(g, t)) {}

Field PropagationPlan::apply(const Field& f) const {
  if (!(f.grid == grid_)) throw InvalidInput("free_propagate: grid mismatch");
  Field spec = to_frequency(f);
  spec.values *= multiplier_;
  return f.representation == Representation::frequency ? spec : inverse_fourier(spec);
}

Field free_propagate(const Field& f, double t) { return PropagationPlan(f.grid, t).apply(f); }

double galilean_check(const Field& phi, const Eigen::VectorXd& v, double s) {
  const Grid& g = phi.grid;
  if (v.size() != g.dim) throw InvalidInput("galilean_check: velocity has wrong dimension");
  std::vector<Eigen::Index> shift(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    const double cells = v[a] * s / g.spacing();
    if (std::abs(cells - std::round(cells)) > 1e-9) throw InvalidInput("galilean_check: v*s is not a whole number of cells");
    shift[a] = static_cast<Eigen::Index>(std::llround(cells));
  }
  const Field lhs = to_position(free_propagate(modulate(phi, v), s));
  const Field base = to_position(free_propagate(phi, s));
  const Eigen::Index m = g.points_per_axis;
  Eigen::ArrayXd phase = Eigen::ArrayXd::Constant(g.size(), -0.5 * v.squaredNorm() * s);
  for (int a = 0; a < g.dim; ++a) phase += v[a] * g.position_component(a);
  double defect = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Eigen::Index src = 0, rest = i;
    for (int a = g.dim - 1; a >= 0; --a) {
      const Eigen::Index idx = rest % m;
      rest /= m;
      src += (((idx - shift[a]) % m + m) % m) * g.stride(a);
    }
    defect = std::max(defect, std::abs(lhs.values[i] - std::polar(1.0, phase[i]) * base.values[src]));
  }
  return defect;
}

cplx gaussian_free_solution(double x, double t) {
  const cplx d(1.0, t);
  return std::exp(-x * x / (2.0 * d)) / std::sqrt(d);
}

double strichartz_l4(const Field& phi, double horizon, double dt) {
  const Field spec = to_frequency(phi);
  const int steps = static_cast<int>(std::llround(horizon / dt));
  double total = 0.0;
  for (int k = -steps; k <= steps; ++k) {
    Eigen::ArrayXcd u = spec.values * free_multiplier(phi.grid, k * dt);
    inverse_transform(phi.grid, u);
    const double w = (std::abs(k) == steps) ? 0.5 : 1.0;
    total += w * dt * phi.grid.cell_volume() * u.abs2().square().sum();
  }
  return total;
}

Eigen::VectorXd circular_center(const Field& f) {
  const Field pos = to_position(f);
  const Grid& g = f.grid;
  const Eigen::ArrayXd rho = pos.values.abs2();
  Eigen::VectorXd c(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    const Eigen::ArrayXd th = g.position_component(a) * (pi / g.half_extent);
    const cplx z((rho * th.cos()).sum(), (rho * th.sin()).sum());
    c[a] = std::arg(z) * g.half_extent / pi;
  }
  return c;
}

double mass_outside_box(const Field& f, const Eigen::VectorXd& c, double w) {
  const Field pos = to_position(f);
  const Grid& g = f.grid;
  const Eigen::ArrayXd rho = pos.values.abs2();
  const double total = rho.sum();
  if (total == 0.0) return 0.0;
  Eigen::Array<bool, Eigen::Dynamic, 1> out = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(g.size(), false);
  for (int a = 0; a < g.dim; ++a) {
    Eigen::ArrayXd d = g.position_component(a) - c[a];
    d -= 2.0 * g.half_extent * (d / (2.0 * g.half_extent)).round();
    out = out || (d.abs() > w);
  }
  return out.select(rho, 0.0).sum() / total;
}

}  // namespace hfscat
