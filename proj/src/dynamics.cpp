#include "hfscat/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "hfscat/propagator.hpp"

namespace hfscat {

double potential_profile(const PotentialSpec& v, double r) {
  switch (v.family) {
    case PotentialFamily::gaussian:
      return v.amplitude * std::exp(-r * r / (2.0 * v.width * v.width));
    case PotentialFamily::regularized_power:
      return v.amplitude * std::pow(1.0 + r * r, -0.5 * v.exponent);
    case PotentialFamily::table: {
      const auto& rs = v.table_radii;
      const auto& vs = v.table_values;
      if (rs.empty()) return 0.0;
      if (r <= rs.front()) return vs.front();
      if (r >= rs.back()) return vs.back();
      const auto it = std::upper_bound(rs.begin(), rs.end(), r);
      const std::size_t k = static_cast<std::size_t>(it - rs.begin());
      const double a = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
      return (1.0 - a) * vs[k - 1] + a * vs[k];
    }
  }
  return 0.0;
}

double potential_value(const PotentialSpec& v, double r) {
  if (r <= v.cutoff_radius) return potential_profile(v, r);
  if (r >= v.cutoff_radius + v.taper_width) return 0.0;
  return potential_profile(v, r) * 0.5 * (1.0 + std::cos(pi * (r - v.cutoff_radius) / v.taper_width));
}

void check_potential(const PotentialSpec& v, const Grid& g) {
  if (!(v.amplitude >= 0)) throw InvalidInput("potential.amplitude must be >= 0");
  if (v.family == PotentialFamily::gaussian && !(v.width > 0)) throw InvalidInput("potential.width must be positive");
  if (v.family == PotentialFamily::regularized_power && !(v.exponent > 0))
    throw InvalidInput("potential.exponent must be positive");
  if (v.family == PotentialFamily::table) {
    if (v.table_radii.size() < 2 || v.table_radii.size() != v.table_values.size())
      throw InvalidInput("potential.table needs matching radii/values with at least two samples");
    for (std::size_t k = 1; k < v.table_radii.size(); ++k)
      if (!(v.table_radii[k] > v.table_radii[k - 1])) throw InvalidInput("potential.table radii must increase");
  }
  if (!(v.cutoff_radius > 0)) throw InvalidInput("potential.cutoff_radius must be positive");
  if (!(v.taper_width >= 0)) throw InvalidInput("potential.taper_width must be >= 0");
  if (!(v.spectral_floor_low >= 0 && v.spectral_floor_high >= v.spectral_floor_low))
    throw InvalidInput("potential.spectral_floor must satisfy 0 <= low <= high");
  if (v.spectral_floor_high > 0 && !(v.spectral_floor_high > v.spectral_floor_low))
    throw InvalidInput("potential.spectral_floor needs low < high");
  if (v.cutoff_radius + v.taper_width > g.half_extent / 4 + 1e-12)
    throw GeometryInfeasible("potential support R_V + taper exceeds L/4");
  const int samples = 513;
  double prev = potential_profile(v, 0.0);
  if (prev < 0) throw InvalidInput("potential must be non-negative");
  for (int k = 1; k < samples; ++k) {
    const double val = potential_profile(v, v.cutoff_radius * k / (samples - 1));
    if (val < 0) throw InvalidInput("potential must be non-negative");
    if (val > prev * (1 + 1e-14) + 1e-300) throw InvalidInput("potential must be non-increasing in |x|");
    prev = val;
  }
}

double spectral_floor(const PotentialSpec& v, double xi) {
  if (v.spectral_floor_high <= 0) return 1.0;
  if (xi <= v.spectral_floor_low) return 0.0;
  if (xi >= v.spectral_floor_high) return 1.0;
  const auto f = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  const double s = (xi - v.spectral_floor_low) / (v.spectral_floor_high - v.spectral_floor_low);
  return f(s) / (f(s) + f(1.0 - s));
}

RealizedPotential realize_potential(const PotentialSpec& v, const Grid& g) {
  check_potential(v, g);
  RealizedPotential out{g, v, {}, {}, {}, {}};
  const Eigen::ArrayXd r = g.position_norm();
  out.values = r.unaryExpr([&](double x) { return potential_value(v, x); });
  Eigen::ArrayXcd vh = out.values.cast<cplx>();
  forward_transform(g, vh);
  out.fourier_values = vh.real();
  out.filter = g.frequency_norm().unaryExpr([&](double x) { return spectral_floor(v, x); });
  out.symbol = std::pow(2.0 * pi, 0.5 * g.dim) * out.filter * out.fourier_values;
  return out;
}

Eigen::ArrayXcd convolve(const RealizedPotential& v, const Eigen::ArrayXcd& f) {
  Eigen::ArrayXcd w = f;
  forward_transform(v.grid, w);
  w *= v.symbol;
  inverse_transform(v.grid, w);
  return w;
}

Eigen::ArrayXd convolve_real(const RealizedPotential& v, const Eigen::ArrayXd& rho) {
  const Eigen::ArrayXcd w = convolve(v, rho.cast<cplx>());
  // |V*rho| <= ||V||_1 ||rho||_inf bounds the size of the result.
  const double scale = std::max(w.real().abs().maxCoeff(), v.values.abs().sum() * v.grid.cell_volume() * rho.abs().maxCoeff());
  if (w.imag().abs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
    throw NumericalFailure("mean-field potential has a non-negligible imaginary part");
  return w.real();
}

std::string model_name(Model m) {
  switch (m) {
    case Model::restricted_hartree: return "rh";
    case Model::hartree: return "hartree";
    case Model::hartree_fock: return "hf";
  }
  return "rh";
}

Model parse_model(const std::string& s) {
  if (s == "rh") return Model::restricted_hartree;
  if (s == "hartree") return Model::hartree;
  if (s == "hf") return Model::hartree_fock;
  throw InvalidInput("model must be one of rh|hartree|hf");
}

namespace {

void check_state(const OrbitalSet& s, const RealizedPotential& v, Model m) {
  if (s.orbitals.empty()) throw InvalidInput("orbital set is empty");
  for (const auto& u : s.orbitals)
    if (!(u.grid == v.grid)) throw InvalidInput("orbital grid does not match the potential grid");
  if (m == Model::restricted_hartree && s.orbitals.size() != 1)
    throw InvalidInput("restricted Hartree model takes exactly one orbital");
}

// Density entering orbital j's mean field, summed in fixed order.
Eigen::ArrayXd mean_density(const std::vector<Eigen::ArrayXcd>& u, Model m, std::size_t j) {
  Eigen::ArrayXd rho = Eigen::ArrayXd::Zero(u[j].size());
  for (std::size_t k = 0; k < u.size(); ++k)
    if (m == Model::restricted_hartree || k != j) rho += u[k].abs2();
  return rho;
}

std::vector<Eigen::ArrayXcd> positions(const OrbitalSet& s) {
  std::vector<Eigen::ArrayXcd> u;
  for (const auto& f : s.orbitals) u.push_back(to_position(f).values);
  return u;
}

Eigen::ArrayXcd exchange(const std::vector<Eigen::ArrayXcd>& a, const RealizedPotential& v, std::size_t j,
                         const Eigen::ArrayXcd& g) {
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(g.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    if (k != j) out -= a[k] * convolve(v, a[k].conjugate() * g);
  return out;
}

}  // namespace

Eigen::ArrayXcd nonlinearity_values(const std::vector<Eigen::ArrayXcd>& u, const RealizedPotential& v, Model m,
                                    std::size_t j) {
  Eigen::ArrayXcd out = convolve_real(v, mean_density(u, m, j)) * u[j];
  if (m == Model::hartree_fock) out += exchange(u, v, j, u[j]);
  return out;
}

Field hartree_term(const OrbitalSet& s, const RealizedPotential& v, Model m, std::size_t j) {
  check_state(s, v, m);
  const auto u = positions(s);
  return Field{v.grid, Representation::position, convolve_real(v, mean_density(u, m, j)) * u[j], "hartree"};
}

Field fock_term(const OrbitalSet& s, const RealizedPotential& v, std::size_t j) {
  check_state(s, v, Model::hartree_fock);
  const auto u = positions(s);
  return Field{v.grid, Representation::position, exchange(u, v, j, u[j]), "fock"};
}

Field nonlinearity(const OrbitalSet& s, const RealizedPotential& v, Model m, std::size_t j) {
  Field h = hartree_term(s, v, m, j);
  if (m == Model::hartree_fock) h.values += fock_term(s, v, j).values;
  return h;
}

namespace {

// (I + i tau B)^{-1}(I - i tau B) u with B = V*rho_j - exchange over frozen orbitals a.
Eigen::ArrayXcd cayley(const std::vector<Eigen::ArrayXcd>& a, const Eigen::ArrayXd& vh, const RealizedPotential& v,
                       std::size_t j, double tau, const Eigen::ArrayXcd& u) {
  const auto apply = [&](const Eigen::ArrayXcd& g) -> Eigen::ArrayXcd { return vh * g + exchange(a, v, j, g); };
  const cplx it(0.0, tau);
  const Eigen::ArrayXcd y = u - it * apply(u);
  Eigen::ArrayXcd x = y;
  const double scale = std::sqrt(u.abs2().sum());
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::ArrayXcd next = y - it * apply(x);
    const double change = std::sqrt((next - x).abs2().sum());
    x = std::move(next);
    if (change <= 1e-15 * scale) return x;
  }
  throw NumericalFailure("exchange sub-step did not converge; reduce dt");
}

void check_finite(const std::vector<Eigen::ArrayXcd>& u) {
  for (const auto& a : u)
    if (!a.allFinite()) throw NumericalFailure("non-finite values during evolution");
}

void check_wrap(const Grid& g, const std::vector<Eigen::ArrayXcd>& u, double tol) {
  for (const auto& a : u) {
    const Field f{g, Representation::position, a, {}};
    if (mass_outside_box(f, circular_center(f), 0.5 * g.half_extent) > tol)
      throw NumericalFailure("wrap detected: packet mass left the safe box");
  }
}

}  // namespace

OrbitalSet evolve(const OrbitalSet& s, const RealizedPotential& v, Model m, double t_start, double t_end, double dt,
                  const EvolveOptions& opt) {
  check_state(s, v, m);
  const Grid& g = v.grid;
  if (!(dt > 0)) throw InvalidInput("dt must be positive");
  const double span = t_end - t_start;
  const double ratio = std::abs(span) / dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) throw InvalidInput("dt must divide t_end - t_start");
  const double h = span >= 0 ? dt : -dt;
  const std::size_t n = s.orbitals.size();

  std::vector<Eigen::ArrayXcd> spec;
  std::vector<double> norm0;
  for (const auto& f : s.orbitals) {
    spec.push_back(to_frequency(f).values);
    norm0.push_back(std::sqrt(spec.back().abs2().sum()));
  }
  const Eigen::ArrayXcd half = free_multiplier(g, 0.5 * h);
  std::vector<Eigen::ArrayXcd> before(n), after(n);
  std::vector<Eigen::ArrayXd> field(n);

  for (long step = 0; step < steps; ++step) {
    for (std::size_t j = 0; j < n; ++j) {
      before[j] = spec[j] * half;
      inverse_transform(g, before[j]);
    }
    if (m == Model::hartree_fock) {
      std::vector<Eigen::ArrayXcd> mid = before;
      for (int pass = 0; pass <= 2; ++pass) {
        for (std::size_t j = 0; j < n; ++j) {
          const Eigen::ArrayXd vh = convolve_real(v, mean_density(mid, m, j));
          after[j] = cayley(mid, vh, v, j, 0.5 * h, before[j]);
        }
        if (pass < 2)
          for (std::size_t j = 0; j < n; ++j) mid[j] = 0.5 * (before[j] + after[j]);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        field[j] = convolve_real(v, mean_density(before, m, j));
        after[j] = before[j] * (cplx(0.0, -h) * field[j].cast<cplx>()).exp();
      }
    }
    if (opt.observer) {
      StepView view{t_start + (step + 0.5) * h, h, &before, &after, m == Model::hartree_fock ? nullptr : &field};
      opt.observer(view);
    }
    for (std::size_t j = 0; j < n; ++j) {
      spec[j] = after[j];
      forward_transform(g, spec[j]);
      spec[j] *= half;
    }
    if (opt.check_wrap && opt.wrap_interval > 0 && (step % opt.wrap_interval == 0 || step + 1 == steps)) {
      check_finite(after);
      check_wrap(g, after, opt.wrap_tol);
    }
  }

  OrbitalSet out;
  out.time = t_end;
  for (std::size_t j = 0; j < n; ++j) {
    if (!spec[j].allFinite()) throw NumericalFailure("non-finite values during evolution");
    const double nrm = std::sqrt(spec[j].abs2().sum());
    if (std::abs(nrm - norm0[j]) > opt.norm_tol * std::max(norm0[j], 1e-300))
      throw NumericalFailure("orbital norm drift exceeds tolerance");
    Field f{g, Representation::frequency, spec[j], s.orbitals[j].label};
    out.orbitals.push_back(s.orbitals[j].representation == Representation::position ? inverse_fourier(f) : f);
  }
  return out;
}

double rh_energy(const Field& u, const RealizedPotential& v) {
  const Field spec = to_frequency(u);
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(u.grid.size());
  for (int a = 0; a < u.grid.dim; ++a) k2 += u.grid.frequency_component(a).square();
  const double kinetic = 0.5 * u.grid.dual_cell_volume() * (k2 * spec.values.abs2()).sum();
  const Eigen::ArrayXd rho = to_position(u).values.abs2();
  const double potential = 0.5 * u.grid.cell_volume() * (convolve_real(v, rho) * rho).sum();
  return kinetic + potential;
}

}  // namespace hfscat
