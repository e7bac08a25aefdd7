#include "hfscat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hfscat/propagator.hpp"

namespace hfscat {

namespace {

double tail_radius(Eigen::ArrayXd dist, const Eigen::ArrayXd& mass, double tail) {
  const double total = mass.sum();
  if (total == 0.0) return 0.0;
  std::vector<Eigen::Index> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return dist[a] > dist[b]; });
  double outside = 0.0;
  for (Eigen::Index i : order) {
    outside += mass[i];
    if (outside > tail * total) return dist[i];
  }
  return 0.0;
}

}  // namespace

double spatial_radius(const Field& f, double tail) {
  const Field pos = to_position(f);
  const Grid& g = f.grid;
  const Eigen::VectorXd c = circular_center(pos);
  Eigen::ArrayXd d2 = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) {
    Eigen::ArrayXd d = g.position_component(a) - c[a];
    d -= 2.0 * g.half_extent * (d / (2.0 * g.half_extent)).round();
    d2 += d.square();
  }
  return tail_radius(d2.sqrt(), pos.values.abs2(), tail);
}

double spectral_radius(const Field& f, double tail) {
  const Field spec = to_frequency(f);
  const Grid& g = f.grid;
  const Eigen::ArrayXd mass = spec.values.abs2();
  Eigen::ArrayXd d2 = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) {
    const Eigen::ArrayXd k = g.frequency_component(a);
    const double mean = (k * mass).sum() / std::max(mass.sum(), 1e-300);
    d2 += (k - mean).square();
  }
  return tail_radius(d2.sqrt(), mass, tail);
}

void check_transit(const OrbitalSet& f_minus, double horizon) {
  for (const auto& f : f_minus.orbitals) {
    const double reach = spatial_radius(f, 1e-7) + std::abs(horizon) * spectral_radius(f, 1e-7);
    if (!(reach < 0.5 * f.grid.half_extent))
      throw GeometryInfeasible("transit: packet spread over the horizon exceeds half the box (reach " +
                               std::to_string(reach) + ")");
  }
}

cplx pairing(const Field& f_minus, const Field& f_plus, const Field& probe) {
  const Field a = to_position(f_minus), b = to_position(f_plus), p = to_position(probe);
  if (!(a.grid == b.grid) || !(a.grid == p.grid)) throw InvalidInput("pairing: grid mismatch");
  return a.grid.cell_volume() * (cplx(0, 1) * (b.values - a.values) * p.values.conjugate()).sum();
}

ScatterResult forward_scatter(const OrbitalSet& f_minus, const RealizedPotential& v, Model m, const ScatterOptions& opt) {
  if (!(opt.horizon > 0)) throw InvalidInput("scattering.horizon must be positive");
  check_transit(f_minus, opt.horizon);
  const Grid& g = v.grid;
  const std::size_t n = f_minus.orbitals.size();
  const double hn = g.cell_volume();
  if (opt.decompose && n != 1) throw InvalidInput("remainder decomposition needs a single orbital");

  std::vector<Eigen::ArrayXcd> probes;
  const auto& src = opt.pairing_probes.empty() ? f_minus.orbitals : opt.pairing_probes;
  if (src.size() != n) throw InvalidInput("one pairing probe per orbital is required");
  for (const auto& p : src) probes.push_back(to_frequency(p).values);

  ScatterResult res;
  res.pairing.assign(n, cplx(0));
  res.duhamel.assign(n, cplx(0));
  Decomposition dec;

  OrbitalSet start;
  start.time = -opt.horizon;
  for (const auto& f : f_minus.orbitals) start.orbitals.push_back(free_propagate(f, -opt.horizon));

  const cplx I(0, 1);
  EvolveOptions eo = opt.evolve;
  std::vector<Eigen::ArrayXcd> w(n);
  eo.observer = [&](const StepView& s) {
    const Eigen::ArrayXcd mult = free_multiplier(g, s.t_mid);
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = probes[j] * mult;
      inverse_transform(g, w[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::ArrayXcd& mj = (*s.before)[j];
      Eigen::ArrayXcd incr;
      Eigen::ArrayXcd force;
      if (s.mean_field) {
        const Eigen::ArrayXd half = 0.5 * s.dt * (*s.mean_field)[j];
        // i(e^{-i theta} - 1) m written without cancellation.
        incr = 2.0 * half.sin().cast<cplx>() * (-I * half.cast<cplx>()).exp() * mj;
        force = (*s.mean_field)[j].cast<cplx>() * mj;
      } else {
        incr = I * ((*s.after)[j] - mj);
        force = nonlinearity_values(*s.before, v, m, j);
      }
      const Eigen::ArrayXcd wc = w[j].conjugate();
      const cplx step = hn * (incr * wc).sum();
      res.pairing[j] += step;
      res.duhamel[j] += s.dt * hn * (force * wc).sum();
      if (opt.decompose) {
        const Eigen::ArrayXd rho_w = w[j].abs2();
        const Eigen::ArrayXd vw = convolve_real(v, rho_w);
        dec.leading += s.dt * hn * (vw * rho_w).sum();
        const Eigen::ArrayXcd dm = mj - w[j];
        dec.r1 += s.dt * hn * (convolve(v, dm * wc) * rho_w).sum();
        dec.r2 += s.dt * hn * (convolve(v, mj * dm.conjugate()) * rho_w).sum();
        dec.r3 += step - s.dt * hn * ((*s.mean_field)[j] * rho_w).sum();
        Eigen::ArrayXcd rho_hat = rho_w.cast<cplx>();
        forward_transform(g, rho_hat);
        dec.leading_frequency += s.dt * g.dual_cell_volume() * (v.symbol * rho_hat.abs2()).sum();
      }
    }
  };
  const OrbitalSet end = evolve(start, v, m, -opt.horizon, opt.horizon, opt.dt, eo);
  res.f_plus.time = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    res.f_plus.orbitals.push_back(free_propagate(end.orbitals[j], -opt.horizon));
    const double n0 = f_minus.orbitals[j].norm();
    res.unitarity_defect =
        std::max(res.unitarity_defect, std::abs(res.f_plus.orbitals[j].norm() - n0) / std::max(n0, 1e-300));
  }
  if (opt.decompose) res.decomposition = dec;
  return res;
}

double horizon_stability(const OrbitalSet& f_minus, const RealizedPotential& v, Model m, const ScatterOptions& opt) {
  ScatterOptions twice = opt;
  twice.horizon = 2 * opt.horizon;
  twice.decompose = false;
  ScatterOptions once = opt;
  once.decompose = false;
  const ScatterResult a = forward_scatter(f_minus, v, m, once);
  const ScatterResult b = forward_scatter(f_minus, v, m, twice);
  double worst = 0.0;
  for (std::size_t j = 0; j < f_minus.orbitals.size(); ++j) {
    const Field x = to_position(a.f_plus.orbitals[j]), y = to_position(b.f_plus.orbitals[j]);
    const double d = std::sqrt(x.grid.cell_volume() * (x.values - y.values).abs2().sum());
    worst = std::max(worst, d / std::max(f_minus.orbitals[j].norm(), 1e-300));
  }
  return worst;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

OrbitalSet probe_orbitals(const Grid& g, const std::vector<ProbeSpec>& probes, const Eigen::VectorXd& v) {
  OrbitalSet s;
  for (ProbeSpec p : probes) {
    p.velocity = v;
    s.orbitals.push_back(probe_spectrum(g, p));
  }
  return s;
}

SweepTable high_velocity_sweep(const Grid& g, const std::vector<ProbeSpec>& probes, std::size_t j,
                               const RealizedPotential& v, Model m, const std::vector<double>& speeds,
                               const ScatterOptions& opt, double reference) {
  if (j >= probes.size()) throw InvalidInput("orbital index out of range");
  SweepTable t;
  t.reference = reference;
  std::vector<double> xs, ys;
  for (double speed : speeds) {
    Eigen::VectorXd vel = Eigen::VectorXd::Zero(g.dim);
    vel[0] = speed;
    if (!on_frequency_lattice(g, vel)) throw InvalidInput("sweep velocity is not on the frequency lattice");
    try {
      const OrbitalSet f = probe_orbitals(g, probes, vel);
      ScatterOptions o = opt;
      o.pairing_probes.clear();
      const ScatterResult r = forward_scatter(f, v, m, o);
      SweepRow row;
      row.abscissa = std::abs(speed);
      row.pairing = r.pairing[j];
      row.remainder = std::abs(r.pairing[j] - reference);
      xs.push_back(row.abscissa);
      ys.push_back(row.remainder);
      row.slope_so_far = loglog_slope(xs, ys);
      t.rows.push_back(row);
    } catch (const std::exception& e) {
      t.flagged = true;
      t.note = std::string("run at |v| = ") + std::to_string(speed) + " failed: " + e.what();
      break;
    }
  }
  t.slope = loglog_slope(xs, ys);
  return t;
}

SweepTable small_amplitude_sweep(const Grid& g, const std::vector<ProbeSpec>& probes, std::size_t j,
                                 const RealizedPotential& v, Model m, const std::vector<double>& amplitudes,
                                 const ScatterOptions& opt) {
  if (j >= probes.size()) throw InvalidInput("orbital index out of range");
  SweepTable t;
  const OrbitalSet base = probe_orbitals(g, probes, Eigen::VectorXd::Zero(g.dim));
  for (double eps : amplitudes) {
    if (!(eps >= 1e-3)) throw InvalidInput("amplitudes below 1e-3 are under the solver noise floor");
    OrbitalSet f = base;
    for (auto& u : f.orbitals) u.values *= eps;
    ScatterOptions o = opt;
    o.pairing_probes = base.orbitals;
    try {
      const ScatterResult r = forward_scatter(f, v, m, o);
      t.rows.push_back({eps, r.pairing[j] / (eps * eps * eps), 0.0, 0.0});
    } catch (const std::exception& e) {
      t.flagged = true;
      t.note = std::string("run at amplitude ") + std::to_string(eps) + " failed: " + e.what();
      break;
    }
  }
  const std::size_t n = t.rows.size();
  for (std::size_t k = 2; k < n; ++k)
    if (std::abs(t.rows[k].pairing - t.rows[k - 1].pairing) >= std::abs(t.rows[k - 1].pairing - t.rows[k - 2].pairing)) {
      t.flagged = true;
      t.note = "successive differences do not shrink";
    }
  if (n >= 2) {
    const double a2 = t.rows[n - 2].abscissa * t.rows[n - 2].abscissa, b2 = t.rows[n - 1].abscissa * t.rows[n - 1].abscissa;
    t.extrapolated = (a2 * t.rows[n - 1].pairing - b2 * t.rows[n - 2].pairing) / (a2 - b2);
  } else if (n == 1) {
    t.extrapolated = t.rows[0].pairing;
  }
  return t;
}

DecompositionReport remainder_decomposition(const Grid& g, const ProbeSpec& probe, const RealizedPotential& v,
                                            const Eigen::VectorXd& velocity, const ScatterOptions& opt) {
  const OrbitalSet f = probe_orbitals(g, {probe}, velocity);
  ScatterOptions o = opt;
  o.decompose = true;
  o.pairing_probes.clear();
  const ScatterResult r = forward_scatter(f, v, Model::restricted_hartree, o);
  DecompositionReport rep;
  rep.parts = *r.decomposition;
  rep.direct = pairing(f.orbitals[0], r.f_plus.orbitals[0], f.orbitals[0]);
  rep.closure_defect = std::abs(rep.parts.total() - rep.direct) / std::max(std::abs(rep.direct), 1e-300);
  return rep;
}

}  // namespace hfscat
