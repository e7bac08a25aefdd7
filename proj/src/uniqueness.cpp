#include "hfscat/uniqueness.hpp"

#include <cmath>

#include "hfscat/errors.hpp"
#include "hfscat/kernels.hpp"

namespace hfscat {

namespace {

Eigen::ArrayXd distance_to(const Grid& g, const Eigen::VectorXd& c) {
  Eigen::ArrayXd d2 = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) d2 += (g.frequency_component(a) - c[a]).square();
  return d2.sqrt();
}

// Largest |F(U0 a conj U0 b)|^2 over |t| = T relative to its value at t = 0.
double edge_ratio(const Field& a, const Field& b, double t) {
  const double peak = pair_spectrum(a, b, 0.0).values.abs2().maxCoeff();
  const double edge = std::max(pair_spectrum(a, b, t).values.abs2().maxCoeff(),
                               pair_spectrum(a, b, -t).values.abs2().maxCoeff());
  return peak > 0 ? edge / peak : 0.0;
}

}  // namespace

std::vector<ProbeSpec> build_disjoint_probes(const Grid& g, double eps, const std::vector<Eigen::VectorXd>& centers,
                                             int smoothness_order) {
  if (!(eps > 0)) throw InvalidInput("band radius must be positive");
  std::vector<ProbeSpec> out;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    ProbeSpec p;
    p.center = centers[k];
    p.band_radius = eps;
    p.smoothness_order = smoothness_order;
    check_probe(g, p);
    for (std::size_t l = 0; l < k; ++l)
      if (!((centers[k] - centers[l]).norm() > 2 * eps))
        throw GeometryInfeasible("probe bands " + std::to_string(l) + " and " + std::to_string(k) + " overlap");
    out.push_back(p);
  }
  return out;
}

Eigen::VectorXd g2_center(const ProbeSpec& a, const ProbeSpec& b) { return a.center - b.center; }

OrthogonalityReport verify_g1_orthogonality(const Grid& g, const std::vector<ProbeSpec>& probes,
                                            const std::vector<double>& t_samples) {
  std::vector<Field> spectra;
  std::vector<double> norms;
  for (const auto& p : probes) {
    spectra.push_back(probe_spectrum(g, p));
    norms.push_back(spectra.back().norm());
  }
  const Eigen::ArrayXd r = g.frequency_norm();
  OrthogonalityReport rep;
  rep.worst_xi = Eigen::VectorXd::Zero(g.dim);
  for (double t : t_samples) {
    std::vector<Eigen::ArrayXcd> d;
    for (const auto& s : spectra) d.push_back(density_spectrum(s, t).values);
    for (std::size_t k = 0; k < d.size(); ++k)
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (k == j) continue;
        const Eigen::ArrayXd prod = (d[k] * d[j].conjugate()).abs() / std::pow(norms[k] * norms[j], 2);
        Eigen::Index i;
        const double m = prod.maxCoeff(&i);
        if (m > rep.defect) {
          rep.defect = m;
          rep.worst_time = t;
          for (int a = 0; a < g.dim; ++a) rep.worst_xi[a] = g.frequency_component(a)[i];
        }
        rep.defect_off_origin = std::max(rep.defect_off_origin, (r > 0).select(prod, 0.0).maxCoeff());
      }
  }
  return rep;
}

double verify_g2_support(const Grid& g, const ProbeSpec& a, const ProbeSpec& b, const std::vector<double>& t_samples,
                         const Eigen::VectorXd& center) {
  const Field fa = probe_spectrum(g, a), fb = probe_spectrum(g, b);
  const double radius = a.band_radius + b.band_radius;
  double worst = 0.0;
  for (double t : t_samples) worst = std::max(worst, spectral_mass_outside(pair_spectrum(fa, fb, t), center, radius));
  return worst;
}

double verify_g2_support(const Grid& g, const ProbeSpec& a, const ProbeSpec& b, const std::vector<double>& t_samples) {
  return verify_g2_support(g, a, b, t_samples, g2_center(a, b));
}

std::vector<double> simpson_times(double window, int count) {
  if (count < 3 || count % 2 == 0) throw InvalidInput("Simpson rule needs an odd node count >= 3");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = -window + 2.0 * window * i / (count - 1);
  return t;
}

LocalizationWindow localization_window(const Grid& g, const WindowSpec& spec, const Eigen::VectorXd& target) {
  const int n = spec.orbitals, j = spec.reference;
  const double eps = spec.eps, delta = spec.delta;
  if (n < 2 || j < 0 || j >= n) throw InvalidInput("window needs N >= 2 and 0 <= j < N");
  if (target.size() != g.dim) throw InvalidInput("target has wrong dimension");
  if (!(delta > 4 * eps)) throw GeometryInfeasible("target radius must exceed 4 eps");

  // Reference band at -p/2, the others around +p/2 on a line, spaced just over 2 eps.
  Eigen::VectorXd axis = Eigen::VectorXd::Zero(g.dim);
  if (target.norm() > 0)
    axis = target / target.norm();
  else
    axis[0] = 1.0;
  const double step = 2 * eps * 1.05, room = delta - 2 * eps;
  const Eigen::VectorXd ref = -0.5 * target;
  // Lattice origin: offset 0, or the nearest offset clear of the reference band.
  const double t0 = target.norm() < step ? step - target.norm() : 0.0;
  std::vector<Eigen::VectorXd> others;
  for (int m = 0; static_cast<int>(others.size()) < n - 1 && m * step <= 2 * room; ++m)
    for (int sgn : {1, -1}) {
      if (m == 0 && sgn < 0) continue;
      if (static_cast<int>(others.size()) == n - 1) break;
      const double t = t0 + sgn * m * step;
      if (std::abs(t) > room) continue;
      const Eigen::VectorXd off = t * axis;
      if ((target + off).norm() <= 2 * eps) continue;  // would overlap the reference band
      others.push_back(0.5 * target + off);
    }
  if (static_cast<int>(others.size()) < n - 1)
    throw GeometryInfeasible("cannot place " + std::to_string(n - 1) + " bands inside the target ball");
  std::vector<Eigen::VectorXd> centers;
  for (int k = 0, o = 0; k < n; ++k) centers.push_back(k == j ? ref : others[o++]);

  LocalizationWindow w;
  w.probes = build_disjoint_probes(g, eps, centers, spec.smoothness_order);
  w.target = target;
  for (int k = 0; k < n; ++k)
    if (k != j && !((centers[k] - ref).norm() + 2 * eps < g.nyquist()))
      throw GeometryInfeasible("product band exceeds the Nyquist frequency");

  std::vector<Field> s;
  for (const auto& p : w.probes) s.push_back(probe_spectrum(g, p));
  // Time window: double until every product has decayed, capped by the first wrap of the fastest band.
  double speed = 0.0;
  for (const auto& c : centers) speed = std::max(speed, c.norm() + eps);
  const double cap = 2.0 * g.half_extent / speed;
  double t = std::min(2.0, cap);
  for (;;) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
      if (k != j) worst = std::max(worst, edge_ratio(s[k], s[j], t));
    if (worst < 1e-12 || 2 * t > cap) break;
    t *= 2;
  }
  w.time_window = t;

  const std::vector<double> times = simpson_times(t, spec.t_samples);
  const double h = times[1] - times[0];
  w.window = Eigen::ArrayXd::Zero(g.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double c = (i == 0 || i + 1 == times.size()) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int k = 0; k < n; ++k)
      if (k != j) w.window += c * h / 3 * pair_spectrum(s[k], s[j], times[i]).values.abs2();
  }
  const double total = w.window.sum();
  w.mass_inside = total > 0 ? (distance_to(g, target) <= delta).select(w.window, 0.0).sum() / total : 0.0;
  return w;
}

std::vector<Eigen::VectorXd> target_sweep(int dim, double step, double reach) {
  if (!(step > 0)) throw InvalidInput("sweep step must be positive");
  std::vector<Eigen::VectorXd> out;
  for (int m = 0; m * step <= reach + 1e-12; ++m) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    p[0] = m * step;
    out.push_back(p);
  }
  return out;
}

Verdict distinguish(const Grid& g, const Eigen::ArrayXd& v1_hat, const Eigen::ArrayXd& v2_hat, const WindowSpec& spec,
                    const std::vector<Eigen::VectorXd>& targets, double tol) {
  if (v1_hat.size() != g.size() || v2_hat.size() != g.size()) throw InvalidInput("potential spectra not on the grid");
  const Eigen::ArrayXd w = v1_hat - v2_hat;
  const double scale = std::max(v1_hat.abs().maxCoeff(), v2_hat.abs().maxCoeff());
  Verdict v;
  for (const auto& p : targets) {
    const LocalizationWindow lw = localization_window(g, spec, p);
    const double integral = (w * lw.window).sum() * g.dual_cell_volume();
    const double threshold = tol * lw.window.sum() * g.dual_cell_volume() * scale;
    v.targets.push_back(p);
    v.integrals.push_back(integral);
    v.thresholds.push_back(threshold);
    if (!v.distinguished && std::abs(integral) > threshold) {
      v.distinguished = true;
      v.ball = p;
    }
  }
  return v;
}

}  // namespace hfscat
