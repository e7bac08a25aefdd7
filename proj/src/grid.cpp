#include "hfscat/grid.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <vector>

namespace hfscat {

namespace {

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

Eigen::ArrayXd component(const Grid& g, int axis, const Eigen::ArrayXd& axis_values) {
  const Eigen::Index n = g.size(), st = g.stride(axis), m = g.points_per_axis;
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = axis_values[(i / st) % m];
  return out;
}

// (-1)^(sum of indices); the centered transform is s * DFT(s * f).
void apply_checkerboard(const Grid& g, Eigen::ArrayXcd& v) {
  const Eigen::Index n = g.size(), m = g.points_per_axis;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index rest = i, parity = 0;
    for (int a = 0; a < g.dim; ++a) {
      parity += rest % m;
      rest /= m;
    }
    if (parity & 1) v[i] = -v[i];
  }
}

void dft_axes(const Grid& g, Eigen::ArrayXcd& v, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  thread_local std::vector<cplx> in, out;
  const Eigen::Index n = g.size(), m = g.points_per_axis;
  in.resize(m);
  out.resize(m);
  for (int a = 0; a < g.dim; ++a) {
    const Eigen::Index st = g.stride(a);
    for (Eigen::Index base = 0; base < n; ++base) {
      if ((base / st) % m != 0) continue;
      for (Eigen::Index k = 0; k < m; ++k) in[k] = v[base + k * st];
      if (inverse)
        fft.inv(out, in);
      else
        fft.fwd(out, in);
      for (Eigen::Index k = 0; k < m; ++k) v[base + k * st] = out[k];
    }
  }
}

}  // namespace

Eigen::Index Grid::size() const {
  Eigen::Index n = 1;
  for (int a = 0; a < dim; ++a) n *= points_per_axis;
  return n;
}

double Grid::cell_volume() const { return std::pow(spacing(), dim); }
double Grid::dual_cell_volume() const { return std::pow(dual_spacing(), dim); }

Eigen::Index Grid::stride(int axis) const {
  Eigen::Index s = 1;
  for (int a = axis + 1; a < dim; ++a) s *= points_per_axis;
  return s;
}

Eigen::ArrayXd Grid::axis_positions() const {
  return -half_extent + spacing() * Eigen::ArrayXd::LinSpaced(points_per_axis, 0, points_per_axis - 1);
}

Eigen::ArrayXd Grid::axis_frequencies() const {
  const double m2 = points_per_axis / 2;
  return dual_spacing() * Eigen::ArrayXd::LinSpaced(points_per_axis, -m2, m2 - 1);
}

Eigen::ArrayXd Grid::position_component(int axis) const { return component(*this, axis, axis_positions()); }
Eigen::ArrayXd Grid::frequency_component(int axis) const { return component(*this, axis, axis_frequencies()); }

Eigen::ArrayXd Grid::position_norm() const {
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(size());
  for (int a = 0; a < dim; ++a) r2 += position_component(a).square();
  return r2.sqrt();
}

Eigen::ArrayXd Grid::frequency_norm() const {
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(size());
  for (int a = 0; a < dim; ++a) r2 += frequency_component(a).square();
  return r2.sqrt();
}

Grid make_grid(int dim, int points_per_axis, double half_extent) {
  if (dim < 1 || dim > 3) throw InvalidInput("grid.dim must be 1, 2 or 3");
  if (!power_of_two(points_per_axis) || points_per_axis < 16)
    throw InvalidInput("grid.M must be a power of two >= 16");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) throw InvalidInput("grid.L must be positive");
  return Grid{dim, points_per_axis, half_extent};
}

double Field::norm() const {
  const double w = representation == Representation::position ? grid.cell_volume() : grid.dual_cell_volume();
  return std::sqrt(w * values.abs2().sum());
}

Field zero_field(const Grid& g, Representation r, std::string label) {
  return Field{g, r, Eigen::ArrayXcd::Zero(g.size()), std::move(label)};
}

void forward_transform(const Grid& g, Eigen::ArrayXcd& v) {
  apply_checkerboard(g, v);
  dft_axes(g, v, false);
  apply_checkerboard(g, v);
  v *= std::pow(g.spacing() / std::sqrt(2.0 * pi), g.dim);
}

void inverse_transform(const Grid& g, Eigen::ArrayXcd& v) {
  apply_checkerboard(g, v);
  dft_axes(g, v, true);
  apply_checkerboard(g, v);
  v *= std::pow(g.points_per_axis * g.dual_spacing() / std::sqrt(2.0 * pi), g.dim);
}

Field fourier(const Field& f) {
  if (f.representation != Representation::position) throw InvalidInput("fourier: field is not in position representation");
  Field out{f.grid, Representation::frequency, f.values, f.label};
  forward_transform(out.grid, out.values);
  return out;
}

Field inverse_fourier(const Field& f) {
  if (f.representation != Representation::frequency)
    throw InvalidInput("inverse_fourier: field is not in frequency representation");
  Field out{f.grid, Representation::position, f.values, f.label};
  inverse_transform(out.grid, out.values);
  return out;
}

Field to_position(const Field& f) { return f.representation == Representation::position ? f : inverse_fourier(f); }
Field to_frequency(const Field& f) { return f.representation == Representation::frequency ? f : fourier(f); }

cplx inner_product(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw InvalidInput("inner_product: grid mismatch");
  if (f.representation != g.representation) throw InvalidInput("inner_product: representation mismatch");
  const double w = f.representation == Representation::position ? f.grid.cell_volume() : f.grid.dual_cell_volume();
  return w * (f.values * g.values.conjugate()).sum();
}

bool on_frequency_lattice(const Grid& g, const Eigen::VectorXd& v, double tol) {
  for (Eigen::Index a = 0; a < v.size(); ++a) {
    const double k = v[a] / g.dual_spacing();
    if (std::abs(k - std::round(k)) > tol) return false;
  }
  return true;
}

void check_probe(const Grid& g, const ProbeSpec& p) {
  if (p.center.size() != g.dim) throw InvalidInput("probe.center has wrong dimension");
  if (p.velocity.size() != 0 && p.velocity.size() != g.dim) throw InvalidInput("probe.velocity has wrong dimension");
  if (!(p.band_radius > 0)) throw InvalidInput("probe.band_radius must be positive");
  if (p.smoothness_order < 2) throw InvalidInput("probe.smoothness_order must be >= 2");
  if (!(p.amplitude > 0)) throw InvalidInput("probe.amplitude must be positive");
  if (!(p.dilation >= 0)) throw InvalidInput("probe.dilation must be >= 0");
  const double vnorm = p.velocity.size() ? p.velocity.norm() : 0.0;
  if (p.velocity.size() && !on_frequency_lattice(g, p.velocity))
    throw InvalidInput("probe.velocity is not on the frequency lattice");
  // Each axis has to hold the shifted, dilated band strictly inside [-xi_max, xi_max).
  const double reach = (p.center.norm() + p.band_radius) * (1.0 + p.dilation) + vnorm;
  if (!(reach < g.nyquist())) throw GeometryInfeasible("probe band exceeds the Nyquist frequency");
}

double bump_value(const ProbeSpec& p, const Eigen::VectorXd& xi) {
  const double q = (xi - p.center).squaredNorm() / (p.band_radius * p.band_radius);
  if (q >= 1.0) return 0.0;
  return std::exp(-0.5 * p.smoothness_order / (1.0 - q));
}

namespace {

// Values of the raw bump at (xi - v)/s, scaled by s^{-n}.
Eigen::ArrayXcd bump_samples(const Grid& g, const ProbeSpec& p, double s, const Eigen::VectorXd& v) {
  std::vector<Eigen::ArrayXd> comp;
  for (int a = 0; a < g.dim; ++a) comp.push_back(g.frequency_component(a));
  Eigen::ArrayXcd out(g.size());
  Eigen::VectorXd xi(g.dim);
  const double scale = std::pow(s, -g.dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim; ++a) xi[a] = (comp[a][i] - (v.size() ? v[a] : 0.0)) / s;
    out[i] = scale * bump_value(p, xi);
  }
  return out;
}

double bump_normalization(const Grid& g, const ProbeSpec& p) {
  const Eigen::ArrayXcd raw = bump_samples(g, p, 1.0, Eigen::VectorXd());
  const double nrm = std::sqrt(g.dual_cell_volume() * raw.abs2().sum());
  if (!(nrm > 0)) throw GeometryInfeasible("probe band contains no lattice node");
  return p.amplitude / nrm;
}

}  // namespace

Field make_band_limited_profile(const Grid& g, const ProbeSpec& p) {
  ProbeSpec base = p;
  base.velocity = Eigen::VectorXd();
  base.dilation = 0.0;
  check_probe(g, base);
  Field spec{g, Representation::frequency, bump_samples(g, p, 1.0, Eigen::VectorXd()) * bump_normalization(g, p),
             "profile"};
  return inverse_fourier(spec);
}

Field probe_spectrum(const Grid& g, const ProbeSpec& p) {
  check_probe(g, p);
  const double c = bump_normalization(g, p);
  return Field{g, Representation::frequency, bump_samples(g, p, 1.0 + p.dilation, p.velocity) * c, "probe"};
}

Field modulate(const Field& f, const Eigen::VectorXd& v) {
  const Grid& g = f.grid;
  if (v.size() != g.dim) throw InvalidInput("modulate: velocity has wrong dimension");
  if (!on_frequency_lattice(g, v)) throw InvalidInput("modulate: velocity is not on the frequency lattice");
  Field spec = to_frequency(f);
  // Mass that would be carried across the Nyquist boundary by the shift.
  double wrapped = 0.0, total = spec.values.abs2().sum();
  for (int a = 0; a < g.dim; ++a) {
    const Eigen::ArrayXd c = g.frequency_component(a) + v[a];
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (c[i] >= g.nyquist() - 1e-12 || c[i] < -g.nyquist() - 1e-12) wrapped += std::norm(spec.values[i]);
  }
  if (wrapped > 1e-24 * total) throw GeometryInfeasible("modulate: shifted band aliases past the Nyquist frequency");

  Field pos = to_position(f);
  Eigen::ArrayXd phase = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) phase += v[a] * g.position_component(a);
  pos.values *= (cplx(0, 1) * phase.cast<cplx>()).exp();
  pos.label = f.label;
  return f.representation == Representation::position ? pos : fourier(pos);
}

Field dilate(const Field& f, double lambda) {
  if (!(lambda >= 0)) throw InvalidInput("dilate: lambda must be >= 0");
  const Grid& g = f.grid;
  if (lambda == 0.0) return f;
  const double s = 1.0 + lambda;
  Field spec = to_frequency(f);
  const Eigen::ArrayXd r = g.frequency_norm();
  const double total = spec.values.abs2().sum();
  double outside = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (s * r[i] >= g.nyquist()) outside += std::norm(spec.values[i]);
  if (outside > 1e-20 * total) throw GeometryInfeasible("dilate: dilated band exceeds the Nyquist frequency");

  // Trigonometric interpolation at s*x_j along each axis; points leaving the box get 0.
  const Eigen::Index m = g.points_per_axis;
  const Eigen::ArrayXd x = g.axis_positions(), xi = g.axis_frequencies();
  Eigen::MatrixXcd e(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      const double y = s * x[j];
      e(j, k) = (y >= -g.half_extent && y < g.half_extent)
                    ? std::polar(g.dual_spacing() / std::sqrt(2.0 * pi), y * xi[k])
                    : cplx(0.0);
    }
  Eigen::ArrayXcd v = spec.values;
  std::vector<cplx> line(m);
  for (int a = 0; a < g.dim; ++a) {
    const Eigen::Index st = g.stride(a);
    for (Eigen::Index base = 0; base < g.size(); ++base) {
      if ((base / st) % m != 0) continue;
      Eigen::VectorXcd in(m);
      for (Eigen::Index k = 0; k < m; ++k) in[k] = v[base + k * st];
      const Eigen::VectorXcd out = e * in;
      for (Eigen::Index k = 0; k < m; ++k) v[base + k * st] = out[k];
    }
  }
  Field pos{g, Representation::position, v, f.label};
  return f.representation == Representation::position ? pos : fourier(pos);
}

double spectral_mass_outside(const Field& f, const Eigen::VectorXd& c, double r) {
  const Field spec = to_frequency(f);
  const Grid& g = f.grid;
  Eigen::ArrayXd d2 = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim; ++a) d2 += (g.frequency_component(a) - c[a]).square();
  const Eigen::ArrayXd m = spec.values.abs2();
  const double total = m.sum();
  if (total == 0.0) return 0.0;
  return (d2 > r * r).select(m, 0.0).sum() / total;
}

}  // namespace hfscat
