#include "hfscat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "hfscat/propagator.hpp"

namespace hfscat {

Field density_spectrum(const Field& phi, double t) {
  Field u = to_position(free_propagate(phi, t));
  u.values = u.values.abs2().cast<cplx>();
  return fourier(u);
}

Field pair_spectrum(const Field& a, const Field& b, double t) {
  if (!(a.grid == b.grid)) throw InvalidInput("pair_spectrum: grid mismatch");
  Field u = to_position(free_propagate(a, t));
  const Field w = to_position(free_propagate(b, t));
  u.values *= w.values.conjugate();
  return fourier(u);
}

Eigen::VectorXd XiShells::radius_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(radii.data(), static_cast<Eigen::Index>(radii.size()));
}
Eigen::VectorXd XiShells::weight_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

XiShells radial_shells(const Grid& g, double xi_min, double xi_max) {
  if (!(xi_max > xi_min) || !(xi_min >= 0)) throw InvalidInput("xi range must satisfy 0 <= xi_min < xi_max");
  const double d = g.dual_spacing();
  const Eigen::ArrayXd r = g.frequency_norm();
  std::map<long, std::vector<Eigen::Index>> shells;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (r[i] == 0.0) continue;
    const long m = std::lround(r[i] / d);
    if (m == 0) continue;
    const double rm = m * d;
    if (rm < xi_min - 1e-12 || rm > xi_max + 1e-12) continue;
    shells[m].push_back(i);
  }
  XiShells out;
  for (auto& [m, nodes] : shells) {
    out.radii.push_back(m * d);
    out.weights.push_back(nodes.size() * g.dual_cell_volume());
    out.members.push_back(std::move(nodes));
  }
  if (out.radii.empty()) throw GeometryInfeasible("xi range contains no lattice shell");
  return out;
}

LambdaGrid make_lambda_grid(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo) || !(lo >= 0)) throw InvalidInput("lambda grid needs count >= 2 and 0 <= min < max");
  LambdaGrid l;
  l.nodes = Eigen::VectorXd::LinSpaced(count, lo, hi);
  const double h = (hi - lo) / (count - 1);
  l.weights = Eigen::VectorXd::Constant(count, h);
  l.weights[0] = l.weights[count - 1] = 0.5 * h;
  return l;
}

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::G: return "G";
    case KernelKind::H: return "H";
    case KernelKind::HF: return "HF";
  }
  return "G";
}

ProfileFamily probe_family(const Grid& g, const ProbeSpec& probe) {
  return [g, probe](double lambda) {
    ProbeSpec p = probe;
    p.dilation = lambda;
    p.velocity = Eigen::VectorXd();
    return probe_spectrum(g, p);
  };
}

ProfileFamily field_family(const Field& phi) {
  return [phi](double lambda) { return to_frequency(dilate(phi, lambda)); };
}

namespace {

double band_reach(const Field& spec) {
  const Eigen::ArrayXd m = spec.values.abs2();
  const double top = m.maxCoeff();
  const Eigen::ArrayXd r = spec.grid.frequency_norm();
  double reach = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m[i] > 1e-24 * top) reach = std::max(reach, r[i]);
  return reach;
}

}  // namespace

NodeIntegrals node_integrals(Integrand kind, const std::vector<Field>& spectra, std::size_t j,
                             const std::vector<Eigen::Index>& nodes, const TimeQuadrature& quad) {
  if (spectra.empty() || j >= spectra.size()) throw InvalidInput("orbital index out of range");
  const Grid& g = spectra[0].grid;
  const std::size_t n = spectra.size(), q = nodes.size();
  std::vector<Eigen::ArrayXcd> phi;
  double reach = 0.0;
  for (const auto& s : spectra) {
    if (!(s.grid == g)) throw InvalidInput("kernel profiles live on different grids");
    phi.push_back(to_frequency(s).values);
    reach = std::max(reach, band_reach(to_frequency(s)));
  }
  std::vector<double> cap(q);
  double xi_top = 0.0;
  {
    std::vector<Eigen::ArrayXd> comp;
    for (int a = 0; a < g.dim; ++a) comp.push_back(g.frequency_component(a).abs());
    for (std::size_t k = 0; k < q; ++k) {
      double m = 0.0, r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        m = std::max(m, comp[a][nodes[k]]);
        r2 += comp[a][nodes[k]] * comp[a][nodes[k]];
      }
      xi_top = std::max(xi_top, std::sqrt(r2));
      cap[k] = m > 0 ? quad.revival_fraction * 2.0 * g.half_extent / m : 1e300;
    }
  }
  double tau = quad.step;
  if (!(tau > 0)) tau = quad.step_factor / std::max(2.0 * xi_top * reach, 1e-3);
  const long k0 = std::max(1L, static_cast<long>(std::ceil(quad.initial_window / (2.0 * tau))));
  tau = quad.initial_window / (2.0 * k0);

  // Integrand at time t for every node.
  std::vector<Eigen::ArrayXcd> rho(n), u(n);
  const auto integrand = [&](double t, Eigen::ArrayXcd& out) {
    const Eigen::ArrayXcd mult = free_multiplier(g, t);
    for (std::size_t k = 0; k < n; ++k) {
      if (kind == Integrand::G && k != j) continue;
      u[k] = phi[k] * mult;
      inverse_transform(g, u[k]);
    }
    if (kind != Integrand::exchange)
      for (std::size_t k = 0; k < n; ++k) {
        if (kind == Integrand::G && k != j) continue;
        rho[k] = u[k].abs2().cast<cplx>();
        forward_transform(g, rho[k]);
      }
    // Entries q..2q-1 carry the summed moduli of the individual terms.
    out.setZero(2 * q);
    for (std::size_t a = 0; a < q; ++a) {
      const Eigen::Index i = nodes[a];
      if (kind == Integrand::G) {
        out[a] = std::norm(rho[j][i]);
        out[q + a] = out[a];
      } else if (kind != Integrand::exchange) {
        for (std::size_t k = 0; k < n; ++k)
          if (kind == Integrand::HF || k != j) {
            const cplx e = rho[k][i] * std::conj(rho[j][i]);
            out[a] += e;
            out[q + a] += std::abs(e);
          }
      }
    }
    if (kind == Integrand::HF || kind == Integrand::exchange) {
      for (std::size_t k = 0; k < n; ++k) {
        Eigen::ArrayXcd p = u[j] * u[k].conjugate();
        forward_transform(g, p);
        for (std::size_t a = 0; a < q; ++a) {
          const double e = std::norm(p[nodes[a]]);
          out[a] += kind == Integrand::HF ? -e : e;
          out[q + a] += e;
        }
      }
    }
  };

  NodeIntegrals res;
  res.nodes = nodes;
  res.values = Eigen::ArrayXcd::Zero(q);
  res.converged.assign(q, false);
  res.windows.assign(q, 0.0);
  res.step = tau;
  std::vector<bool> active(q, true);
  Eigen::ArrayXcd acc(q), prev(q), fp, fm;
  integrand(0.0, fp);
  acc = 2.0 * fp;  // Simpson on [0,T] for f(t) and f(-t)
  long i = 0;  // last time index folded into acc
  std::size_t remaining = q;
  for (int d = 0; d <= quad.max_doublings && remaining > 0; ++d) {
    const long end = 2 * k0 * (1L << d);
    Eigen::ArrayXcd last;
    for (long k = i + 1; k <= end; ++k) {
      integrand(k * tau, fp);
      integrand(-k * tau, fm);
      if (k == end)
        last = fp + fm;
      else
        acc += (k % 2 ? 4.0 : 2.0) * (fp + fm);
    }
    i = end;
    const Eigen::ArrayXcd s = tau / 3.0 * (acc + last);
    acc += 2.0 * last;
    const double window = end * tau;
    double scale = 0.0;
    for (std::size_t a = 0; a < q; ++a) scale = std::max(scale, std::abs(s[q + a]));
    for (std::size_t a = 0; a < q; ++a) {
      if (!active[a]) continue;
      if (d > 0 && std::abs(s[a] - prev[a]) <= quad.tail_tol * std::abs(s[a]) + 1e-14 * scale) {
        res.values[a] = s[a];
        res.converged[a] = true;
        res.windows[a] = window;
        active[a] = false;
        --remaining;
      } else if (window > cap[a]) {
        res.values[a] = s[a];
        res.windows[a] = window;
        active[a] = false;
        --remaining;
      }
    }
    prev = s;
    res.window = window;
  }
  for (std::size_t a = 0; a < q; ++a)
    if (active[a]) {
      res.values[a] = prev[a];
      res.windows[a] = res.window;
    }
  res.magnitude = prev.tail(q).real();
  return res;
}

namespace {

struct RowResult {
  Eigen::VectorXcd shell_values;
  std::vector<bool> shell_ok;
  double step = 0.0, window = 0.0, magnitude = 0.0;
};

RowResult compute_row(Integrand kind, const std::vector<Field>& spectra, std::size_t j, const XiShells& xi,
                      const TimeQuadrature& quad) {
  std::vector<Eigen::Index> nodes;
  for (const auto& m : xi.members) nodes.insert(nodes.end(), m.begin(), m.end());
  const NodeIntegrals ni = node_integrals(kind, spectra, j, nodes, quad);
  RowResult r;
  r.shell_values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(xi.size()));
  r.shell_ok.assign(xi.size(), true);
  r.step = ni.step;
  r.window = ni.window;
  r.magnitude = ni.magnitude.maxCoeff();
  std::size_t pos = 0;
  for (std::size_t s = 0; s < xi.size(); ++s) {
    cplx sum = 0;
    for (std::size_t k = 0; k < xi.members[s].size(); ++k, ++pos) {
      sum += ni.values[static_cast<Eigen::Index>(pos)];
      if (!ni.converged[pos]) r.shell_ok[s] = false;
    }
    r.shell_values[static_cast<Eigen::Index>(s)] = sum / static_cast<double>(xi.members[s].size());
  }
  return r;
}

// Lattice index of xi/s, or -1 when xi/s is off the lattice.
Eigen::Index scaled_node(const Grid& g, Eigen::Index node, double s) {
  const Eigen::Index m = g.points_per_axis;
  Eigen::Index rest = node, target = 0;
  for (int a = g.dim - 1; a >= 0; --a) {
    const double k = static_cast<double>(rest % m) - m / 2;
    rest /= m;
    const double ks = k / s;
    if (std::abs(ks - std::round(ks)) > 1e-9) return -1;
    target += (static_cast<Eigen::Index>(std::llround(ks)) + m / 2) * g.stride(a);
  }
  return target;
}

// Scaled lambda = 0 row when every xi/s is a lattice node already computed.
bool scaled_row(const Grid& g, const XiShells& xi, const std::map<Eigen::Index, double>& base, double s,
                Eigen::VectorXcd& out) {
  out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t sh = 0; sh < xi.size(); ++sh) {
    double sum = 0.0;
    for (Eigen::Index node : xi.members[sh]) {
      const Eigen::Index target = scaled_node(g, node, s);
      const auto it = target < 0 ? base.end() : base.find(target);
      if (it == base.end()) return false;
      sum += it->second;
    }
    out[static_cast<Eigen::Index>(sh)] = std::pow(s, -(2.0 * g.dim + 2.0)) * sum / xi.members[sh].size();
  }
  return true;
}

KernelMatrix assemble(Integrand kind, KernelKind label, const std::vector<ProfileFamily>& probes, std::size_t j,
                      const LambdaGrid& lambda, const XiShells& xi, const TimeQuadrature& quad) {
  if (j >= probes.size()) throw InvalidInput("orbital index out of range");
  const Eigen::Index rows = lambda.nodes.size(), cols = static_cast<Eigen::Index>(xi.size());
  KernelMatrix k;
  k.kind = label;
  k.orbital = static_cast<int>(j);
  k.convention = label == KernelKind::H    ? "sum over k != j"
                 : label == KernelKind::HF ? "sum over all k, minus exchange over all k"
                                           : "single profile";
  k.lambda = lambda;
  k.row_source.assign(rows, "recomputed");
  k.row_step.assign(rows, 0.0);
  k.row_window.assign(rows, 0.0);
  Eigen::MatrixXcd vals(rows, cols);
  std::vector<std::vector<bool>> ok(rows);
  std::vector<double> magnitude(rows, 0.0);

  // Single-profile kernels can reuse the lambda = 0 node values through the scaling identity.
  std::map<Eigen::Index, double> base;
  std::vector<bool> done(rows, false);
  if (kind == Integrand::G && quad.allow_scaling && rows > 0 && lambda.nodes[0] == 0.0) {
    const Field s0 = probes[j](0.0);
    const Grid& g = s0.grid;
    std::set<Eigen::Index> wanted;
    for (const auto& m : xi.members) wanted.insert(m.begin(), m.end());
    for (Eigen::Index r = 1; r < rows; ++r) {
      std::vector<Eigen::Index> images;
      for (const auto& m : xi.members)
        for (Eigen::Index node : m) images.push_back(scaled_node(g, node, 1.0 + lambda.nodes[r]));
      if (std::find(images.begin(), images.end(), Eigen::Index(-1)) == images.end())
        wanted.insert(images.begin(), images.end());
    }
    const std::vector<Eigen::Index> nodes(wanted.begin(), wanted.end());
    const NodeIntegrals ni = node_integrals(kind, {s0}, 0, nodes, quad);
    for (std::size_t a = 0; a < nodes.size(); ++a)
      if (ni.converged[a]) base[nodes[a]] = ni.values[static_cast<Eigen::Index>(a)].real();
    for (Eigen::Index r = 1; r < rows; ++r) {
      Eigen::VectorXcd row;
      if (scaled_row(g, xi, base, 1.0 + lambda.nodes[r], row)) {
        vals.row(r) = row.transpose();
        ok[r].assign(xi.size(), true);
        k.row_source[r] = "scaled";
        done[r] = true;
      }
    }
  }

  std::vector<Eigen::Index> todo;
  for (Eigen::Index r = 0; r < rows; ++r)
    if (!done[r]) todo.push_back(r);
  const auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t t = begin; t < todo.size(); t += stride) {
      const Eigen::Index r = todo[t];
      std::vector<Field> spectra;
      for (const auto& p : probes) spectra.push_back(p(lambda.nodes[r]));
      const RowResult rr = compute_row(kind, spectra, kind == Integrand::G ? 0 : j, xi, quad);
      vals.row(r) = rr.shell_values.transpose();
      ok[r] = rr.shell_ok;
      k.row_step[r] = rr.step;
      k.row_window[r] = rr.window;
      magnitude[r] = rr.magnitude;
    }
  };
  const int threads = std::max(1, quad.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < cols; ++c) {
    bool good = true;
    for (Eigen::Index r = 0; r < rows; ++r) good = good && ok[r][c];
    if (good)
      keep.push_back(c);
    else
      k.dropped_radii.push_back(xi.radii[c]);
  }
  for (Eigen::Index c : keep) {
    k.xi.radii.push_back(xi.radii[c]);
    k.xi.weights.push_back(xi.weights[c]);
    k.xi.members.push_back(xi.members[c]);
  }
  k.entries.resize(rows, static_cast<Eigen::Index>(keep.size()));
  double re = 0.0, im = 0.0;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    k.entries.col(static_cast<Eigen::Index>(c)) = vals.col(keep[c]).real();
    re = std::max(re, vals.col(keep[c]).real().cwiseAbs().maxCoeff());
    im = std::max(im, vals.col(keep[c]).imag().cwiseAbs().maxCoeff());
  }
  for (double m : magnitude) re = std::max(re, m);
  k.max_imag_residue = re > 0 ? im / re : im;
  if (k.max_imag_residue > 1e-10) throw NumericalFailure("kernel entries keep an imaginary residue above 1e-10");
  if (keep.empty()) throw NumericalFailure("every xi shell failed the time-tail test");
  if (rows >= 2) k.lipschitz = lipschitz_constant(k);
  return k;
}

}  // namespace

KernelMatrix kernel_G(const ProfileFamily& phi, const LambdaGrid& lambda, const XiShells& xi, const TimeQuadrature& quad) {
  return assemble(Integrand::G, KernelKind::G, {phi}, 0, lambda, xi, quad);
}

KernelMatrix kernel_H(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                      const XiShells& xi, const TimeQuadrature& quad) {
  TimeQuadrature q = quad;
  q.allow_scaling = false;
  return assemble(Integrand::H, KernelKind::H, probes, j, lambda, xi, q);
}

KernelMatrix kernel_HF(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                       const XiShells& xi, const TimeQuadrature& quad) {
  TimeQuadrature q = quad;
  q.allow_scaling = false;
  return assemble(Integrand::HF, KernelKind::HF, probes, j, lambda, xi, q);
}

KernelMatrix exchange_kernel(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                             const XiShells& xi, const TimeQuadrature& quad) {
  TimeQuadrature q = quad;
  q.allow_scaling = false;
  KernelMatrix k = assemble(Integrand::exchange, KernelKind::HF, probes, j, lambda, xi, q);
  k.convention = "exchange part only";
  return k;
}

Eigen::VectorXd forward_map(const Eigen::VectorXd& v_hat, const KernelMatrix& k) {
  if (v_hat.size() != k.entries.cols()) throw InvalidInput("forward_map: V^ length does not match the xi grid");
  return k.entries * v_hat.cwiseProduct(k.xi.weight_vector());
}

double lipschitz_constant(const KernelMatrix& k) {
  const Eigen::VectorXd w = k.xi.weight_vector();
  double c = 0.0;
  for (Eigen::Index i = 0; i + 1 < k.entries.rows(); ++i) {
    const double dl = k.lambda.nodes[i + 1] - k.lambda.nodes[i];
    c = std::max(c, (k.entries.row(i + 1) - k.entries.row(i)).cwiseAbs().dot(w.transpose()) / dl);
  }
  return c;
}

}  // namespace hfscat
