#include "hfscat/pipeline.hpp"

#include <random>

#include "hfscat/errors.hpp"
#include "hfscat/io.hpp"
#include "hfscat/uniqueness.hpp"

namespace hfscat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> std_of(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<ProbeSpec> dilated(const std::vector<ProbeSpec>& probes, double lambda) {
  std::vector<ProbeSpec> out = probes;
  for (auto& p : out) p.dilation = lambda;
  return out;
}

std::vector<ProfileFamily> families(const RunConfig& c) {
  const Grid g = c.grid();
  std::vector<ProfileFamily> out;
  for (const auto& p : c.probes) out.push_back(probe_family(g, p));
  return out;
}

KernelMatrix kernel_of(const RunConfig& c, KernelKind kind, const LambdaGrid& l, const XiShells& xi) {
  const auto fam = families(c);
  const std::size_t j = static_cast<std::size_t>(c.kernel.orbital);
  TimeQuadrature q = c.kernel.time;
  q.threads = c.threads;
  switch (kind) {
    case KernelKind::G:
      return kernel_G(fam[j], l, xi, q);
    case KernelKind::H:
      return kernel_H(fam, j, l, xi, q);
    case KernelKind::HF:
      return kernel_HF(fam, j, l, xi, q);
  }
  throw InvalidInput("unknown kernel kind");
}

void finish(const RunConfig& c, const fs::path& out, const std::string& command) {
  io::write_manifest(out, config_hash(c), command);
}

json read_json(const fs::path& p) {
  try {
    return json::parse(io::read_text(p));
  } catch (const json::exception& e) {
    throw InvalidInput(p.string() + ": " + e.what());
  }
}

}  // namespace

KernelKind model_kernel(Model m) {
  switch (m) {
    case Model::restricted_hartree:
      return KernelKind::G;
    case Model::hartree:
      return KernelKind::H;
    case Model::hartree_fock:
      return KernelKind::HF;
  }
  return KernelKind::G;
}

ScatterOptions scatter_options(const RunConfig& c, double lambda) {
  ScatterOptions o;
  // Dilated probes disperse (1 + lambda) times faster; keep a whole number of steps.
  o.horizon = c.scattering.dt * std::max(1.0, std::round(c.scattering.horizon / (1.0 + lambda) / c.scattering.dt));
  o.dt = c.scattering.dt;
  o.evolve.norm_tol = c.scattering.norm_tol;
  o.evolve.wrap_tol = c.scattering.wrap_tol;
  return o;
}

ForwardData forward_pairings(const RunConfig& c) {
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  const std::size_t j = static_cast<std::size_t>(c.kernel.orbital);
  ForwardData d;
  d.lambda = make_lambda_grid(c.kernel.lambda_min, c.kernel.lambda_max, c.kernel.lambda_count);
  const int n = static_cast<int>(d.lambda.nodes.size());
  d.pairing.resize(n);
  d.horizon.resize(n);
  d.unitarity.resize(n);
  d.data.resize(n);
  parallel_for(n, c.threads, [&](int i) {
    const double lambda = d.lambda.nodes[i];
    const OrbitalSet f = probe_orbitals(g, dilated(c.probes, lambda), Eigen::VectorXd::Zero(g.dim));
    const ScatterOptions o = scatter_options(c, lambda);
    ScatterResult r = forward_scatter(f, v, c.model, o);
    d.pairing[i] = r.pairing[j];
    d.horizon[i] = o.horizon;
    d.unitarity[i] = r.unitarity_defect;
    d.data[i] = r.pairing[j].real() / std::pow(2 * pi, 0.5 * g.dim);
    if (i == n - 1) d.last = std::move(r.f_plus);
  });
  return d;
}

KernelMatrix build_kernel(const RunConfig& c) {
  const Grid g = c.grid();
  const LambdaGrid l = make_lambda_grid(c.kernel.lambda_min, c.kernel.lambda_max, c.kernel.lambda_count);
  return kernel_of(c, c.kernel.kind, l, radial_shells(g, c.kernel.xi_min, c.kernel.xi_max));
}

Eigen::VectorXd true_spectrum(const RealizedPotential& v, const XiShells& xi) {
  const double norm = std::pow(2 * pi, 0.5 * v.grid.dim);
  Eigen::VectorXd out(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t m = 0; m < xi.size(); ++m) {
    double s = 0;
    for (Eigen::Index i : xi.members[m]) s += v.symbol[i];
    out[static_cast<Eigen::Index>(m)] = s / static_cast<double>(xi.members[m].size()) / norm;
  }
  return out;
}

std::vector<bool> resolvable_band(const KernelMatrix& k, const RealizedPotential& v, double rank_tol) {
  const Eigen::VectorXd cn = (k.lambda.weights.asDiagonal() * k.entries.cwiseAbs2()).colwise().sum().cwiseSqrt();
  const double top = cn.maxCoeff();
  std::vector<bool> band(k.xi.size());
  for (std::size_t m = 0; m < k.xi.size(); ++m) {
    bool open = true;
    for (Eigen::Index i : k.xi.members[m]) open = open && v.filter[i] == 1.0;
    band[m] = open && cn[static_cast<Eigen::Index>(m)] >= std::sqrt(rank_tol) * top;
  }
  return band;
}

double band_error(const Eigen::VectorXd& est, const Eigen::VectorXd& truth, const Eigen::VectorXd& w,
                  const std::vector<bool>& band) {
  double num = 0, den = 0;
  for (Eigen::Index m = 0; m < truth.size(); ++m)
    if (band[static_cast<std::size_t>(m)]) {
      num += w[m] * (est[m] - truth[m]) * (est[m] - truth[m]);
      den += w[m] * truth[m] * truth[m];
    }
  if (!(den > 0)) throw InvalidInput("empty comparison band");
  return std::sqrt(num / den);
}

double reference_pairing(const RunConfig& c) {
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  double reach = 0;
  for (const auto& p : c.probes) reach = std::max(reach, p.center.norm() + p.band_radius);
  const double lo = std::max(c.potential.spectral_floor_low, 0.5 * g.dual_spacing());
  const double hi = std::min(2 * reach, g.nyquist() - g.dual_spacing());
  LambdaGrid l;
  l.nodes = Eigen::VectorXd::Zero(1);
  l.weights = Eigen::VectorXd::Ones(1);
  const KernelMatrix k = kernel_of(c, model_kernel(c.model), l, radial_shells(g, lo, hi));
  if (!k.dropped_radii.empty()) throw NumericalFailure("reference integral: time tails did not converge");
  return std::pow(2 * pi, 0.5 * g.dim) * forward_map(true_spectrum(v, k.xi), k)[0];
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& p, double level, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const double sigma = level * p.cwiseAbs().maxCoeff();
  Eigen::VectorXd out = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] += sigma * n01(rng);
  return out;
}

void run_forward(const RunConfig& c, const fs::path& out) {
  const std::string hash = config_hash(c);
  const ForwardData d = forward_pairings(c);
  std::vector<double> re, im;
  for (const auto& z : d.pairing) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  const json j = {{"format", "data"},
                  {"model", model_name(c.model)},
                  {"orbital", c.kernel.orbital},
                  {"lambda", std_of(d.lambda.nodes)},
                  {"lambda_weights", std_of(d.lambda.weights)},
                  {"horizon", d.horizon},
                  {"pairing_re", re},
                  {"pairing_im", im},
                  {"data", std_of(d.data)},
                  {"unitarity_defect", d.unitarity},
                  {"normalization", "data = Re pairing / (2pi)^(n/2)"},
                  {"config_hash", hash}};
  io::write_text(out / "data.json", j.dump(2) + "\n");
  io::Csv csv({"lambda", "weight", "horizon", "pairing_re", "pairing_im", "data", "unitarity_defect"}, hash);
  for (Eigen::Index i = 0; i < d.data.size(); ++i)
    csv.row(std::vector<double>{d.lambda.nodes[i], d.lambda.weights[i], d.horizon[i], re[i], im[i], d.data[i],
                                d.unitarity[i]});
  io::write_text(out / "data.csv", csv.str());
  io::write_checkpoint(out / "checkpoint", d.last, c.model, to_json(c)["potential"], c.scattering.dt, hash);
  finish(c, out, "forward");
}

void run_kernel(const RunConfig& c, const fs::path& out) {
  const std::string hash = config_hash(c);
  const KernelMatrix k = build_kernel(c);
  const json prov = {{"xi_min", c.kernel.xi_min}, {"xi_max", c.kernel.xi_max}, {"time", to_json(c)["kernel"]["time"]}};
  io::write_kernel(out / "kernel", k, c.grid(), prov, hash);
  io::Csv csv({"lambda", "weight", "source", "step", "window"}, hash);
  for (Eigen::Index i = 0; i < k.lambda.nodes.size(); ++i)
    csv.row(std::vector<std::string>{io::fmt(k.lambda.nodes[i]), io::fmt(k.lambda.weights[i]), k.row_source[i],
                                     io::fmt(k.row_step[i]), io::fmt(k.row_window[i])});
  io::write_text(out / "kernel_rows.csv", csv.str());
  finish(c, out, "kernel");
}

void run_invert(const RunConfig& c, const fs::path& out, const std::string& reg_override) {
  const std::string hash = config_hash(c);
  if (!fs::exists(out / "kernel.json") || !fs::exists(out / "data.json"))
    throw InvalidInput("invert needs kernel.json and data.json in " + out.string() + "; run kernel and forward first");
  Grid kg;
  const KernelMatrix k = io::read_kernel(out / "kernel", &kg);
  const json dj = read_json(out / "data.json");
  const auto lam = dj.at("lambda").get<std::vector<double>>();
  const auto dat = dj.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(lam.size()) != k.lambda.nodes.size()) throw InvalidInput("data and kernel lambda grids differ");
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (std::abs(lam[i] - k.lambda.nodes[static_cast<Eigen::Index>(i)]) > 1e-12)
      throw InvalidInput("data and kernel lambda grids differ");
  const Eigen::VectorXd clean = Eigen::Map<const Eigen::VectorXd>(dat.data(), static_cast<Eigen::Index>(dat.size()));
  const Eigen::VectorXd p = c.inversion.noise_level > 0 ? add_noise(clean, c.inversion.noise_level, c.seed) : clean;

  const SingularSystem<double> s = singular_system(k, c.inversion.rank_tol);
  Regularization reg = parse_regularization(reg_override.empty() ? c.inversion.regularization : reg_override);
  reg.noise_estimate = c.inversion.noise_level * clean.cwiseAbs().maxCoeff() * std::sqrt(k.lambda.weights.sum());
  const ReconstructionResult<double> r = reconstruct<double>(p, s, reg);

  const RealizedPotential v = realize_potential(c.potential, kg);
  const Eigen::VectorXd truth = true_spectrum(v, k.xi);
  const Eigen::VectorXd xw = k.xi.weight_vector(), xr = k.xi.radius_vector();
  const std::vector<bool> band = resolvable_band(k, v, c.inversion.rank_tol);
  const std::vector<bool> all(k.xi.size(), true);
  const Eigen::VectorXd target = range_component<double>(truth, s, r.truncation_index);
  double band_lo = 0, band_hi = 0;
  int band_count = 0;
  for (std::size_t m = 0; m < band.size(); ++m)
    if (band[m]) {
      if (!band_count++) band_lo = k.xi.radii[m];
      band_hi = k.xi.radii[m];
    }

  const json j = {
      {"format", "reconstruction"},
      {"regularization", reg_method_name(reg.method)},
      {"truncation", reg.truncation},
      {"tau", reg.tau},
      {"alpha", reg.alpha},
      {"noise_level", c.inversion.noise_level},
      {"noise_estimate", reg.noise_estimate},
      {"seed", c.seed},
      {"rank_tol", s.rank_tol},
      {"numerical_rank", s.numerical_rank},
      {"svd", s.algorithm},
      {"truncation_index", r.truncation_index},
      {"residual", r.residual},
      {"residual_history", std_of(r.residual_history)},
      {"mu", std_of(s.mu)},
      {"picard_divergence", r.picard.divergence_flag},
      {"null_component", r.picard.null_component},
      {"band", {{"xi_min", band_lo}, {"xi_max", band_hi}, {"shells", band_count}}},
      {"error_band", band_count ? band_error(r.v_hat, truth, xw, band) : -1.0},
      {"error_all", band_error(r.v_hat, truth, xw, all)},
      {"error_range_component", band_error(r.v_hat, target, xw, all)},
      {"config_hash", hash}};
  io::write_text(out / "reconstruction.json", j.dump(2) + "\n");

  io::Csv rc({"xi", "weight", "v_hat_true", "v_hat_est", "in_band"}, hash);
  for (Eigen::Index m = 0; m < xr.size(); ++m)
    rc.row(std::vector<double>{xr[m], xw[m], truth[m], r.v_hat[m], band[static_cast<std::size_t>(m)] ? 1.0 : 0.0});
  io::write_text(out / "reconstruction.csv", rc.str());

  io::Csv pc({"n", "mu", "coefficient", "ratio", "partial_sum", "residual"}, hash);
  for (Eigen::Index n = 0; n < s.mu.size(); ++n) {
    const bool in = n < s.numerical_rank;
    pc.row(std::vector<double>{static_cast<double>(n + 1), s.mu[n], r.picard.coefficients[n],
                               in ? r.picard.ratios[n] : 0.0, in ? r.picard.partial_sums[n] : 0.0,
                               in ? r.residual_history[n + 1] : r.residual_history[s.numerical_rank]});
  }
  io::write_text(out / "picard.csv", pc.str());

  Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(65, 0.0, c.potential.cutoff_radius);
  const Eigen::VectorXd ve = fourier_to_potential(kg.dim, xr, xw, r.v_hat, radii);
  const Eigen::VectorXd vt = fourier_to_potential(kg.dim, xr, xw, truth, radii);
  io::Csv vc({"r", "v_from_true_shells", "v_est"}, hash);
  for (Eigen::Index i = 0; i < radii.size(); ++i) vc.row(std::vector<double>{radii[i], vt[i], ve[i]});
  io::write_text(out / "potential.csv", vc.str());
  finish(c, out, "invert");
}

void run_pairing_sweep(const RunConfig& c, const fs::path& out) {
  const std::string hash = config_hash(c);
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  const std::size_t j = static_cast<std::size_t>(c.scattering.orbital);
  const ScatterOptions o = scatter_options(c);
  const double ref = reference_pairing(c);
  json summary = {{"format", "pairing_sweep"}, {"reference", ref}, {"orbital", c.scattering.orbital}};
  if (!c.scattering.velocities.empty()) {
    std::vector<double> speeds;
    for (double s : c.scattering.velocities) speeds.push_back(s * g.dual_spacing());
    const SweepTable t = high_velocity_sweep(g, c.probes, j, v, c.model, speeds, o, ref);
    io::Csv csv({"speed", "pairing_re", "pairing_im", "remainder", "slope_so_far"}, hash);
    for (const auto& r : t.rows)
      csv.row(std::vector<double>{r.abscissa, r.pairing.real(), r.pairing.imag(), r.remainder, r.slope_so_far});
    io::write_text(out / "velocity_sweep.csv", csv.str());
    summary["velocity"] = {{"slope", t.slope}, {"flagged", t.flagged}, {"note", t.note}, {"rows", t.rows.size()}};
  }
  if (!c.scattering.amplitudes.empty()) {
    const SweepTable t = small_amplitude_sweep(g, c.probes, j, v, c.model, c.scattering.amplitudes, o);
    io::Csv csv({"amplitude", "scaled_re", "scaled_im"}, hash);
    for (const auto& r : t.rows) csv.row(std::vector<double>{r.abscissa, r.pairing.real(), r.pairing.imag()});
    io::write_text(out / "amplitude_sweep.csv", csv.str());
    summary["amplitude"] = {{"extrapolated_re", t.extrapolated.real()},
                            {"extrapolated_im", t.extrapolated.imag()},
                            {"flagged", t.flagged},
                            {"note", t.note},
                            {"rows", t.rows.size()}};
  }
  summary["config_hash"] = hash;
  io::write_text(out / "pairing_sweep.json", summary.dump(2) + "\n");
  finish(c, out, "pairing-sweep");
}

void run_uniqueness(const RunConfig& c, const fs::path& out) {
  const std::string hash = config_hash(c);
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  const double norm = std::pow(2 * pi, 0.5 * g.dim);
  const Eigen::ArrayXd v1 = v.symbol / norm;
  const auto& pt = c.uniqueness.perturbation;
  const Eigen::ArrayXd r = g.frequency_norm();
  const Eigen::ArrayXd v2 =
      pt.scale * v1 + pt.amplitude * v1.abs().maxCoeff() * (-(r - pt.center).square() / (2 * pt.width * pt.width)).exp();
  const auto targets = target_sweep(g.dim, c.uniqueness.sweep_step, c.uniqueness.sweep_reach);
  const Verdict vd = distinguish(g, v1, v2, c.uniqueness.window, targets, c.uniqueness.tol);

  const LocalizationWindow w0 = localization_window(g, c.uniqueness.window, targets.front());
  const auto times = simpson_times(w0.time_window, c.uniqueness.window.t_samples);
  const OrthogonalityReport g1 = verify_g1_orthogonality(g, w0.probes, times);
  double g2 = 0;
  const int ref = c.uniqueness.window.reference;
  for (int k = 0; k < static_cast<int>(w0.probes.size()); ++k)
    if (k != ref) g2 = std::max(g2, verify_g2_support(g, w0.probes[k], w0.probes[ref], times));

  json j = {{"format", "verdict"},
            {"result", vd.distinguished ? "distinguished" : "identical_within_tol"},
            {"tol", c.uniqueness.tol},
            {"targets", vd.targets.size()},
            {"g1_defect", g1.defect},
            {"g1_defect_off_origin", g1.defect_off_origin},
            {"g2_outside_mass", g2},
            {"window_mass_inside", w0.mass_inside},
            {"time_window", w0.time_window},
            {"config_hash", hash}};
  if (vd.ball) j["ball"] = std_of(*vd.ball);
  io::write_text(out / "verdict.json", j.dump(2) + "\n");
  io::Csv csv({"target", "integral", "threshold"}, hash);
  for (std::size_t i = 0; i < vd.targets.size(); ++i)
    csv.row(std::vector<double>{vd.targets[i].norm(), vd.integrals[i], vd.thresholds[i]});
  io::write_text(out / "verdict.csv", csv.str());
  finish(c, out, "uniqueness");
}

}  // namespace hfscat
