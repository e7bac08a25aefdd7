#include "hfscat/validation.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "hfscat/config.hpp"
#include "hfscat/errors.hpp"
#include "hfscat/inversion.hpp"
#include "hfscat/io.hpp"
#include "hfscat/pipeline.hpp"
#include "hfscat/propagator.hpp"
#include "hfscat/uniqueness.hpp"

namespace hfscat {

namespace fs = std::filesystem;

namespace {

Check at_most(std::string name, double value, double limit, std::string note = {}) {
  return {std::move(name), value, limit, value <= limit, std::move(note)};
}

Eigen::VectorXd vec(double x) { return Eigen::VectorXd::Constant(1, x); }

ProbeSpec bump(double p, double eps, int k) {
  ProbeSpec q;
  q.center = vec(p);
  q.band_radius = eps;
  q.smoothness_order = k;
  return q;
}

PotentialSpec gaussian_potential(double c, double rv, double taper, bool floor) {
  PotentialSpec v;
  v.amplitude = c;
  v.width = 1.0;
  v.cutoff_radius = rv;
  v.taper_width = taper;
  if (floor) {
    v.spectral_floor_low = 0.4;
    v.spectral_floor_high = 0.7;
  }
  return v;
}

Field gaussian_field(const Grid& g) {
  const Eigen::ArrayXd r = g.position_norm();
  return Field{g, Representation::position, (-0.5 * r.square()).exp().cast<cplx>(), "gauss"};
}

Field packet(const Grid& g, double x0, double k0, double s) {
  const Eigen::ArrayXd x = g.position_component(0);
  Eigen::ArrayXcd v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = std::polar(std::exp(-(x[i] - x0) * (x[i] - x0) / (2 * s * s)), k0 * x[i]);
  return Field{g, Representation::position, v, "packet"};
}

OrbitalSet three_packets(const Grid& g) {
  OrbitalSet s;
  s.orbitals = {packet(g, -1.0, 0.5, 1.0), packet(g, 0.5, -0.3, 0.8), packet(g, 1.5, 0.0, 1.2)};
  return s;
}

double max_diff(const Field& a, const Field& b) { return (to_position(a).values - to_position(b).values).abs().maxCoeff(); }

LambdaGrid rows(double a, double b) {
  LambdaGrid l;
  l.nodes = Eigen::Vector2d(a, b);
  l.weights = Eigen::VectorXd::Ones(2);
  return l;
}

RunConfig acceptance_config() {
  nlohmann::json j = config_template("rh");
  j["scattering"]["velocities"] = {8, 12, 16, 24, 32};
  j["scattering"]["amplitudes"] = {0.3, 0.2, 0.1, 0.05, 0.025};
  return parse_config(j);
}

// 1. Free propagator.
void propagator_checks(CriterionReport& r) {
  const Grid g = make_grid(1, 256, 32);
  const Field f = gaussian_field(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-100, 100);
  double unit = 0, group = 0;
  for (int k = 0; k < 16; ++k) {
    const double s = ut(rng), t = ut(rng);
    const Field a = free_propagate(free_propagate(f, s), t);
    unit = std::max(unit, std::abs(a.norm() - f.norm()) / f.norm());
    group = std::max(group, (a.values - free_propagate(f, s + t).values).abs().maxCoeff());
  }
  const Eigen::ArrayXd x = g.axis_positions();
  double closed = 0;
  for (double t : {-5.0, 0.5, 2.0, 5.0}) {
    const Field u = free_propagate(f, t);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (std::abs(x[i]) <= g.half_extent / 2) closed = std::max(closed, std::abs(u.values[i] - gaussian_free_solution(x[i], t)));
  }
  r.checks.push_back(at_most("unitarity", unit, 1e-12));
  r.checks.push_back(at_most("group law", group, 1e-12));
  r.checks.push_back(at_most("gaussian closed form", closed, 1e-8));
}

// 2. Split-step dynamics.
void dynamics_checks(CriterionReport& r) {
  {
    const Grid g = make_grid(1, 512, 128);
    const RealizedPotential v = realize_potential(gaussian_potential(1.0, 8, 2, false), g);
    for (Model m : {Model::restricted_hartree, Model::hartree, Model::hartree_fock}) {
      OrbitalSet st = three_packets(g);
      if (m == Model::restricted_hartree) st.orbitals.resize(1);
      double drift = 0;
      for (double te : {8.0, -8.0}) {
        EvolveOptions opt;
        opt.norm_tol = 1.0;
        const OrbitalSet out = evolve(st, v, m, 0, te, 0.02, opt);
        for (std::size_t j = 0; j < st.orbitals.size(); ++j)
          drift = std::max(drift, std::abs(out.orbitals[j].norm() - st.orbitals[j].norm()) / st.orbitals[j].norm());
      }
      r.checks.push_back(at_most("norm drift " + model_name(m), drift, 1e-8));
    }
  }
  const Grid g = make_grid(1, 256, 40);
  {
    const RealizedPotential v = realize_potential(gaussian_potential(2.0, 8, 2, false), g);
    for (Model m : {Model::restricted_hartree, Model::hartree, Model::hartree_fock}) {
      OrbitalSet st = three_packets(g);
      if (m == Model::restricted_hartree) st.orbitals.resize(1);
      std::vector<Field> runs;
      for (double dt : {0.1, 0.05, 0.025}) runs.push_back(evolve(st, v, m, 0, 2, dt).orbitals[0]);
      const double order = std::log2(max_diff(runs[0], runs[1]) / max_diff(runs[1], runs[2]));
      r.checks.push_back(at_most("strang order " + model_name(m) + " |p-2|", std::abs(order - 2.0), 0.2,
                                 "order " + io::fmt(order)));
    }
  }
  {
    const RealizedPotential v = realize_potential(gaussian_potential(1.0, 8, 2, false), g);
    const Field u = packet(g, 0.3, 0.4, 1.1);
    OrbitalSet st;
    st.orbitals = {u, u, u};
    double cancel = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const Field h = hartree_term(st, v, Model::hartree_fock, j), f = fock_term(st, v, j);
      cancel = std::max(cancel, (h.values + f.values).abs().maxCoeff() / h.values.abs().maxCoeff());
    }
    r.checks.push_back(at_most("HF identical-orbital cancellation", cancel, 1e-14));
    const OrbitalSet out = evolve(st, v, Model::hartree_fock, 0, 2, 0.01);
    double free = 0;
    for (const auto& o : out.orbitals) free = std::max(free, max_diff(o, free_propagate(u, 2)));
    r.checks.push_back(at_most("HF identical orbitals evolve freely", free, 1e-12));
  }
}

// 3. Four-term decomposition and the boost invariance of L.
void closure_checks(CriterionReport& r) {
  const Grid g = make_grid(1, 512, 64);
  const RealizedPotential v = realize_potential(gaussian_potential(0.02, 6, 2, true), g);
  ScatterOptions o;
  o.horizon = 12;
  o.dt = 0.02;
  const auto a = remainder_decomposition(g, bump(0, 2, 16), v, vec(4 * g.dual_spacing()), o);
  const auto b = remainder_decomposition(g, bump(0, 2, 16), v, vec(12 * g.dual_spacing()), o);
  r.checks.push_back(at_most("closure |v|=4dxi", a.closure_defect, 1e-6));
  r.checks.push_back(at_most("closure |v|=12dxi", b.closure_defect, 1e-6));
  r.checks.push_back(
      at_most("L(v) invariance", std::abs(a.parts.leading - b.parts.leading) / std::abs(a.parts.leading), 1e-6));
}

// 4. Remainder decay along the default velocity sweep.
void high_velocity_checks(CriterionReport& r) {
  const RunConfig c = acceptance_config();
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  const double ref = reference_pairing(c);
  std::vector<double> speeds;
  for (double s : c.scattering.velocities) speeds.push_back(s * g.dual_spacing());
  const SweepTable t = high_velocity_sweep(g, c.probes, 0, v, c.model, speeds, scatter_options(c), ref);
  if (t.flagged) throw NumericalFailure(t.note);
  std::vector<double> xs, ys;
  std::string note = "reference " + io::fmt(ref) + ";";
  const double top = t.rows.back().abscissa;
  for (const auto& row : t.rows) {
    note += " |R(" + io::fmt(row.abscissa / g.dual_spacing()) + "dxi)|=" + io::fmt(row.remainder);
    if (row.abscissa >= top / 10) {
      xs.push_back(row.abscissa);
      ys.push_back(row.remainder);
    }
  }
  r.checks.push_back(at_most("log-log slope of |pairing - int V_hat G|", loglog_slope(xs, ys), -1.8, note));
}

// 5. Small-amplitude limit against the high-velocity limit.
void equivalence_checks(CriterionReport& r) {
  const RunConfig c = acceptance_config();
  const Grid g = c.grid();
  const RealizedPotential v = realize_potential(c.potential, g);
  const double top = c.scattering.velocities.back() * g.dual_spacing();
  const SweepTable hv = high_velocity_sweep(g, c.probes, 0, v, c.model, {top}, scatter_options(c), 0.0);
  const SweepTable sa = small_amplitude_sweep(g, c.probes, 0, v, c.model, c.scattering.amplitudes, scatter_options(c));
  if (hv.flagged || sa.flagged) throw NumericalFailure(hv.note + sa.note);
  const cplx limit = hv.rows.back().pairing;
  r.checks.push_back(at_most("|richardson - pairing(v_max)| / |pairing(v_max)|",
                             std::abs(sa.extrapolated - limit) / std::abs(limit), 0.05,
                             "richardson " + io::fmt(sa.extrapolated.real()) + ", pairing " + io::fmt(limit.real())));
}

// 6. Kernel oracles.
void kernel_checks(CriterionReport& r) {
  TimeQuadrature q;
  {
    const Grid g = make_grid(1, 1024, 64);
    TimeQuadrature fine = q;
    fine.step_factor = 0.5;
    const KernelMatrix k = kernel_G(field_family(gaussian_field(g)), rows(0, 0.25), radial_shells(g, 0.5, 6.0), fine);
    double err = k.dropped_radii.empty() ? 0.0 : INFINITY;
    for (std::size_t m = 0; m < k.xi.size(); ++m) {
      const double x = k.xi.radii[m], exact = 0.5 * std::sqrt(2 * pi) * std::exp(-x * x / 2) / x;
      err = std::max(err, std::abs(k.entries(0, static_cast<Eigen::Index>(m)) - exact) / exact);
    }
    r.checks.push_back(at_most("G gaussian closed form", err, 1e-6));
  }
  {
    const Grid g = make_grid(1, 512, 64);
    const KernelMatrix k = kernel_G(probe_family(g, bump(0, 2, 16)), rows(0, 1), radial_shells(g, 0.2, 4.0), q);
    const double d = g.dual_spacing();
    double err = 0;
    int compared = 0;
    for (std::size_t m = 0; m < k.xi.size(); ++m) {
      const long n = std::lround(k.xi.radii[m] / d);
      if (n % 2) continue;
      for (std::size_t m2 = 0; m2 < k.xi.size(); ++m2)
        if (std::lround(k.xi.radii[m2] / d) == n / 2) {
          const double scaled = std::pow(2.0, -4) * k.entries(0, static_cast<Eigen::Index>(m2));
          if (scaled < 1e-8 * k.entries.maxCoeff()) continue;
          err = std::max(err, std::abs(k.entries(1, static_cast<Eigen::Index>(m)) - scaled) / scaled);
          ++compared;
        }
    }
    r.checks.push_back(at_most("scaling identity", compared > 10 ? err : INFINITY, 1e-6,
                               std::to_string(compared) + " shell pairs"));
  }
  {
    const Grid g = make_grid(1, 256, 64);
    const XiShells xi = radial_shells(g, 0.4, 4.0);
    const ProfileFamily a = probe_family(g, bump(-1.0, 2.0, 16));
    std::vector<Eigen::Index> nodes;
    for (const auto& m : xi.members) nodes.insert(nodes.end(), m.begin(), m.end());
    const NodeIntegrals self = node_integrals(Integrand::HF, {a(0.0)}, 0, nodes, q);
    const NodeIntegrals gg = node_integrals(Integrand::G, {a(0.0)}, 0, nodes, q);
    r.checks.push_back(
        at_most("HF k=j cancellation", self.values.abs().maxCoeff() / gg.values.abs().maxCoeff(), 1e-12));
  }
  {
    const Grid g = make_grid(1, 256, 32);
    const XiShells xi = radial_shells(g, 0.4, 4.0);
    const ProfileFamily a = probe_family(g, bump(0, 2, 16));
    const double c1 = kernel_G(a, make_lambda_grid(0, 1, 9), xi, q).lipschitz;
    const double c2 = kernel_G(a, make_lambda_grid(0, 1, 17), xi, q).lipschitz;
    r.checks.push_back(at_most("Lipschitz constant change under step halving", std::abs(c2 - c1) / c1, 0.2,
                               io::fmt(c1) + " -> " + io::fmt(c2)));
  }
}

// 7. Inversion on the closed-form kernel of a gaussian profile.
void inversion_checks(CriterionReport& r) {
  const LambdaGrid l = make_lambda_grid(0, 1, 33);
  const int cols = 128;
  const Eigen::VectorXd xi = Eigen::VectorXd::LinSpaced(cols, 0.4, 5.0);
  Eigen::VectorXd xw = Eigen::VectorXd::Constant(cols, 4.6 / (cols - 1));
  xw[0] = xw[cols - 1] = 0.5 * xw[1];
  Eigen::MatrixXd k(l.nodes.size(), cols);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const double s = 1 + l.nodes[i];
    for (int m = 0; m < cols; ++m) k(i, m) = 0.5 * std::sqrt(2 * pi) * std::pow(s, -3) * std::exp(-xi[m] * xi[m] / (2 * s * s)) / xi[m];
  }
  const auto sys = singular_system<double>(k, l.weights, xw);
  const Eigen::VectorXd vtrue = (-0.5 * xi.array().square()).exp().matrix();
  const Eigen::VectorXd p = k * xw.asDiagonal() * vtrue;

  Regularization full;
  full.method = RegMethod::tsvd;
  const auto exact = reconstruct<double>(p, sys, full);
  const Eigen::VectorXd range = range_component<double>(vtrue, sys);
  r.checks.push_back(at_most("noise-free round trip (range component)",
                             weighted_norm<double>(exact.v_hat - range, xw) / weighted_norm<double>(range, xw), 1e-6,
                             "rank " + std::to_string(sys.numerical_rank)));

  const Eigen::VectorXd noisy = add_noise(p, 0.01, 2024);
  Regularization disc;
  disc.noise_estimate = 0.01 * p.cwiseAbs().maxCoeff() * std::sqrt(l.weights.sum());
  const auto rec = reconstruct<double>(noisy, sys, disc);
  const Eigen::VectorXd band = range_component<double>(vtrue, sys, rec.truncation_index);
  r.checks.push_back(at_most("1% noise, discrepancy rule",
                             weighted_norm<double>(rec.v_hat - band, xw) / weighted_norm<double>(band, xw), 0.05,
                             "k* = " + std::to_string(rec.truncation_index)));

  const Eigen::VectorXd flat = sys.g.leftCols(sys.numerical_rank).rowwise().sum();
  const bool flagged = picard_diagnostic<double>(flat, sys).divergence_flag;
  const bool clean = !picard_diagnostic<double>(p, sys).divergence_flag;
  r.checks.push_back({"Picard divergence flagged for out-of-range data, not for K V_hat", flagged && clean ? 1.0 : 0.0,
                      1.0, flagged && clean, flagged ? (clean ? "" : "in-range data flagged") : "not flagged"});
}

// 8. Disjoint-band constructions and the localization argument.
void uniqueness_checks(CriterionReport& r) {
  const Grid g = make_grid(1, 256, 32);
  WindowSpec spec;
  spec.orbitals = 3;
  spec.eps = 0.5;
  spec.delta = 2.5;
  const LocalizationWindow w0 = localization_window(g, spec, vec(0));
  const auto times = simpson_times(w0.time_window, spec.t_samples);
  const OrthogonalityReport g1 = verify_g1_orthogonality(g, w0.probes, times);
  r.checks.push_back(at_most("G1 orthogonality defect", g1.defect, 1e-10,
                             "worst at xi=" + io::fmt(g1.worst_xi[0]) + ", off-origin " + io::fmt(g1.defect_off_origin)));
  double g2 = 0;
  for (std::size_t k = 1; k < w0.probes.size(); ++k) g2 = std::max(g2, verify_g2_support(g, w0.probes[k], w0.probes[0], times));
  r.checks.push_back(at_most("G2 outside-support mass", g2, 1e-10));
  double outside = 1 - w0.mass_inside;
  for (double p : {2.0, 4.0}) outside = std::max(outside, 1 - localization_window(g, spec, vec(p)).mass_inside);
  r.checks.push_back(at_most("window mass outside the target ball", outside, 1e-8));

  PotentialSpec ps = gaussian_potential(1.0, 6, 2, false);
  ps.width = 0.7;
  const Eigen::ArrayXd v1 = realize_potential(ps, g).fourier_values;
  WindowSpec ds;
  ds.eps = 0.25;
  ds.delta = 1.2;
  const auto targets = target_sweep(1, 0.5, 5.0);
  const Eigen::ArrayXd x = g.axis_frequencies();
  const double p0 = 3.0, a = 1e-3 * v1.maxCoeff();
  const Eigen::ArrayXd bumped = v1 + a * ((-(x - p0).square() / 0.08).exp() + (-(x + p0).square() / 0.08).exp());
  const Verdict same = distinguish(g, v1, v1, ds, targets);
  const Verdict diff = distinguish(g, v1, bumped, ds, targets, 1e-6);
  const bool located = diff.distinguished && std::abs((*diff.ball)[0] - p0) <= ds.delta;
  r.checks.push_back({"V vs V identical_within_tol", same.distinguished ? 0.0 : 1.0, 1.0, !same.distinguished, ""});
  r.checks.push_back({"V vs V + bump distinguished near the bump", located ? 1.0 : 0.0, 1.0, located,
                      diff.distinguished ? "ball " + io::fmt((*diff.ball)[0]) : "not distinguished"});
}

fs::path work_dir(const fs::path& work, const std::string& name) {
  const fs::path base = work.empty() ? fs::temp_directory_path() / "hfscat_acceptance" : work;
  const fs::path p = base / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 9. Forward pairings -> data -> reconstruction against the true filtered V_hat.
void end_to_end_checks(CriterionReport& r, const fs::path& work) {
  const RunConfig c = acceptance_config();
  const fs::path out = work_dir(work, "end_to_end");
  run_kernel(c, out);
  run_forward(c, out);
  run_invert(c, out);
  const auto j = nlohmann::json::parse(io::read_text(out / "reconstruction.json"));
  const double err = j.at("error_band");
  const std::string note = "band [" + io::fmt(j["band"]["xi_min"]) + ", " + io::fmt(j["band"]["xi_max"]) + "], k* " +
                           j["truncation_index"].dump() + " of rank " + j["numerical_rank"].dump() + ", all shells " +
                           io::fmt(j["error_all"]);
  r.checks.push_back(at_most("relative weighted L2 error on the resolvable band", err, 0.10, note));
}

// 10. Two runs of every file-producing command on one config.
void reproducibility_checks(CriterionReport& r, const fs::path& work) {
  nlohmann::json j = config_template("rh");
  j["grid"] = {{"n", 1}, {"M", 512}, {"L", 64.0}};
  j["scattering"]["horizon"] = 12.0;
  j["scattering"]["velocities"] = {8, 16};
  j["scattering"]["amplitudes"] = {0.2, 0.1};
  j["kernel"]["lambda"] = {{"min", 0.0}, {"max", 1.0}, {"count", 5}};
  j["kernel"]["xi"] = {{"min", 0.4}, {"max", 3.0}};
  j["inversion"]["noise_level"] = 0.01;
  j["uniqueness"]["sweep_reach"] = 1.0;
  j["seed"] = 7;
  const RunConfig c = parse_config(j);
  std::vector<fs::path> dirs;
  for (const char* name : {"repro_a", "repro_b"}) {
    const fs::path out = work_dir(work, name);
    run_kernel(c, out);
    run_forward(c, out);
    run_invert(c, out);
    run_pairing_sweep(c, out);
    run_uniqueness(c, out);
    run_report(c, out);
    dirs.push_back(out);
  }
  int files = 0, differing = 0;
  std::string first;
  for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".json") continue;
    const fs::path rel = fs::relative(e.path(), dirs[0]);
    ++files;
    if (!fs::exists(dirs[1] / rel) || io::read_text(e.path()) != io::read_text(dirs[1] / rel)) {
      if (!differing++) first = rel.generic_string();
    }
  }
  int other = 0;
  for (const auto& e : fs::recursive_directory_iterator(dirs[1]))
    if (e.is_regular_file()) ++other;
  int mine = 0;
  for (const auto& e : fs::recursive_directory_iterator(dirs[0]))
    if (e.is_regular_file()) ++mine;
  if (other != mine && !differing++) first = "file sets differ";
  r.checks.push_back({"byte-identical CSV/JSON across two runs", static_cast<double>(differing), 0.0,
                      differing == 0 && files > 0,
                      std::to_string(files) + " files compared" + (differing ? ", first difference " + first : "")});
}

const char* titles[] = {"",
                        "propagator unitarity, group law, closed form",
                        "dynamics norm drift, Strang order, HF cancellation",
                        "scattering closure and boost invariance of L",
                        "high-velocity remainder decay",
                        "small-amplitude / high-velocity equivalence",
                        "kernel oracles",
                        "inversion round trip, noise, Picard flag",
                        "disjoint-band suite",
                        "end-to-end reconstruction",
                        "reproducibility"};

}  // namespace

bool CriterionReport::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CriterionReport run_criterion(int id, const fs::path& work) {
  if (id < 1 || id > 10) throw InvalidInput("criterion must be 1..10");
  CriterionReport r;
  r.id = id;
  r.title = titles[id];
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: propagator_checks(r); break;
      case 2: dynamics_checks(r); break;
      case 3: closure_checks(r); break;
      case 4: high_velocity_checks(r); break;
      case 5: equivalence_checks(r); break;
      case 6: kernel_checks(r); break;
      case 7: inversion_checks(r); break;
      case 8: uniqueness_checks(r); break;
      case 9: end_to_end_checks(r, work); break;
      case 10: reproducibility_checks(r, work); break;
    }
  } catch (const std::exception& e) {
    r.checks.push_back({"run", 0.0, 0.0, false, std::string("exception: ") + e.what()});
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "propagator") return {1};
  if (suite == "dynamics") return {2};
  if (suite == "scattering") return {3, 4, 5};
  if (suite == "kernels") return {6};
  if (suite == "inversion") return {7};
  if (suite == "uniqueness") return {8};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
  throw InvalidInput("suite: expected propagator, dynamics, scattering, kernels, inversion, uniqueness or all");
}

nlohmann::json to_json(const CriterionReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}, {"note", c.note}});
  return {{"criterion", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}};
}

std::string summary_line(const CriterionReport& r) {
  std::string s = "criterion " + std::to_string(r.id) + ": " + (r.pass() ? "PASS" : "FAIL") + " (" + r.title + ")";
  for (const auto& c : r.checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", c.value);
    s += "\n  [" + std::string(c.pass ? "ok" : "fail") + "] " + c.name + " = " + buf;
    if (c.limit != 0.0 || c.name.find("byte") != std::string::npos) {
      std::snprintf(buf, sizeof buf, "%.3g", c.limit);
      s += " (limit " + std::string(buf) + ")";
    }
    if (!c.note.empty()) s += "; " + c.note;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", r.seconds);
  return s + "\n  time " + buf + " s";
}

}  // namespace hfscat
