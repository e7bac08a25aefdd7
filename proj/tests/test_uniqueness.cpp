#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hfscat/dynamics.hpp"
#include "hfscat/errors.hpp"
#include "hfscat/kernels.hpp"
#include "hfscat/uniqueness.hpp"

using namespace hfscat;

namespace {

Eigen::VectorXd vec(double x) { return Eigen::VectorXd::Constant(1, x); }

const Grid& grid() {
  static const Grid g = make_grid(1, 256, 32);
  return g;
}

Eigen::ArrayXd gaussian_potential_hat(const Grid& g, double c, double w) {
  PotentialSpec p;
  p.amplitude = c;
  p.width = w;
  p.cutoff_radius = 6;
  p.taper_width = 2;
  return realize_potential(p, g).fourier_values;
}

}  // namespace

TEST_CASE("disjoint probe construction") {
  const Grid& g = grid();
  const auto two = build_disjoint_probes(g, 1.0, {vec(3), vec(-3)});
  const Field a = probe_spectrum(g, two[0]), b = probe_spectrum(g, two[1]);
  CHECK((a.values * b.values).abs().maxCoeff() == 0.0);
  CHECK(build_disjoint_probes(g, 1.0, {vec(-4), vec(0), vec(4)}).size() == 3);
  CHECK_THROWS_AS(build_disjoint_probes(g, 1.0, {vec(0), vec(1.5)}), GeometryInfeasible);
  CHECK_THROWS_AS(build_disjoint_probes(g, 1.0, {vec(12)}), GeometryInfeasible);
}

TEST_CASE("density spectra of disjoint probes") {
  const Grid& g = grid();
  const std::vector<double> ts = {-2.0, 0.0, 0.5, 3.0};
  // Identical probes: the product at the origin is (2pi)^{-n} |phi|^4.
  const auto same = build_disjoint_probes(g, 0.5, {vec(1)});
  const OrthogonalityReport r0 = verify_g1_orthogonality(g, {same[0], same[0]}, ts);
  CHECK(r0.defect == doctest::Approx(1 / (2 * pi)).epsilon(1e-12));
  // Disjoint bands do not make the densities orthogonal: both spectra contain the origin.
  const auto probes = build_disjoint_probes(g, 0.5, {vec(-3), vec(3)});
  const OrthogonalityReport r = verify_g1_orthogonality(g, probes, ts);
  CHECK(r.defect == doctest::Approx(1 / (2 * pi)).epsilon(1e-12));
  CHECK(r.worst_xi[0] == 0.0);
  CHECK(r.defect_off_origin > 1e-3);
  // Each density spectrum is supported in B_{2 eps}(0) whatever the band center.
  for (double t : ts) CHECK(spectral_mass_outside(density_spectrum(probe_spectrum(g, probes[0]), t), vec(0), 1.0) <= 1e-20);
}

TEST_CASE("product spectrum support") {
  const Grid& g = grid();
  const std::vector<double> ts = {-4.0, -1.0, 0.0, 2.0, 5.0};
  const auto z = build_disjoint_probes(g, 1.0, {vec(0)});
  CHECK(verify_g2_support(g, z[0], z[0], ts, vec(0)) <= 1e-10);
  const auto pm = build_disjoint_probes(g, 1.0, {vec(3), vec(-3)});
  CHECK(g2_center(pm[0], pm[1])[0] == 6.0);
  CHECK(verify_g2_support(g, pm[0], pm[1], ts) <= 1e-10);
  CHECK(verify_g2_support(g, pm[0], pm[1], ts, vec(0)) > 0.99);  // centered at p_j + p_k: wrong place
  const Field prod = pair_spectrum(probe_spectrum(g, pm[0]), probe_spectrum(g, pm[1]), 0.0);
  Eigen::Index i;
  prod.values.abs().maxCoeff(&i);
  CHECK(std::abs(g.axis_frequencies()[i] - 6.0) <= g.dual_spacing());
  const auto half = build_disjoint_probes(g, 0.5, {vec(3), vec(-3)});
  CHECK(verify_g2_support(g, half[0], half[1], ts) <= 1e-10);
  CHECK(spectral_mass_outside(pair_spectrum(probe_spectrum(g, half[0]), probe_spectrum(g, half[1]), 1.0), vec(6), 0.5) > 1e-3);
}

TEST_CASE("localization window") {
  const Grid& g = grid();
  WindowSpec spec;
  spec.orbitals = 3;
  spec.eps = 0.5;
  spec.delta = 2.5;
  const LocalizationWindow w0 = localization_window(g, spec, vec(0));
  CHECK(w0.probes[0].center[0] == 0.0);
  CHECK(w0.probes[1].center[0] == doctest::Approx(-w0.probes[2].center[0]));
  CHECK(w0.window.minCoeff() >= 0.0);
  CHECK(w0.mass_inside >= 1 - 1e-8);

  const LocalizationWindow w = localization_window(g, spec, vec(4));
  CHECK(w.window.minCoeff() >= 0.0);
  CHECK(w.mass_inside >= 1 - 1e-8);
  spec.reference = 2;
  CHECK(localization_window(g, spec, vec(4)).mass_inside >= 1 - 1e-8);

  spec.delta = 1.9;
  CHECK_THROWS_AS(localization_window(g, spec, vec(0)), GeometryInfeasible);
  spec.delta = 2.2;
  spec.orbitals = 6;
  CHECK_THROWS_AS(localization_window(g, spec, vec(0)), GeometryInfeasible);

  // target inside the reference band's reach
  spec.orbitals = 3;
  spec.reference = 0;
  spec.eps = 0.25;
  spec.delta = 1.2;
  const LocalizationWindow near = localization_window(g, spec, vec(0.5));
  CHECK(near.mass_inside >= 1 - 1e-8);
  for (int k : {1, 2}) CHECK(std::abs(near.probes[k].center[0] - near.probes[0].center[0]) > 2 * spec.eps);
  CHECK(std::abs(near.probes[1].center[0] - near.probes[2].center[0]) > 2 * spec.eps);
}

TEST_CASE("distinguish") {
  const Grid& g = grid();
  WindowSpec spec;
  spec.eps = 0.25;
  spec.delta = 1.2;
  const auto targets = target_sweep(1, 0.5, 5.0);
  const Eigen::ArrayXd v1 = gaussian_potential_hat(g, 1.0, 0.7);

  const Verdict same = distinguish(g, v1, v1, spec, targets);
  CHECK_FALSE(same.distinguished);

  const Eigen::ArrayXd xi = g.axis_frequencies();
  const double p0 = 3.0, a = 1e-3 * v1.maxCoeff();
  const Eigen::ArrayXd bump = a * ((-(xi - p0).square() / 0.08).exp() + (-(xi + p0).square() / 0.08).exp());
  const Verdict b = distinguish(g, v1, v1 + bump, spec, targets, 1e-6);
  REQUIRE(b.distinguished);
  CHECK(std::abs((*b.ball)[0] - p0) <= spec.delta);
  const Verdict b2 = distinguish(g, v1 + bump, v1, spec, targets, 1e-6);
  for (std::size_t i = 0; i < targets.size(); ++i) CHECK(b2.integrals[i] == -b.integrals[i]);

  const Verdict s = distinguish(g, v1, 1.01 * v1, spec, targets);
  REQUIRE(s.distinguished);
  CHECK((*s.ball)[0] == 0.0);
}
