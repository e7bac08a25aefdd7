#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hfscat/propagator.hpp"
#include "hfscat/scattering.hpp"

using namespace hfscat;

namespace {

const Grid grid = make_grid(1, 512, 64);

PotentialSpec weak_gaussian(double c) {
  PotentialSpec v;
  v.amplitude = c;
  v.width = 1.0;
  v.cutoff_radius = 6;
  v.taper_width = 2;
  v.spectral_floor_low = 0.4;
  v.spectral_floor_high = 0.7;
  return v;
}

ProbeSpec bump(double p = 0.0) {
  ProbeSpec q;
  q.center = Eigen::VectorXd::Constant(1, p);
  q.band_radius = 2.0;
  q.smoothness_order = 16;
  return q;
}

ScatterOptions options() {
  ScatterOptions o;
  o.horizon = 12;
  o.dt = 0.02;
  return o;
}

double distance(const Field& a, const Field& b) {
  const Field x = to_position(a), y = to_position(b);
  return std::sqrt(x.grid.cell_volume() * (x.values - y.values).abs2().sum());
}

Eigen::VectorXd lattice_v(int k) { return Eigen::VectorXd::Constant(1, k * grid.dual_spacing()); }

}  // namespace

TEST_CASE("zero potential scatters trivially") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.0), grid);
  const OrbitalSet f = probe_orbitals(grid, {bump()}, lattice_v(4));
  const ScatterResult r = forward_scatter(f, v, Model::restricted_hartree, options());
  CHECK(distance(r.f_plus.orbitals[0], f.orbitals[0]) < 1e-12);
  CHECK(std::abs(pairing(f.orbitals[0], r.f_plus.orbitals[0], f.orbitals[0])) < 1e-12);
  const DecompositionReport d = remainder_decomposition(grid, bump(), v, lattice_v(4), options());
  CHECK(std::abs(d.parts.leading) == 0.0);
  CHECK(std::abs(d.parts.r1) == 0.0);
  CHECK(std::abs(d.parts.r2) == 0.0);
  CHECK(std::abs(d.parts.r3) == 0.0);
}

TEST_CASE("scattering is cubic in the amplitude") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.5), grid);
  std::vector<double> amp, diff;
  for (double a : {0.4, 0.2, 0.1}) {
    OrbitalSet f = probe_orbitals(grid, {bump()}, lattice_v(0));
    f.orbitals[0].values *= a;
    const ScatterResult r = forward_scatter(f, v, Model::restricted_hartree, options());
    CHECK(r.unitarity_defect < 1e-6);
    amp.push_back(a);
    diff.push_back(distance(r.f_plus.orbitals[0], f.orbitals[0]));
  }
  CHECK(loglog_slope(amp, diff) == doctest::Approx(3.0).epsilon(0.1 / 3));
}

TEST_CASE("horizon doubling leaves f_+ unchanged") {
  const Grid big = make_grid(1, 2048, 256);
  const RealizedPotential v = realize_potential(weak_gaussian(0.02), big);
  const OrbitalSet f = probe_orbitals(big, {bump()}, Eigen::VectorXd::Zero(1));
  ScatterOptions o;
  o.horizon = 24;
  o.dt = 0.02;
  CHECK(horizon_stability(f, v, Model::restricted_hartree, o) <= 1e-6);
}

TEST_CASE("direct pairing, Duhamel form and the four-term decomposition") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.02), grid);
  const OrbitalSet f = probe_orbitals(grid, {bump()}, lattice_v(0));
  const ScatterResult r = forward_scatter(f, v, Model::restricted_hartree, options());
  const cplx direct = pairing(f.orbitals[0], r.f_plus.orbitals[0], f.orbitals[0]);
  CHECK(std::abs(r.duhamel[0] - direct) <= 1e-4 * std::abs(direct));
  CHECK(std::abs(r.pairing[0] - direct) <= 1e-9 * std::abs(direct));

  const DecompositionReport a = remainder_decomposition(grid, bump(), v, lattice_v(4), options());
  const DecompositionReport b = remainder_decomposition(grid, bump(), v, lattice_v(12), options());
  CHECK(a.closure_defect <= 1e-6);
  CHECK(b.closure_defect <= 1e-6);
  CHECK(std::abs(a.parts.leading - b.parts.leading) <= 1e-6 * std::abs(a.parts.leading));
  CHECK(std::abs(a.parts.leading.imag()) <= 1e-12 * std::abs(a.parts.leading));
  CHECK(std::abs(a.parts.leading - a.parts.leading_frequency) <= 1e-4 * std::abs(a.parts.leading));
}

TEST_CASE("pairing is symmetric under v -> -v") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.02), grid);
  ScatterOptions o = options();
  const SweepTable t = high_velocity_sweep(grid, {bump()}, 0, v, Model::restricted_hartree,
                                           {6 * grid.dual_spacing(), -6 * grid.dual_spacing()}, o, 0.0);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::abs(t.rows[0].pairing - t.rows[1].pairing) <= 1e-10 * std::abs(t.rows[0].pairing));
}

TEST_CASE("small-amplitude sweep converges at second order") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.5), grid);
  const SweepTable t = small_amplitude_sweep(grid, {bump()}, 0, v, Model::restricted_hartree, {0.4, 0.2, 0.1}, options());
  REQUIRE(t.rows.size() == 3);
  CHECK_FALSE(t.flagged);
  const double d1 = std::abs(t.rows[1].pairing - t.rows[0].pairing), d2 = std::abs(t.rows[2].pairing - t.rows[1].pairing);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK_THROWS_AS(small_amplitude_sweep(grid, {bump()}, 0, v, Model::restricted_hartree, {1e-4}, options()), InvalidInput);
}

TEST_CASE("multi-orbital pairings") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.05), grid);
  // One orbital in the Hartree system feels nothing.
  const OrbitalSet one = probe_orbitals(grid, {bump()}, lattice_v(0));
  const ScatterResult r1 = forward_scatter(one, v, Model::hartree, options());
  CHECK(std::abs(r1.pairing[0]) == 0.0);
  // Two identical orbitals under HF: exchange cancels the mean field.
  OrbitalSet two = probe_orbitals(grid, {bump(), bump()}, lattice_v(0));
  const ScatterResult r2 = forward_scatter(two, v, Model::hartree_fock, options());
  CHECK(std::abs(r2.pairing[0]) < 1e-14);
  const ScatterResult r3 = forward_scatter(two, v, Model::hartree, options());
  CHECK(std::abs(r3.pairing[0]) > 1e-6);
  CHECK(std::abs(r3.duhamel[0] - r3.pairing[0]) <= 1e-4 * std::abs(r3.pairing[0]));
}

TEST_CASE("transit violations are rejected") {
  const RealizedPotential v = realize_potential(weak_gaussian(0.02), grid);
  const OrbitalSet f = probe_orbitals(grid, {bump()}, lattice_v(0));
  ScatterOptions o = options();
  o.horizon = 40;
  CHECK_THROWS_AS(forward_scatter(f, v, Model::restricted_hartree, o), GeometryInfeasible);
}
