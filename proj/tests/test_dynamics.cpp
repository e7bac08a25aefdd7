#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hfscat/dynamics.hpp"
#include "hfscat/propagator.hpp"

using namespace hfscat;

namespace {

PotentialSpec gaussian_potential(double c, double w, double rv, double taper) {
  PotentialSpec v;
  v.family = PotentialFamily::gaussian;
  v.amplitude = c;
  v.width = w;
  v.cutoff_radius = rv;
  v.taper_width = taper;
  return v;
}

Field gaussian_packet(const Grid& g, double x0, double k0, double s) {
  const Eigen::ArrayXd x = g.position_component(0);
  Eigen::ArrayXcd v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = std::polar(std::exp(-(x[i] - x0) * (x[i] - x0) / (2 * s * s)), k0 * x[i]);
  return Field{g, Representation::position, v, "packet"};
}

OrbitalSet three_orbitals(const Grid& g) {
  OrbitalSet s;
  s.orbitals = {gaussian_packet(g, -1.0, 0.5, 1.0), gaussian_packet(g, 0.5, -0.3, 0.8), gaussian_packet(g, 1.5, 0.0, 1.2)};
  return s;
}

double max_diff(const Field& a, const Field& b) {
  return (to_position(a).values - to_position(b).values).abs().maxCoeff();
}

}  // namespace

TEST_CASE("potential admissibility") {
  const Grid g = make_grid(1, 256, 40);
  CHECK_NOTHROW(check_potential(gaussian_potential(1, 1, 8, 2), g));
  CHECK_THROWS_AS(check_potential(gaussian_potential(1, 1, 9, 2), g), GeometryInfeasible);
  CHECK_THROWS_AS(check_potential(gaussian_potential(-1, 1, 8, 2), g), InvalidInput);
  PotentialSpec t;
  t.family = PotentialFamily::table;
  t.table_radii = {0, 1, 2};
  t.table_values = {1, 2, 0};
  t.cutoff_radius = 2;
  CHECK_THROWS_AS(check_potential(t, g), InvalidInput);
  PotentialSpec p = gaussian_potential(1, 1, 8, 2);
  p.family = PotentialFamily::regularized_power;
  p.exponent = 1.5;
  CHECK_NOTHROW(check_potential(p, g));
  CHECK(potential_value(p, 9.0) == doctest::Approx(0.5 * std::pow(82.0, -0.75)));
  CHECK(potential_value(p, 10.0) == 0.0);
}

TEST_CASE("mean-field convolution against the gaussian closed form") {
  const Grid g = make_grid(1, 512, 40);
  const RealizedPotential v = realize_potential(gaussian_potential(0.7, 1.0, 8, 2), g);
  const double s = 1.3;  // |u|^2 = e^{-x^2/(2 s^2)}
  OrbitalSet st;
  st.orbitals = {gaussian_packet(g, 0.0, 0.0, s * std::sqrt(2.0))};
  const Field h = hartree_term(st, v, Model::restricted_hartree, 0);
  const Eigen::ArrayXd x = g.axis_positions();
  const double w2 = 1.0 + s * s;
  const Eigen::ArrayXd conv = 0.7 * std::sqrt(2 * pi) * (s / std::sqrt(w2)) * (-x.square() / (2 * w2)).exp();
  const Eigen::ArrayXcd expect = conv.cast<cplx>() * st.orbitals[0].values;
  CHECK((h.values - expect).abs().maxCoeff() < 1e-8);

  const RealizedPotential zero = realize_potential(gaussian_potential(0, 1, 8, 2), g);
  CHECK(hartree_term(st, zero, Model::restricted_hartree, 0).values.abs().maxCoeff() == 0.0);
  CHECK(hartree_term(st, v, Model::hartree, 0).values.abs().maxCoeff() == 0.0);
  CHECK(fock_term(st, v, 0).values.abs().maxCoeff() == 0.0);
  OrbitalSet lone = three_orbitals(g);
  lone.orbitals[0].values.setZero();
  lone.orbitals[2].values.setZero();
  CHECK(hartree_term(lone, v, Model::hartree, 1).values.abs().maxCoeff() == 0.0);
}

TEST_CASE("exchange term against a brute-force double sum") {
  const Grid g = make_grid(1, 16, 16);
  const PotentialSpec spec = gaussian_potential(1.0, 1.5, 3, 1);
  const RealizedPotential v = realize_potential(spec, g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  OrbitalSet st;
  for (int k = 0; k < 3; ++k) {
    Field f = zero_field(g, Representation::position);
    for (auto& z : f.values) z = 0.1 * cplx(nd(rng), nd(rng));
    st.orbitals.push_back(f);
  }
  const double h = g.spacing();
  const Eigen::Index m = g.points_per_axis;
  for (std::size_t j = 0; j < 3; ++j) {
    Eigen::ArrayXcd brute = Eigen::ArrayXcd::Zero(m);
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == j) continue;
      for (Eigen::Index x = 0; x < m; ++x) {
        cplx acc = 0;
        for (Eigen::Index y = 0; y < m; ++y) {
          Eigen::Index d = ((x - y) % m + m) % m;
          if (d > m / 2) d -= m;
          acc += h * potential_value(spec, std::abs(d * h)) * std::conj(st.orbitals[k].values[y]) *
                 st.orbitals[j].values[y];
        }
        brute[x] -= acc * st.orbitals[k].values[x];
      }
    }
    CHECK((fock_term(st, v, j).values - brute).abs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("identical orbitals: exchange cancels the mean field") {
  const Grid g = make_grid(1, 256, 40);
  const RealizedPotential v = realize_potential(gaussian_potential(1.0, 1.0, 8, 2), g);
  OrbitalSet st;
  const Field u = gaussian_packet(g, 0.3, 0.4, 1.1);
  st.orbitals = {u, u, u};
  for (std::size_t j = 0; j < 3; ++j) {
    const Field h = hartree_term(st, v, Model::hartree_fock, j);
    const Field f = fock_term(st, v, j);
    CHECK((h.values + f.values).abs().maxCoeff() <= 1e-15 * h.values.abs().maxCoeff() * 10);
  }
  const OrbitalSet out = evolve(st, v, Model::hartree_fock, 0, 2, 0.01);
  const Field free = free_propagate(u, 2);
  for (const auto& f : out.orbitals) CHECK(max_diff(f, free) < 1e-12);
}

TEST_CASE("zero potential reduces to free evolution") {
  const Grid g = make_grid(1, 256, 40);
  const RealizedPotential v = realize_potential(gaussian_potential(0, 1, 8, 2), g);
  const OrbitalSet st = three_orbitals(g);
  for (Model m : {Model::hartree, Model::hartree_fock}) {
    const OrbitalSet out = evolve(st, v, m, 0, 3, 0.05);
    for (std::size_t j = 0; j < 3; ++j) CHECK(max_diff(out.orbitals[j], free_propagate(st.orbitals[j], 3)) < 1e-12);
  }
}

TEST_CASE("norm conservation for all models, both time directions") {
  const Grid g = make_grid(1, 512, 128);
  const RealizedPotential v = realize_potential(gaussian_potential(1.0, 1.0, 8, 2), g);
  for (Model m : {Model::restricted_hartree, Model::hartree, Model::hartree_fock}) {
    OrbitalSet st = three_orbitals(g);
    if (m == Model::restricted_hartree) st.orbitals.resize(1);
    for (double te : {8.0, -8.0}) {
      EvolveOptions opt;
      opt.norm_tol = 1.0;
      const OrbitalSet out = evolve(st, v, m, 0, te, 0.02, opt);
      for (std::size_t j = 0; j < st.orbitals.size(); ++j) {
        const double n0 = st.orbitals[j].norm();
        CHECK(std::abs(out.orbitals[j].norm() - n0) <= 1e-8 * n0);
      }
    }
  }
}

TEST_CASE("strang splitting is second order") {
  const Grid g = make_grid(1, 256, 40);
  const RealizedPotential v = realize_potential(gaussian_potential(2.0, 1.0, 8, 2), g);
  for (Model m : {Model::restricted_hartree, Model::hartree_fock}) {
    OrbitalSet st = three_orbitals(g);
    if (m == Model::restricted_hartree) st.orbitals.resize(1);
    std::vector<Field> runs;
    for (double dt : {0.1, 0.05, 0.025}) runs.push_back(evolve(st, v, m, 0, 2, dt).orbitals[0]);
    const double e1 = max_diff(runs[0], runs[1]), e2 = max_diff(runs[1], runs[2]);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("restricted Hartree energy is conserved") {
  const Grid g = make_grid(1, 512, 128);
  const RealizedPotential v = realize_potential(gaussian_potential(1.0, 1.0, 8, 2), g);
  OrbitalSet st;
  st.orbitals = {gaussian_packet(g, 0.0, 0.3, 1.0)};
  const double e0 = rh_energy(st.orbitals[0], v);
  for (double te : {8.0, -8.0}) {
    const OrbitalSet out = evolve(st, v, Model::restricted_hartree, 0, te, 0.005);
    CHECK(std::abs(rh_energy(out.orbitals[0], v) - e0) <= 1e-6 * std::abs(e0));
  }
}

TEST_CASE("evolve preconditions") {
  const Grid g = make_grid(1, 256, 40);
  const RealizedPotential v = realize_potential(gaussian_potential(1.0, 1.0, 8, 2), g);
  const OrbitalSet st = three_orbitals(g);
  CHECK_THROWS_AS(evolve(st, v, Model::hartree, 0, 1, 0.3), InvalidInput);
  CHECK_THROWS_AS(evolve(st, v, Model::restricted_hartree, 0, 1, 0.1), InvalidInput);
  OrbitalSet fast;
  fast.orbitals = {gaussian_packet(g, 0.0, 3.0, 1.0)};
  CHECK_THROWS_AS(evolve(fast, v, Model::restricted_hartree, 0, 20, 0.05), NumericalFailure);
}
