#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hfscat/propagator.hpp"

using namespace hfscat;

namespace {

Field gaussian(const Grid& g) {
  const Eigen::ArrayXd r = g.position_norm();
  return Field{g, Representation::position, (-0.5 * r.square()).exp().cast<cplx>(), "gauss"};
}

}  // namespace

TEST_CASE("identity, unitarity and group law") {
  const Grid g = make_grid(1, 256, 32);
  const Field f = gaussian(g);
  CHECK((free_propagate(f, 0.0).values - f.values).abs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-100, 100);
  for (int k = 0; k < 8; ++k) {
    const double s = ut(rng), t = ut(rng);
    const Field a = free_propagate(free_propagate(f, s), t);
    const Field b = free_propagate(f, s + t);
    CHECK(std::abs(a.norm() - f.norm()) < 1e-12 * f.norm());
    CHECK((a.values - b.values).abs().maxCoeff() < 1e-12);
    const Field h = free_propagate(free_propagate(f, t / 2), t / 2);
    CHECK((h.values - free_propagate(f, t).values).abs().maxCoeff() < 1e-12);
  }
  const PropagationPlan plan(g, 3.0);
  CHECK((plan.multiplier().abs() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("gaussian closed form") {
  const Grid g = make_grid(1, 256, 32);
  const Field f = gaussian(g);
  const Eigen::ArrayXd x = g.axis_positions();
  for (double t : {-5.0, 0.5, 2.0, 5.0}) {
    const Field u = free_propagate(f, t);
    double err = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (std::abs(x[i]) <= g.half_extent / 2) err = std::max(err, std::abs(u.values[i] - gaussian_free_solution(x[i], t)));
    CHECK(err < 1e-8);
  }
}

TEST_CASE("galilean identity") {
  const Grid g = make_grid(1, 256, 32);
  ProbeSpec p;
  p.center = Eigen::VectorXd::Zero(1);
  p.band_radius = 1.0;
  p.smoothness_order = 8;
  const Field phi = make_band_limited_profile(g, p);
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, 8 * g.dual_spacing());
  CHECK(galilean_check(phi, Eigen::VectorXd::Zero(1), 1.3) == 0.0);
  CHECK(galilean_check(phi, v, 0.0) < 1e-15);
  const double s = 4 * g.spacing() / v[0];
  CHECK(galilean_check(phi, v, s) <= 1e-10 * phi.values.abs().maxCoeff());
  CHECK_THROWS_AS(galilean_check(phi, v, 0.37 * s), InvalidInput);
}

TEST_CASE("space-time L4 norm saturates") {
  ProbeSpec p;
  p.band_radius = 1.0;
  p.smoothness_order = 8;
  {
    const Grid g = make_grid(2, 128, 48);
    ProbeSpec q = p;
    q.band_radius = 2.0;
    q.smoothness_order = 2;
    q.center = Eigen::VectorXd::Zero(2);
    const Field phi = make_band_limited_profile(g, q);
    const double a = strichartz_l4(phi, 4, 0.05), b = strichartz_l4(phi, 8, 0.05), c = strichartz_l4(phi, 16, 0.05);
    CHECK(b > a);
    CHECK(c - b < 0.6 * (b - a));
  }
  {
    const Grid g = make_grid(1, 1024, 256);
    p.center = Eigen::VectorXd::Zero(1);
    const Field phi = make_band_limited_profile(g, p);
    const double a = strichartz_l4(phi, 8, 0.05), b = strichartz_l4(phi, 16, 0.05), c = strichartz_l4(phi, 32, 0.05);
    CHECK(b / a < 2.0);
    CHECK(c / b < b / a * 1.05);
  }
}

TEST_CASE("box mass monitor") {
  const Grid g = make_grid(1, 256, 32);
  const Field f = gaussian(g);
  CHECK(circular_center(f)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mass_outside_box(f, circular_center(f), 16) < 1e-40);
  const Field spread = free_propagate(f, 30.0);
  CHECK(mass_outside_box(spread, circular_center(spread), 16) > 1e-3);
}
