#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hfscat/grid.hpp"

using namespace hfscat;

namespace {

Field gaussian(const Grid& g, double a = 1.0) {
  const Eigen::ArrayXd r = g.position_norm();
  return Field{g, Representation::position, (-0.5 * a * a * r.square()).exp().cast<cplx>(), "gauss"};
}

ProbeSpec probe(Eigen::VectorXd p, double eps) {
  ProbeSpec s;
  s.center = std::move(p);
  s.band_radius = eps;
  return s;
}

}  // namespace

TEST_CASE("grid arithmetic") {
  const Grid a = make_grid(1, 64, 16);
  CHECK(a.spacing() == doctest::Approx(0.5));
  CHECK(a.dual_spacing() == doctest::Approx(0.19634954084936207));
  CHECK(a.spacing() * a.dual_spacing() * a.points_per_axis == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(make_grid(2, 32, 8).nyquist() == doctest::Approx(2 * pi));
  CHECK(make_grid(3, 32, 8).size() == 32768);
  const Eigen::ArrayXd k = a.axis_frequencies();
  CHECK(k[0] == doctest::Approx(-32 * a.dual_spacing()));
  CHECK(k[32] == 0.0);
  CHECK_THROWS_AS(make_grid(1, 48, 1), InvalidInput);
  CHECK_THROWS_AS(make_grid(4, 16, 1), InvalidInput);
  CHECK_THROWS_AS(make_grid(1, 8, 1), InvalidInput);
}

TEST_CASE("plane wave lands on one lattice node") {
  const Grid g = make_grid(1, 64, 16);
  const int k = 5;
  const Eigen::ArrayXd x = g.axis_positions();
  Field f{g, Representation::position, (cplx(0, 1) * (k * g.dual_spacing() * x).cast<cplx>()).exp(), ""};
  const Field s = fourier(f);
  Eigen::Index imax;
  s.values.abs().maxCoeff(&imax);
  CHECK(imax == 32 + k);
  CHECK(s.values.abs2().sum() - std::norm(s.values[imax]) < 1e-24 * s.values.abs2().sum());
}

TEST_CASE("gaussian transform matches e^{-xi^2/2}") {
  for (int dim : {1, 2}) {
    const Grid g = make_grid(dim, dim == 1 ? 256 : 64, dim == 1 ? 16 : 10);
    const Field s = fourier(gaussian(g));
    const Eigen::ArrayXd k = g.frequency_norm();
    const Eigen::ArrayXd exact = (-0.5 * k.square()).exp();
    CHECK((s.values - exact.cast<cplx>()).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("plancherel and round trip") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int dim : {1, 2, 3}) {
    const Grid g = make_grid(dim, dim == 3 ? 16 : 32, 3.0);
    Field f = zero_field(g, Representation::position);
    for (auto& z : f.values) z = cplx(nd(rng), nd(rng));
    const Field s = fourier(f);
    CHECK(std::abs(s.norm() - f.norm()) < 1e-12 * f.norm());
    const Field back = inverse_fourier(s);
    CHECK((back.values - f.values).abs().maxCoeff() < 1e-12 * f.values.abs().maxCoeff());
    CHECK_THROWS_AS(inverse_fourier(f), InvalidInput);
    CHECK_THROWS_AS(fourier(s), InvalidInput);
  }
}

TEST_CASE("band-limited profile") {
  const Grid g = make_grid(1, 128, 32);
  const Field phi = make_band_limited_profile(g, probe(Eigen::VectorXd::Zero(1), 1.0));
  CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(phi.values.imag().abs().maxCoeff() < 1e-14);
  for (Eigen::Index j = 1; j < 128; ++j) CHECK(std::abs(phi.values[j] - phi.values[128 - j]) < 1e-14);

  const Grid g2 = make_grid(2, 64, 16);
  Eigen::VectorXd p(2);
  p << 3, 0;
  const Field q = make_band_limited_profile(g2, probe(p, 0.5));
  CHECK(spectral_mass_outside(q, p, 0.5) <= 1e-12);

  // Disjoint supports: pointwise product of spectra vanishes.
  Eigen::VectorXd p2(2);
  p2 << -1, 0;
  CHECK((probe_spectrum(g2, probe(p, 0.5)).values * probe_spectrum(g2, probe(p2, 0.5)).values).abs().maxCoeff() == 0.0);

  ProbeSpec wide = probe(Eigen::VectorXd::Constant(1, 9.0), 1.0);
  CHECK_THROWS_AS(make_band_limited_profile(make_grid(1, 64, 16), wide), GeometryInfeasible);
}

TEST_CASE("modulate shifts the spectrum by whole nodes") {
  const Grid g = make_grid(1, 128, 32);
  const Field phi = make_band_limited_profile(g, probe(Eigen::VectorXd::Zero(1), 1.0));
  CHECK((modulate(phi, Eigen::VectorXd::Zero(1)).values - phi.values).abs().maxCoeff() < 1e-15);
  const Field psi = fourier(modulate(phi, Eigen::VectorXd::Constant(1, 4 * g.dual_spacing())));
  const Field s = fourier(phi);
  for (Eigen::Index i = 0; i + 4 < 128; ++i) CHECK(std::abs(psi.values[i + 4] - s.values[i]) < 1e-14);
  for (double k : {-7.0, 3.0, 11.0})
    CHECK(modulate(phi, Eigen::VectorXd::Constant(1, k * g.dual_spacing())).norm() ==
          doctest::Approx(phi.norm()).epsilon(1e-14));
  CHECK_THROWS_AS(modulate(phi, Eigen::VectorXd::Constant(1, 0.3 * g.dual_spacing())), InvalidInput);
}

TEST_CASE("dilation") {
  const Grid g = make_grid(1, 256, 16);
  const Field f = gaussian(g);
  CHECK((dilate(f, 0.0).values - f.values).abs().maxCoeff() == 0.0);
  const Field d = dilate(f, 1.0);
  const Eigen::ArrayXd x = g.axis_positions();
  CHECK((d.values - (-2.0 * x.square()).exp().cast<cplx>()).abs().maxCoeff() < 1e-8);
  CHECK(d.norm() * d.norm() == doctest::Approx(f.norm() * f.norm() / 2).epsilon(1e-10));

  // Analytic dilated probe spectrum agrees with interpolation.
  const Grid h = make_grid(1, 1024, 128);
  ProbeSpec p = probe(Eigen::VectorXd::Zero(1), 1.0);
  p.smoothness_order = 16;
  const Field phi = make_band_limited_profile(h, p);
  p.dilation = 0.5;
  const Field lam = inverse_fourier(probe_spectrum(h, p));
  CHECK((dilate(phi, 0.5).values - lam.values).abs().maxCoeff() < 1e-10);
  CHECK(lam.norm() * lam.norm() == doctest::Approx(1.0 / 1.5).epsilon(1e-10));
}
