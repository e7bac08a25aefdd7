#pragma once
#include <Eigen/Dense>
#include <complex>
#include <string>

#include "hfscat/errors.hpp"

namespace hfscat {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// Periodic box [-L, L)^n with M points per axis. Frequencies are stored
// centered: flat index i along an axis holds k = i - M/2.
struct Grid {
  int dim = 1;
  int points_per_axis = 0;
  double half_extent = 0.0;

  double spacing() const { return 2.0 * half_extent / points_per_axis; }
  double dual_spacing() const { return pi / half_extent; }
  double nyquist() const { return pi * points_per_axis / (2.0 * half_extent); }
  Eigen::Index size() const;
  double cell_volume() const;       // h^n
  double dual_cell_volume() const;  // dxi^n
  Eigen::Index stride(int axis) const;

  Eigen::ArrayXd axis_positions() const;
  Eigen::ArrayXd axis_frequencies() const;
  // Per-point coordinate along one axis, length M^n.
  Eigen::ArrayXd position_component(int axis) const;
  Eigen::ArrayXd frequency_component(int axis) const;
  Eigen::ArrayXd position_norm() const;
  Eigen::ArrayXd frequency_norm() const;

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int dim, int points_per_axis, double half_extent);

enum class Representation { position, frequency };

struct Field {
  Grid grid;
  Representation representation = Representation::position;
  Eigen::ArrayXcd values;
  std::string label;

  double norm() const;
};

Field zero_field(const Grid& g, Representation r, std::string label = {});

// Unitary transform, F f(xi) = (2pi)^{-n/2} \int e^{-ix.xi} f(x) dx.
Field fourier(const Field& f);
Field inverse_fourier(const Field& f);
Field to_position(const Field& f);
Field to_frequency(const Field& f);

// <f,g> = \int f conj(g); both fields must share grid and representation.
cplx inner_product(const Field& f, const Field& g);

// In-place centered transforms on raw arrays; used by hot loops.
void forward_transform(const Grid& g, Eigen::ArrayXcd& values);
void inverse_transform(const Grid& g, Eigen::ArrayXcd& values);

struct ProbeSpec {
  Eigen::VectorXd center;    // p
  double band_radius = 1.0;  // epsilon
  int smoothness_order = 2;
  double amplitude = 1.0;
  Eigen::VectorXd velocity;  // v, lattice multiple
  double dilation = 0.0;     // lambda
};

// Throws InvalidInput on dimension errors and GeometryInfeasible on aliasing.
void check_probe(const Grid& g, const ProbeSpec& probe);

// Bump A exp(-(k/2) / (1 - |xi-p|^2/eps^2)); k = 2 is the standard bump.
double bump_value(const ProbeSpec& probe, const Eigen::VectorXd& xi);

// Profile phi of the probe (center, band, amplitude); ignores v and lambda.
Field make_band_limited_profile(const Grid& g, const ProbeSpec& probe);

// Frequency field of e^{iv.x} phi((lambda+1)x), built from the analytic bump.
Field probe_spectrum(const Grid& g, const ProbeSpec& probe);

Field modulate(const Field& f, const Eigen::VectorXd& v);
Field dilate(const Field& f, double lambda);

// Fraction of spectral mass outside the closed ball B_r(c).
double spectral_mass_outside(const Field& f, const Eigen::VectorXd& c, double r);

bool on_frequency_lattice(const Grid& g, const Eigen::VectorXd& v, double tol = 1e-9);

}  // namespace hfscat
