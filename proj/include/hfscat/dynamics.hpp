#pragma once
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hfscat/grid.hpp"

namespace hfscat {

enum class PotentialFamily { gaussian, regularized_power, table };

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::gaussian;
  double amplitude = 0.0;    // C
  double width = 1.0;        // w (gaussian)
  double exponent = 1.0;     // sigma (regularized_power)
  std::vector<double> table_radii, table_values;
  double cutoff_radius = 4.0;  // R_V
  double taper_width = 1.0;
  // Smooth high-pass on the symbol: 0 for |xi| <= low, 1 for |xi| >= high.
  // low = high = 0 keeps the full symbol.
  double spectral_floor_low = 0.0;
  double spectral_floor_high = 0.0;
  std::map<std::string, double> metadata;  // recorded, not checked
};

// Untapered radial profile.
double potential_profile(const PotentialSpec& v, double r);
// Profile with the cosine taper beyond R_V.
double potential_value(const PotentialSpec& v, double r);
// Throws InvalidInput / GeometryInfeasible.
void check_potential(const PotentialSpec& v, const Grid& g);
double spectral_floor(const PotentialSpec& v, double xi);

struct RealizedPotential {
  Grid grid;
  PotentialSpec spec;
  Eigen::ArrayXd values;          // V on the lattice
  Eigen::ArrayXd fourier_values;  // F V, real
  Eigen::ArrayXd filter;          // high-pass factor
  Eigen::ArrayXd symbol;          // (2pi)^{n/2} filter * F V
};

RealizedPotential realize_potential(const PotentialSpec& v, const Grid& g);

// V * f on the lattice (periodic), position representation in and out.
Eigen::ArrayXcd convolve(const RealizedPotential& v, const Eigen::ArrayXcd& f);
// Real part of V * rho; throws if the imaginary residue exceeds 1e-12 relative.
Eigen::ArrayXd convolve_real(const RealizedPotential& v, const Eigen::ArrayXd& rho);

enum class Model { restricted_hartree, hartree, hartree_fock };
std::string model_name(Model m);
Model parse_model(const std::string& s);

struct OrbitalSet {
  std::vector<Field> orbitals;
  double time = 0.0;
};

// RH: (V*|u|^2)u. Hartree / HF: (V * sum_{k!=j}|u_k|^2) u_j.
Field hartree_term(const OrbitalSet& s, const RealizedPotential& v, Model m, std::size_t j);
// -sum_{k!=j} u_k (V * (conj(u_k) u_j)).
Field fock_term(const OrbitalSet& s, const RealizedPotential& v, std::size_t j);
// Full nonlinearity of the model acting on orbital j.
Field nonlinearity(const OrbitalSet& s, const RealizedPotential& v, Model m, std::size_t j);

// Same as nonlinearity on raw position arrays.
Eigen::ArrayXcd nonlinearity_values(const std::vector<Eigen::ArrayXcd>& u, const RealizedPotential& v, Model m,
                                    std::size_t j);

// Per-step data handed to observers: orbitals after the first half kinetic
// step (before / after the nonlinear sub-step) at the midpoint time.
struct StepView {
  double t_mid = 0.0;
  double dt = 0.0;
  const std::vector<Eigen::ArrayXcd>* before = nullptr;
  const std::vector<Eigen::ArrayXcd>* after = nullptr;
  const std::vector<Eigen::ArrayXd>* mean_field = nullptr;  // RH / Hartree only
};

struct EvolveOptions {
  double norm_tol = 1e-8;
  double wrap_tol = 1e-6;
  bool check_wrap = true;
  int wrap_interval = 64;
  std::function<void(const StepView&)> observer;
};

OrbitalSet evolve(const OrbitalSet& s, const RealizedPotential& v, Model m, double t_start, double t_end, double dt,
                  const EvolveOptions& opt = {});

// Conserved energy of the single-orbital flow: 1/2 ||grad u||^2 + 1/2 <V*|u|^2, |u|^2>.
double rh_energy(const Field& u, const RealizedPotential& v);

}  // namespace hfscat
