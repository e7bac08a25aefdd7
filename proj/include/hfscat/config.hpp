#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfscat/dynamics.hpp"
#include "hfscat/kernels.hpp"
#include "hfscat/scattering.hpp"
#include "hfscat/uniqueness.hpp"

namespace hfscat {

inline constexpr int schema_version = 1;

struct ScatterConfig {
  double horizon = 24.0;
  double dt = 0.01;
  int orbital = 0;
  std::vector<double> velocities;  // |v| along e_1, multiples of the dual spacing
  std::vector<double> amplitudes;
  double norm_tol = 1e-8;
  double wrap_tol = 1e-6;
};

struct KernelConfig {
  KernelKind kind = KernelKind::G;
  int orbital = 0;
  double lambda_min = 0.0, lambda_max = 1.0;
  int lambda_count = 33;
  double xi_min = 0.4, xi_max = 5.0;
  TimeQuadrature time;
};

struct InversionConfig {
  double rank_tol = 1e-10;
  std::string regularization = "discrepancy:1.1";
  double noise_level = 0.0;  // additive, relative to max |P|
};

struct PerturbationConfig {
  double center = 0.0;  // |xi| of the added even Gaussian bump in V_hat
  double width = 0.2;
  double amplitude = 0.0;  // relative to max |V_hat|
  double scale = 1.0;      // V2 = scale * V1 + bump
};

struct UniquenessConfig {
  WindowSpec window;
  double sweep_step = 0.5;
  double sweep_reach = 5.0;
  double tol = 1e-9;
  PerturbationConfig perturbation;
};

struct RunConfig {
  Model model = Model::restricted_hartree;
  int dim = 1;
  int points = 0;
  double half_extent = 0.0;
  PotentialSpec potential;
  std::vector<ProbeSpec> probes;
  ScatterConfig scattering;
  KernelConfig kernel;
  InversionConfig inversion;
  UniquenessConfig uniqueness;
  std::uint64_t seed = 0;
  int threads = 1;

  Grid grid() const { return make_grid(dim, points, half_extent); }
};

// Throws InvalidInput with the offending field path, e.g. "grid.M: missing required field".
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
// sha256 of the canonical (sorted, compact) JSON of the effective config; threads excluded.
std::string config_hash(const RunConfig& c);
nlohmann::json config_template(const std::string& name);

}  // namespace hfscat
