#pragma once
#include <optional>
#include <vector>

#include "hfscat/grid.hpp"

namespace hfscat {

// Probes with pairwise disjoint bands: |p_j - p_k| > 2 eps, all under Nyquist.
std::vector<ProbeSpec> build_disjoint_probes(const Grid& g, double eps, const std::vector<Eigen::VectorXd>& centers,
                                             int smoothness_order = 2);

// Centers of the spectral bands of F(|U0 phi|^2) and F(U0 phi_a conj(U0 phi_b)).
Eigen::VectorXd g2_center(const ProbeSpec& a, const ProbeSpec& b);

struct OrthogonalityReport {
  double defect = 0.0;                 // max |G1 phi_k conj G1 phi_j| / (|phi_k| |phi_j|)^2 over k != j
  double defect_off_origin = 0.0;      // same with xi = 0 excluded
  double worst_time = 0.0;
  Eigen::VectorXd worst_xi;
};

OrthogonalityReport verify_g1_orthogonality(const Grid& g, const std::vector<ProbeSpec>& probes,
                                            const std::vector<double>& t_samples);

// Max over t of the fraction of |G2[phi_a, phi_b]|^2 outside B_{eps_a + eps_b}(center).
double verify_g2_support(const Grid& g, const ProbeSpec& a, const ProbeSpec& b, const std::vector<double>& t_samples,
                         const Eigen::VectorXd& center);
double verify_g2_support(const Grid& g, const ProbeSpec& a, const ProbeSpec& b, const std::vector<double>& t_samples);

std::vector<double> simpson_times(double window, int count = 65);

struct WindowSpec {
  int orbitals = 2;   // N
  int reference = 0;  // j
  double eps = 0.5;
  double delta = 2.5;  // radius of the target ball
  int smoothness_order = 2;
  int t_samples = 65;
};

struct LocalizationWindow {
  std::vector<ProbeSpec> probes;
  Eigen::VectorXd target;
  Eigen::ArrayXd window;  // W on the frequency lattice
  double time_window = 0.0;
  double mass_inside = 0.0;  // fraction of sum W inside B_delta(target)
};

// W = sum_{k != j} int |G2[phi_k, phi_j]|^2 dt for a layout with every band of the sum inside B_delta(p).
LocalizationWindow localization_window(const Grid& g, const WindowSpec& spec, const Eigen::VectorXd& target);

struct Verdict {
  bool distinguished = false;
  std::optional<Eigen::VectorXd> ball;  // first target where the integral exceeds the threshold
  std::vector<Eigen::VectorXd> targets;
  std::vector<double> integrals;  // int Re(v1 - v2) W
  std::vector<double> thresholds;
};

// Targets along the first axis at 0, step, 2 step, ... up to reach.
std::vector<Eigen::VectorXd> target_sweep(int dim, double step, double reach);

Verdict distinguish(const Grid& g, const Eigen::ArrayXd& v1_hat, const Eigen::ArrayXd& v2_hat, const WindowSpec& spec,
                    const std::vector<Eigen::VectorXd>& targets, double tol = 1e-9);

}  // namespace hfscat
