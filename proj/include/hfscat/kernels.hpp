#pragma once
#include <functional>
#include <string>
#include <vector>

#include "hfscat/grid.hpp"

namespace hfscat {

// F(|U0(t) phi|^2) and F((U0(t) a) conj(U0(t) b)), frequency representation.
Field density_spectrum(const Field& phi, double t);
Field pair_spectrum(const Field& a, const Field& b, double t);

// Radial shells of lattice nodes, origin excluded. Shell m collects nodes with
// |xi| in [r_m - dxi/2, r_m + dxi/2), r_m = m dxi; weight = count * dxi^n.
struct XiShells {
  std::vector<double> radii;
  std::vector<double> weights;
  std::vector<std::vector<Eigen::Index>> members;
  std::size_t size() const { return radii.size(); }
  Eigen::VectorXd radius_vector() const;
  Eigen::VectorXd weight_vector() const;
};

XiShells radial_shells(const Grid& g, double xi_min, double xi_max);

struct LambdaGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // trapezoid
};

LambdaGrid make_lambda_grid(double lambda_min, double lambda_max, int count);

struct TimeQuadrature {
  double step = 0.0;           // 0 picks step_factor / (oscillation bound)
  double step_factor = 0.25;
  double initial_window = 4.0;
  double tail_tol = 1e-8;
  int max_doublings = 10;
  double revival_fraction = 0.75;
  bool allow_scaling = false;  // G only: reuse the lambda = 0 row when exact
  int threads = 1;
};

enum class KernelKind { G, H, HF };
std::string kernel_kind_name(KernelKind k);

struct KernelMatrix {
  KernelKind kind = KernelKind::G;
  int orbital = 0;
  std::string convention;
  LambdaGrid lambda;
  XiShells xi;
  Eigen::MatrixXd entries;               // rows lambda, columns shells
  std::vector<std::string> row_source;   // "recomputed" or "scaled"
  std::vector<double> row_step, row_window;
  std::vector<double> dropped_radii;     // shells removed for tail non-convergence
  double max_imag_residue = 0.0;
  double lipschitz = 0.0;
};

// Dilated profile spectrum phi^_lambda for a given lambda.
using ProfileFamily = std::function<Field(double)>;
ProfileFamily probe_family(const Grid& g, const ProbeSpec& probe);
ProfileFamily field_family(const Field& phi);

KernelMatrix kernel_G(const ProfileFamily& phi, const LambdaGrid& lambda, const XiShells& xi,
                      const TimeQuadrature& quad);
KernelMatrix kernel_H(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                      const XiShells& xi, const TimeQuadrature& quad);
KernelMatrix kernel_HF(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                       const XiShells& xi, const TimeQuadrature& quad);

// Exchange part alone: sum_k \int |F(U0 phi_j conj U0 phi_k)|^2 dt (shell averaged).
KernelMatrix exchange_kernel(const std::vector<ProfileFamily>& probes, std::size_t j, const LambdaGrid& lambda,
                             const XiShells& xi, const TimeQuadrature& quad);

// Per-node time integrals of one row before shell averaging (complex).
struct NodeIntegrals {
  std::vector<Eigen::Index> nodes;
  Eigen::ArrayXcd values;
  Eigen::ArrayXd magnitude;  // time integral of the summed term moduli
  std::vector<bool> converged;
  std::vector<double> windows;  // half-window at which each node stopped
  double step = 0.0, window = 0.0;
};
enum class Integrand { G, H, HF, exchange };
NodeIntegrals node_integrals(Integrand kind, const std::vector<Field>& spectra, std::size_t j,
                             const std::vector<Eigen::Index>& nodes, const TimeQuadrature& quad);

// P_i = sum_m K_im V_m w_m.
Eigen::VectorXd forward_map(const Eigen::VectorXd& v_hat, const KernelMatrix& k);

// max_i sum_m |K_{i+1,m} - K_{i,m}| w_m / (lambda_{i+1} - lambda_i).
double lipschitz_constant(const KernelMatrix& k);

}  // namespace hfscat
