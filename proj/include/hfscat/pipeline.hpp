#pragma once
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hfscat/config.hpp"
#include "hfscat/inversion.hpp"
#include "hfscat/kernels.hpp"
#include "hfscat/scattering.hpp"

namespace hfscat {

// Pairings <i(S-I) Phi(lambda), Phi(lambda)> for the kernel orbital over the lambda grid.
struct ForwardData {
  LambdaGrid lambda;
  std::vector<cplx> pairing;
  Eigen::VectorXd data;          // Re pairing / (2pi)^{n/2}
  std::vector<double> horizon;   // T / (1 + lambda)
  std::vector<double> unitarity;
  OrbitalSet last;               // f_+ at the last lambda
};

ForwardData forward_pairings(const RunConfig& c);
KernelKind model_kernel(Model m);
KernelMatrix build_kernel(const RunConfig& c);
ScatterOptions scatter_options(const RunConfig& c, double lambda = 0.0);

// Filtered V_hat averaged over each shell.
Eigen::VectorXd true_spectrum(const RealizedPotential& v, const XiShells& xi);

// Shells where the spectral floor is fully open and the weighted column norm of K
// is at least sqrt(rank_tol) of the largest one.
std::vector<bool> resolvable_band(const KernelMatrix& k, const RealizedPotential& v, double rank_tol);

// Relative weighted L2 error over the selected shells.
double band_error(const Eigen::VectorXd& est, const Eigen::VectorXd& truth, const Eigen::VectorXd& w,
                  const std::vector<bool>& band);

// (2pi)^{n/2} \int V_hat K(xi, 0) over every shell V_hat and the lambda = 0 kernel can reach.
double reference_pairing(const RunConfig& c);

// Additive iid normal noise, sigma = level * max|p|.
Eigen::VectorXd add_noise(const Eigen::VectorXd& p, double level, std::uint64_t seed);

// Sub-commands. Each writes into out and refreshes out/manifest.json.
void run_forward(const RunConfig& c, const std::filesystem::path& out);
void run_kernel(const RunConfig& c, const std::filesystem::path& out);
void run_invert(const RunConfig& c, const std::filesystem::path& out, const std::string& reg_override = {});
void run_pairing_sweep(const RunConfig& c, const std::filesystem::path& out);
void run_uniqueness(const RunConfig& c, const std::filesystem::path& out);
void run_report(const RunConfig& c, const std::filesystem::path& out);

// body(i) for i in [0, count), strided over a fixed pool; results must be written by index.
template <typename F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hfscat
