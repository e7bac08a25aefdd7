#include "hfscat/inversion.hpp"

#include <cmath>
#include <stdexcept>

namespace hfscat {

std::string reg_method_name(RegMethod m) {
  switch (m) {
    case RegMethod::tsvd: return "tsvd";
    case RegMethod::discrepancy: return "discrepancy";
    case RegMethod::tikhonov: return "tikhonov";
  }
  return "?";
}

Regularization parse_regularization(const std::string& s) {
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  Regularization r;
  try {
    if (name == "tsvd") {
      r.method = RegMethod::tsvd;
      r.truncation = arg.empty() ? -1 : std::stoi(arg);
    } else if (name == "discrepancy") {
      r.method = RegMethod::discrepancy;
      if (!arg.empty()) r.tau = std::stod(arg);
    } else if (name == "tikhonov") {
      r.method = RegMethod::tikhonov;
      r.alpha = std::stod(arg);
    } else {
      throw InvalidInput("unknown regularization '" + s + "'");
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) throw;
    throw InvalidInput("bad regularization parameter in '" + s + "'");
  }
  return r;
}

SingularSystem<double> singular_system(const KernelMatrix& k, double rank_tol) {
  return singular_system<double>(k.entries, k.lambda.weights, k.xi.weight_vector(), rank_tol);
}

double spherical_average(int dim, double z) {
  if (z == 0.0) return 1.0;
  switch (dim) {
    case 1: return std::cos(z);
    case 2: return std::cyl_bessel_j(0.0, z);
    case 3: return std::sin(z) / z;
    default: {
      const double nu = 0.5 * dim - 1.0;
      return std::tgamma(0.5 * dim) * std::pow(2.0 / z, nu) * std::cyl_bessel_j(nu, z);
    }
  }
}

Eigen::VectorXd fourier_to_potential(int dim, const Eigen::VectorXd& xi_radii, const Eigen::VectorXd& xi_weights,
                                     const Eigen::VectorXd& v_hat, const Eigen::VectorXd& radii) {
  if (xi_radii.size() != xi_weights.size() || xi_radii.size() != v_hat.size())
    throw InvalidInput("radial spectrum arrays differ in length");
  if (dim < 1) throw InvalidInput("dimension must be positive");
  const double c = std::pow(2.0 * pi, -0.5 * dim);
  Eigen::VectorXd v(radii.size());
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < xi_radii.size(); ++m)
      sum += v_hat[m] * xi_weights[m] * spherical_average(dim, radii[i] * xi_radii[m]);
    v[i] = c * sum;
  }
  return v;
}

Eigen::VectorXd fourier_to_potential(int dim, const Eigen::VectorXd& xi_radii, const Eigen::VectorXd& xi_weights,
                                     const Eigen::VectorXcd& v_hat, const Eigen::VectorXd& radii) {
  const double big = v_hat.size() ? v_hat.cwiseAbs().maxCoeff() : 0.0;
  if (v_hat.size() && v_hat.imag().cwiseAbs().maxCoeff() > 1e-10 * big)
    throw InvalidInput("Fourier data is not real within 1e-10");
  return fourier_to_potential(dim, xi_radii, xi_weights, Eigen::VectorXd(v_hat.real()), radii);
}

}  // namespace hfscat
