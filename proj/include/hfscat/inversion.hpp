#pragma once
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hfscat/errors.hpp"
#include "hfscat/kernels.hpp"

namespace hfscat {

// Singular system of f -> sum_m K_im f_m wxi_m between L2(xi, wxi) and L2(lambda, wlambda).
template <typename Scalar>
struct SingularSystem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Vector mu;
  Matrix phi;  // columns: right vectors on the xi nodes
  Matrix g;    // columns: left vectors on the lambda nodes
  Vector xi_weights, lambda_weights;
  Eigen::Index numerical_rank = 0;
  Scalar rank_tol = Scalar(1e-10);
  std::string algorithm;
};

template <typename Scalar>
struct PicardDiagnostic {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector coefficients;  // <P, g_n>
  Vector ratios;        // c_n / mu_n, zero past the numerical rank
  Vector partial_sums;  // sum_{m<=n} |c_m / mu_m|^2 up to the rank
  Scalar null_component = 0;
  bool divergence_flag = false;
};

enum class RegMethod { tsvd, discrepancy, tikhonov };

struct Regularization {
  RegMethod method = RegMethod::discrepancy;
  int truncation = -1;           // tsvd; -1 means the numerical rank
  double tau = 1.1;              // discrepancy
  double noise_estimate = 0.0;   // weighted L2 size of the data noise
  double alpha = 0.0;            // tikhonov
};

std::string reg_method_name(RegMethod m);
// "tsvd:k", "discrepancy:tau", "tikhonov:alpha".
Regularization parse_regularization(const std::string& s);

template <typename Scalar>
struct ReconstructionResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector v_hat;
  Eigen::Index truncation_index = 0;
  PicardDiagnostic<Scalar> picard;
  Scalar residual = 0;
  Vector residual_history;  // residual after n terms, n = 0..rank
  Regularization reg;
};

template <typename Scalar>
SingularSystem<Scalar> singular_system(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& k,
                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lambda_weights,
                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& xi_weights,
                                       Scalar rank_tol = Scalar(1e-10)) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (k.rows() != lambda_weights.size() || k.cols() != xi_weights.size())
    throw InvalidInput("kernel shape does not match the quadrature weights");
  if (!k.allFinite()) throw NumericalFailure("kernel has non-finite entries");
  if ((lambda_weights.array() <= 0).any() || (xi_weights.array() <= 0).any())
    throw InvalidInput("quadrature weights must be positive");
  const auto sl = lambda_weights.cwiseSqrt();
  const auto sx = xi_weights.cwiseSqrt();
  const Matrix a = sl.asDiagonal() * k * sx.asDiagonal();

  SingularSystem<Scalar> s;
  Matrix u, v;
  Eigen::BDCSVD<Matrix> bdc(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (bdc.info() == Eigen::Success && bdc.singularValues().allFinite()) {
    s.mu = bdc.singularValues();
    u = bdc.matrixU();
    v = bdc.matrixV();
    s.algorithm = "bdcsvd";
  } else {
    Eigen::JacobiSVD<Matrix> jac(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (jac.info() != Eigen::Success || !jac.singularValues().allFinite())
      throw NumericalFailure("SVD did not converge after retry");
    s.mu = jac.singularValues();
    u = jac.matrixU();
    v = jac.matrixV();
    s.algorithm = "jacobisvd";
  }
  s.phi = sx.cwiseInverse().asDiagonal() * v;
  s.g = sl.cwiseInverse().asDiagonal() * u;
  for (Eigen::Index n = 0; n < s.phi.cols(); ++n) {
    const Scalar big = s.phi.col(n).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < s.phi.rows(); ++i)
      if (std::abs(s.phi(i, n)) > Scalar(1e-8) * big) {
        if (s.phi(i, n) < 0) {
          s.phi.col(n) *= -1;
          s.g.col(n) *= -1;
        }
        break;
      }
  }
  s.xi_weights = xi_weights;
  s.lambda_weights = lambda_weights;
  s.rank_tol = rank_tol;
  s.numerical_rank = 0;
  if (s.mu.size() > 0 && s.mu[0] > 0)
    while (s.numerical_rank < s.mu.size() && s.mu[s.numerical_rank] >= rank_tol * s.mu[0]) ++s.numerical_rank;
  return s;
}

SingularSystem<double> singular_system(const KernelMatrix& k, double rank_tol = 1e-10);

template <typename Scalar>
Scalar weighted_norm(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& w) {
  return std::sqrt((f.array().square() * w.array()).sum());
}

// max |K phi_n - mu_n g_n| and max |K^T W g_n - mu_n phi_n| over n, relative to mu_1.
template <typename Scalar>
Scalar singular_residual(const SingularSystem<Scalar>& s,
                         const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& k) {
  if (s.mu.size() == 0 || s.mu[0] == 0) return 0;
  Scalar r = 0;
  for (Eigen::Index n = 0; n < s.mu.size(); ++n) {
    const auto kf = (k * s.xi_weights.asDiagonal() * s.phi.col(n)).eval();
    const auto kg = (k.transpose() * s.lambda_weights.asDiagonal() * s.g.col(n)).eval();
    r = std::max(r, (kf - s.mu[n] * s.g.col(n)).cwiseAbs().maxCoeff());
    r = std::max(r, (kg - s.mu[n] * s.phi.col(n)).cwiseAbs().maxCoeff());
  }
  return r / s.mu[0];
}

// Largest deviation of the weighted Gram matrices from the identity.
template <typename Scalar>
Scalar orthonormality_defect(const SingularSystem<Scalar>& s) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix gp = s.phi.transpose() * s.xi_weights.asDiagonal() * s.phi;
  const Matrix gg = s.g.transpose() * s.lambda_weights.asDiagonal() * s.g;
  return std::max((gp - Matrix::Identity(gp.rows(), gp.cols())).cwiseAbs().maxCoeff(),
                  (gg - Matrix::Identity(gg.rows(), gg.cols())).cwiseAbs().maxCoeff());
}

template <typename Scalar>
PicardDiagnostic<Scalar> picard_diagnostic(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& p,
                                           const SingularSystem<Scalar>& s) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (p.size() != s.g.rows()) throw InvalidInput("data length does not match the lambda grid");
  PicardDiagnostic<Scalar> d;
  const Eigen::Index r = s.numerical_rank;
  d.coefficients = s.g.transpose() * (s.lambda_weights.array() * p.array()).matrix();
  d.ratios = Vector::Zero(d.coefficients.size());
  d.partial_sums = Vector::Zero(r);
  Scalar acc = 0;
  for (Eigen::Index n = 0; n < r; ++n) {
    d.ratios[n] = d.coefficients[n] / s.mu[n];
    acc += d.ratios[n] * d.ratios[n];
    d.partial_sums[n] = acc;
  }
  const Vector range = s.g.leftCols(r) * d.coefficients.head(r);
  d.null_component = weighted_norm<Scalar>(p - range, s.lambda_weights);
  if (r >= 4) {
    const Scalar half = d.partial_sums[r / 2 - 1], three = d.partial_sums[(3 * r) / 4 - 1];
    const Scalar last = d.partial_sums[r - 1] - three, mid = three - half;
    d.divergence_flag = last > 10 * mid && last > std::numeric_limits<Scalar>::epsilon() * d.partial_sums[r - 1];
  }
  return d;
}

template <typename Scalar>
ReconstructionResult<Scalar> reconstruct(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& p,
                                         const SingularSystem<Scalar>& s, const Regularization& reg) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index r = s.numerical_rank;
  if (r == 0) throw NumericalFailure("no singular value above the rank tolerance");
  ReconstructionResult<Scalar> out;
  out.reg = reg;
  out.picard = picard_diagnostic(p, s);
  const Vector& c = out.picard.coefficients;
  out.residual_history.resize(r + 1);
  Vector fit = Vector::Zero(p.size());
  out.residual_history[0] = weighted_norm<Scalar>(p, s.lambda_weights);
  for (Eigen::Index n = 0; n < r; ++n) {
    fit += c[n] * s.g.col(n);
    out.residual_history[n + 1] = weighted_norm<Scalar>(p - fit, s.lambda_weights);
  }

  Vector filter = Vector::Zero(s.mu.size());
  switch (reg.method) {
    case RegMethod::tsvd: {
      const Eigen::Index k = reg.truncation < 0 ? r : std::min<Eigen::Index>(reg.truncation, r);
      filter.head(k).setOnes();
      out.truncation_index = k;
      break;
    }
    case RegMethod::discrepancy: {
      if (!(reg.tau > 0) || !(reg.noise_estimate >= 0)) throw InvalidInput("discrepancy needs tau > 0, noise >= 0");
      Eigen::Index k = r;
      for (Eigen::Index n = 0; n <= r; ++n)
        if (out.residual_history[n] <= Scalar(reg.tau * reg.noise_estimate)) {
          k = n;
          break;
        }
      filter.head(k).setOnes();
      out.truncation_index = k;
      break;
    }
    case RegMethod::tikhonov: {
      if (!(reg.alpha > 0)) throw InvalidInput("tikhonov needs alpha > 0");
      for (Eigen::Index n = 0; n < r; ++n) filter[n] = s.mu[n] * s.mu[n] / (s.mu[n] * s.mu[n] + Scalar(reg.alpha));
      out.truncation_index = r;
      break;
    }
  }
  out.v_hat = Vector::Zero(s.phi.rows());
  Vector model = Vector::Zero(p.size());
  for (Eigen::Index n = 0; n < r; ++n) {
    if (filter[n] == 0) continue;
    out.v_hat += filter[n] * c[n] / s.mu[n] * s.phi.col(n);
    model += filter[n] * c[n] * s.g.col(n);
  }
  out.residual = weighted_norm<Scalar>(p - model, s.lambda_weights);
  if (!out.v_hat.allFinite() || !std::isfinite(static_cast<double>(out.residual)))
    throw NumericalFailure("reconstruction produced non-finite values");
  return out;
}

// Component of f in span{phi_1..phi_rank} (weighted projection).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> range_component(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f,
                                                         const SingularSystem<Scalar>& s, Eigen::Index k = -1) {
  if (k < 0) k = s.numerical_rank;
  const auto basis = s.phi.leftCols(k);
  return basis * (basis.transpose() * (s.xi_weights.array() * f.array()).matrix());
}

// Radial inverse transform V(r) = (2pi)^{-n/2} sum_m vhat_m w_m <e^{i x.xi}>_{|xi| = xi_m}.
// A shell of radius 0 may be included.
Eigen::VectorXd fourier_to_potential(int dim, const Eigen::VectorXd& xi_radii, const Eigen::VectorXd& xi_weights,
                                     const Eigen::VectorXd& v_hat, const Eigen::VectorXd& radii);
// Complex input: the imaginary part must be below 1e-10 of the largest modulus.
Eigen::VectorXd fourier_to_potential(int dim, const Eigen::VectorXd& xi_radii, const Eigen::VectorXd& xi_weights,
                                     const Eigen::VectorXcd& v_hat, const Eigen::VectorXd& radii);
// Average of e^{i x.xi} over the sphere |x| |xi| = z in dimension n.
double spherical_average(int dim, double z);

}  // namespace hfscat
