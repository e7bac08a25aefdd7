#pragma once
#include <vector>

#include "hfscat/grid.hpp"

namespace hfscat {

// e^{-it|xi|^2/2} on the dual lattice.
class PropagationPlan {
 public:
  PropagationPlan(const Grid& g, double t);
  const Grid& grid() const { return grid_; }
  double time() const { return time_; }
  const Eigen::ArrayXcd& multiplier() const { return multiplier_; }
  Field apply(const Field& f) const;

 private:
  Grid grid_;
  double time_;
  Eigen::ArrayXcd multiplier_;
};

Eigen::ArrayXcd free_multiplier(const Grid& g, double t);

// Result keeps the input representation.
Field free_propagate(const Field& f, double t);

// max |U0(s)Phi_v - e^{i(v.x - |v|^2 s/2)} (U0(s)phi)(x - vs)|; vs must be whole cells.
double galilean_check(const Field& phi, const Eigen::VectorXd& v, double s);

// Closed-form free evolution of e^{-x^2/2} in one dimension.
cplx gaussian_free_solution(double x, double t);

// Discrete \int\int |U0(t)phi|^4 dx dt over |t| <= T, trapezoid in t.
double strichartz_l4(const Field& phi, double horizon, double dt);

// Circular mean of |f|^2 along each axis (position representation).
Eigen::VectorXd circular_center(const Field& f);

// Fraction of mass outside the box of half-width w centered at c (periodic distance).
double mass_outside_box(const Field& f, const Eigen::VectorXd& c, double w);

}  // namespace hfscat
