#pragma once
#include <optional>
#include <string>
#include <vector>

#include "hfscat/dynamics.hpp"

namespace hfscat {

struct ScatterOptions {
  double horizon = 24.0;
  double dt = 0.01;
  EvolveOptions evolve;
  bool decompose = false;  // L, R1, R2, R3; single orbital only
  // Fields to pair against, one per orbital; empty means the incoming orbitals.
  std::vector<Field> pairing_probes;
};

struct Decomposition {
  cplx leading{}, r1{}, r2{}, r3{};
  cplx leading_frequency{};  // same L evaluated as (2pi)^{n/2} sum V^ |F|w|^2|^2
  cplx total() const { return leading + r1 + r2 + r3; }
};

struct ScatterResult {
  OrbitalSet f_plus;
  std::vector<cplx> pairing;  // <i(S-I) f_-, probe> accumulated step by step
  std::vector<cplx> duhamel;  // midpoint-rule \int <F(u), U0(t) probe> dt
  std::optional<Decomposition> decomposition;
  double unitarity_defect = 0.0;  // max_j | ||f_+|| - ||f_-|| | / ||f_-||
};

// Radius (about the circular center) holding all but `tail` of the mass, and
// the same for the spectrum about its mean frequency.
double spatial_radius(const Field& f, double tail = 1e-10);
double spectral_radius(const Field& f, double tail = 1e-10);

// Co-moving transit check: every packet stays inside half the box over [-T, T].
void check_transit(const OrbitalSet& f_minus, double horizon);

ScatterResult forward_scatter(const OrbitalSet& f_minus, const RealizedPotential& v, Model m, const ScatterOptions& opt);

// h^n sum i (f_+ - f_-) conj(probe).
cplx pairing(const Field& f_minus, const Field& f_plus, const Field& probe);

// ||f_+(T) - f_+(2T)|| relative to ||f_-||, worst orbital.
double horizon_stability(const OrbitalSet& f_minus, const RealizedPotential& v, Model m, const ScatterOptions& opt);

struct SweepRow {
  double abscissa = 0.0;  // |v| or epsilon
  cplx pairing{};         // raw pairing, or eps^{-3} pairing for amplitude sweeps
  double remainder = 0.0;
  double slope_so_far = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double reference = 0.0;
  double slope = 0.0;          // log-log fit of |remainder| vs |v|
  cplx extrapolated{};         // Richardson value (amplitude sweeps)
  bool flagged = false;
  std::string note;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Incoming orbitals e^{iv.x} phi^{(k)}((lambda+1)x) for each probe spec.
OrbitalSet probe_orbitals(const Grid& g, const std::vector<ProbeSpec>& probes, const Eigen::VectorXd& v);

// |v| values along e_1; each run pairs orbital j against its incoming field.
SweepTable high_velocity_sweep(const Grid& g, const std::vector<ProbeSpec>& probes, std::size_t j,
                               const RealizedPotential& v, Model m, const std::vector<double>& speeds,
                               const ScatterOptions& opt, double reference);

SweepTable small_amplitude_sweep(const Grid& g, const std::vector<ProbeSpec>& probes, std::size_t j,
                                 const RealizedPotential& v, Model m, const std::vector<double>& amplitudes,
                                 const ScatterOptions& opt);

struct DecompositionReport {
  Decomposition parts;
  cplx direct{};
  double closure_defect = 0.0;  // |L+R1+R2+R3 - direct| / |direct|
};

DecompositionReport remainder_decomposition(const Grid& g, const ProbeSpec& probe, const RealizedPotential& v,
                                            const Eigen::VectorXd& velocity, const ScatterOptions& opt);

}  // namespace hfscat
