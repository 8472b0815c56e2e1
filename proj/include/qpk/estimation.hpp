#pragma once

#include <utility>
#include <vector>

#include "qpk/models.hpp"
#include "qpk/oracle.hpp"

namespace qpk {

/// Threshold sensitivity implied by one measurement:
/// beta1 = (c1 - c2) / (d2 - d1).
/// Throws DegenerateError at equal prices or when |d2 - d1| < 1e-12.
double infer_threshold(const Measurement& m);

struct ExponentialFit {
  double tau = 0.0;  // mean sensitivity
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  double mass = 0.0;  // (gamma1 - gamma1_delta) / lambda
  Measurement base;
  Measurement stepped;

  double rate() const noexcept { return 1.0 / tau; }
};

/// Mean of an exponential sensitivity law from two measurements at
/// (c1, c2) and (c1 + delta, c2): solves
///   exp(-beta_lo / tau) - exp(-beta_hi / tau) = mass
/// for tau in [1e-6, 1e6]. The left side is unimodal in tau, so there can
/// be a root on either side of its peak; the one whose tail mass
/// exp(-beta_lo / tau) best matches the observed gamma1 / lambda is kept.
ExponentialFit estimate_exponential(Oracle& oracle, double c1, double c2, double delta);

struct ParametricFit {
  DistFamily family = DistFamily::Exponential;
  std::vector<double> parameters;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<Measurement> measurements;

  SensitivityDistribution distribution() const {
    return SensitivityDistribution::from_parameters(family, parameters);
  }
};

/// Least-squares fit of a parametric law to interval masses.
///
/// Measures at (c1, c2) for every c1 in `prices` (strictly increasing, all
/// above c2), infers each threshold, and matches
///   F(beta_{i+1}) - F(beta_i) = (gamma_i - gamma_{i+1}) / lambda
/// for consecutive pairs, plus the tail mass 1 - F(beta_last) =
/// gamma_last / lambda of the all-on-server-2 limit. Minimized by a
/// pattern search (coordinate steps that halve on failure) over log
/// parameters, started from an exponential tail fit:
///   exponential: tau0;  gamma: k = 1, theta = tau0;
///   uniform: a = beta_first / 2, b = 1.5 * beta_last;
///   power: n = 1, B = 1.5 * beta_last.
ParametricFit estimate_parametric(Oracle& oracle, DistFamily family, double c2,
                                  const std::vector<double>& prices);

struct DensityBin {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  double z = 0.0;
};

struct DensityEstimate {
  std::vector<DensityBin> bins;
  double covered_mass = 0.0;  // sum of z * width over bins
  double swept_mass = 0.0;    // (gamma1 at first step - gamma1 at last step) / lambda
  /// (c1, c1 + delta) pairs skipped because they carried no information.
  std::vector<std::pair<double, double>> gaps;
  std::vector<Measurement> log;
  std::vector<double> thresholds;  // inferred beta1 per log entry
};

/// Piecewise-constant density from a price sweep c1 = c1_start + i * delta,
/// i = 0..steps, at fixed c2. Each informative consecutive pair gives a bin
/// [beta1, beta1_delta] with height
///   z = (gamma1 - gamma1_delta) / (lambda * (beta1_delta - beta1)).
/// At c1 == c2 the threshold is not identifiable from one reading; a probe
/// at c1 + 1e-4 * delta takes that reading's place in the log.
DensityEstimate estimate_density(Oracle& oracle, double c2, double c1_start, double delta,
                                 int steps);

struct DiscoveredClass {
  double beta = 0.0;
  /// Rate seen to migrate to server 1. Exact for resolved classes; a lower
  /// bound for the last class when the sweep ended mid-migration.
  double rate = 0.0;
  bool resolved = false;
};

struct DiscreteClasses {
  std::vector<DiscoveredClass> classes;  // decreasing beta, discovery order
  bool complete = false;
  double residual_rate = 0.0;  // lambda - sum of class rates

  /// Class rates with the unexplained residual attributed to the last,
  /// unresolved class. Valid when no undiscovered class exists.
  std::vector<double> closed_rates() const;
};

/// Recovers (beta_i, lambda_i) of a finite-class population by lowering c1
/// from c1_init in steps of delta with c2 = 0. A class enters when gamma1
/// rises by at least eps over the last plateau; its beta follows from the
/// indifference identity c1 = beta * (d2 - d1). Two consecutive steps with
/// |change in gamma1| < eps declare a plateau whose rise over the previous
/// one is the class rate. Stops at c1 <= 0 or once all of lambda migrated.
DiscreteClasses discover_classes(Oracle& oracle, double lambda, double delta, double eps,
                                 double c1_init);

}  // namespace qpk
