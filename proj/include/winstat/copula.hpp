#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>
#include <vector>

#include "winstat/rng.hpp"
#include "winstat/survival.hpp"

// Joint survival models: marginal time-to-event laws tied together by a
// survival copula.  Two families:
//  - Gumbel-Hougaard with parameter kappa >= 1 (kappa = 1 is independence);
//    Kendall's tau = 1 - 1/kappa.
//  - Gaussian with a correlation matrix; pairwise Kendall's tau maps to the
//    normal correlation via rho = sin(pi * tau / 2).

namespace winstat {

struct GumbelHougaard {
  double kappa;
};

struct GaussianCopula {
  Eigen::MatrixXd corr;
};

using CopulaSpec = std::variant<GumbelHougaard, GaussianCopula>;

double tau_to_kappa(double tau);  // tau in [0, 1)
double kappa_to_tau(double kappa);
double tau_to_gauss_rho(double tau);  // sin(pi tau / 2), tau in (-1, 1)

// Exchangeable Gaussian correlation matrix with all off-diagonals equal to
// tau_to_gauss_rho(tau).
Eigen::MatrixXd exchangeable_gauss_corr(int dim, double tau);

// Lower-orthant probability P(Z_i <= upper_i for all i) for N(0, corr).
// dim <= 2 use closed forms; dim >= 3 uses the Genz sequential-conditioning
// integrand over a shifted Richtmyer quasi-Monte Carlo rule with fixed seeds,
// escalating the sample count until the estimated absolute error is below
// `target_error`.  Deterministic for identical inputs.
double mvn_cdf(const Eigen::VectorXd& upper, const Eigen::MatrixXd& corr,
               double target_error = 1e-7, double* error_estimate = nullptr);

class ArmJointModel {
 public:
  ArmJointModel(std::vector<MarginalModel> marginals, CopulaSpec copula);

  int dimension() const { return static_cast<int>(marginals_.size()); }
  const MarginalModel& marginal(int k) const { return marginals_[static_cast<std::size_t>(k)]; }
  const CopulaSpec& copula() const { return copula_; }

  // P(Y_k > y_k for all k).  Coordinates with y_k <= 0 impose no constraint.
  double joint_survival(std::span<const double> y) const;

  // -d/dy_k of joint_survival at y; requires y_k > 0.
  double neg_partial(std::span<const double> y, int k) const;

  // Draw one event-time vector into `out` (size == dimension()).
  void sample(RngStream& rng, std::span<double> out) const;

 private:
  std::vector<MarginalModel> marginals_;
  CopulaSpec copula_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor, Gaussian family only
};

}  // namespace winstat
