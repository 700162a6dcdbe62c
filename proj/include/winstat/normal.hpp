#pragma once

// Univariate and bivariate normal distribution helpers.
//
// norm_ppf is ALGORITHM AS241 (Wichura 1988), accurate to ~1 part in 1e16.
// bvn_upper is the Genz/Ge BVND algorithm (Drezner-Wesolowsky with Gauss-
// Legendre rules and an asymptotic split at |rho| = 0.925).

namespace winstat {

// Standard normal density.
double norm_pdf(double z);

// Standard normal lower-tail CDF, Phi(z).
double norm_cdf(double z);

// Inverse of norm_cdf on (0,1).  Throws std::domain_error outside (0,1).
double norm_ppf(double p);

// P(X > h, Y > k) for standard bivariate normal with correlation rho.
double bvn_upper(double h, double k, double rho);

// P(X <= h, Y <= k): lower orthant, same correlation.
double bvn_cdf(double h, double k, double rho);

}  // namespace winstat
