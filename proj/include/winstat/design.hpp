#pragma once

#include <functional>
#include <span>
#include <vector>

#include "winstat/winprob.hpp"

// Power and sample size for the win-ratio test.  The variance of ln WR-hat is
// approximated by variance_factor / N where
//   variance_factor = 4 (1 + p_tie) / (3 rho (1 - rho) (1 - p_tie)),
// rho the treatment allocation fraction and p_tie the probability that a
// random treatment-control pair ties.  Stratified designs combine per-stratum
// win/loss/tie mass with weights w_m and stratum sizes N_m = fraction_m * N.

namespace winstat {

struct DesignSpec {
  double alpha = 0.05;      // two-sided significance level
  double power = 0.9;       // target power (used by required_sample_size)
  double allocation = 0.5;  // treatment fraction rho
};

double yg_variance_factor(double p_tie, double rho);

// Power given the total variance factor (Var(ln WR-hat) = factor / N).
double power_from_variance(double win_ratio, double variance_factor, double n,
                           double alpha);

double power_at_n(double win_ratio, double p_tie, double n, double alpha, double rho);

struct SampleSize {
  long n = 0;                  // rounded-up total sample size
  double n_raw = 0.0;          // unrounded requirement
  double achieved_power = 0.0; // power at the rounded n
};

// Smallest even N meeting the target power at rho = 1/2; for other
// allocations, the smallest N whose realised allocation round(rho N) still
// meets the target.
SampleSize sample_size_from_variance(double win_ratio, double variance_factor,
                                     const DesignSpec& design);
SampleSize required_sample_size(double win_ratio, double p_tie, const DesignSpec& design);

// ---------------------------------------------------------------- stratified

struct StratumInput {
  double weight = 1.0;    // analysis weight w_m
  double fraction = 1.0;  // share of the total sample, sums to 1 across strata
  double win_sum = 0.0;   // total win probability in the stratum
  double loss_sum = 0.0;
  double tie = 0.0;
};

double stratified_win_ratio(std::span<const StratumInput> strata);
double stratified_tie(std::span<const StratumInput> strata);
// Multiplies 1/N to give Var(ln WR-hat); reduces exactly to
// yg_variance_factor at a single stratum.
double stratified_variance_factor(std::span<const StratumInput> strata, double rho);
double stratified_power_at_n(std::span<const StratumInput> strata, double n, double alpha,
                             double rho);
SampleSize stratified_required_sample_size(std::span<const StratumInput> strata,
                                           const DesignSpec& design);

// ----------------------------------------------------------------- tau grids

struct GridRow {
  double tau = 0.0;
  double study_length = 0.0;
  double win_ratio = 0.0;
  double p_tie = 0.0;
  long n = 0;              // sample-size mode
  double power = 0.0;      // fixed-n mode (and achieved power otherwise)
  double rcr = 0.0;        // relative change per 0.1 of tau; NaN on first row
};

// Sweeps tau within each study length (rows ordered by study length, then
// tau).  `evaluate` returns the win/loss/tie table for a (tau, s) cell.
// fixed_n <= 0 means sample-size mode.  RCR compares consecutive tau rows of
// the reported column (n or power) within one study length, scaled per
// delta-tau = 0.1.  `variance_inflation` multiplies the variance factor
// (stratified designs pass their weight-dependent inflation here, with
// `evaluate` returning the combined win/loss/tie mass).
std::vector<GridRow> correlation_grid(
    const std::function<WinLossTieTable(double tau, double study_length)>& evaluate,
    std::span<const double> taus, std::span<const double> study_lengths,
    const DesignSpec& design, long fixed_n = 0, int threads = 1,
    double variance_inflation = 1.0);

// Relative change rate between consecutive grid points, per 0.1 of tau.
double relative_change_rate(double x1, double y1, double x2, double y2);

}  // namespace winstat
