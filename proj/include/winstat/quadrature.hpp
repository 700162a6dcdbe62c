#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

// Adaptive 1-D quadrature on finite intervals: 15-point Kronrod extension of
// the 7-point Gauss rule per segment, bisecting the segment with the largest
// error estimate until the global tolerance is met.  Known non-smooth points
// (distribution breakpoints, the accrual window edge) are passed as knots and
// become initial segment boundaries so the rule never straddles them.

namespace winstat {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
  bool converged = false;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double achieved, double requested)
      : std::runtime_error("quadrature failed to converge: achieved error " +
                           std::to_string(achieved) + ", requested " +
                           std::to_string(requested)),
        achieved_error(achieved),
        requested_tolerance(requested) {}
  double achieved_error;
  double requested_tolerance;
};

class Integrator {
 public:
  struct Options {
    // The absolute floor accommodates integrands that are themselves computed
    // numerically (nested integrals, special functions): their noise floor
    // stops the error estimate from shrinking indefinitely, and demanding
    // less than a few 1e-10 absolute of such an integrand only manufactures
    // spurious convergence failures.
    double rel_tol = 1e-8;
    double abs_tol = 3e-9;
    int max_intervals = 2000;
  };

  Integrator() = default;
  explicit Integrator(Options opts) : opts_(opts) {}

  // Returns the integral of f over [a, b]; converged=false if the interval
  // budget ran out first.
  QuadResult try_integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> knots = {}) const;

  // As above but throws QuadratureError instead of returning converged=false.
  double integrate(const std::function<double(double)>& f, double a, double b,
                   std::span<const double> knots = {}) const;

  const Options& options() const { return opts_; }

 private:
  Options opts_;
};

}  // namespace winstat
