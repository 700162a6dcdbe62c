#pragma once

#include <variant>
#include <vector>

// Marginal time-to-event models.  All three variants expose the same
// operations through the free functions below; hazard-type quantities at a
// breakpoint return the right-limit value.

namespace winstat {

class Exponential {
 public:
  explicit Exponential(double rate);
  double survival(double t) const;
  double density(double t) const;
  double hazard(double t) const;
  double cumulative_hazard(double t) const;
  double inverse_survival(double u) const;  // t with S(t) = u, u in (0,1]
  double rate() const { return rate_; }

 private:
  double rate_;
};

class PiecewiseExponential {
 public:
  // rates.size() == breakpoints.size() + 1; rates[j] applies on
  // [breakpoints[j-1], breakpoints[j]) with breakpoints[-1] = 0 and the last
  // rate extending to infinity.
  PiecewiseExponential(std::vector<double> breakpoints, std::vector<double> rates);
  double survival(double t) const;
  double density(double t) const;
  double hazard(double t) const;
  double cumulative_hazard(double t) const;
  double inverse_survival(double u) const;
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& rates() const { return rates_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> rates_;
  std::vector<double> cum_;  // cumulative hazard at each breakpoint
};

class Tabulated {
 public:
  // Survival given on a grid; log-linear interpolation between grid points
  // (piecewise-constant hazard) and an exponential tail continuing the last
  // segment's hazard.  Grid must start at (0, 1), be strictly increasing in
  // time, and survival must be strictly decreasing and positive.
  Tabulated(std::vector<double> times, std::vector<double> survival_values);
  double survival(double t) const;
  double density(double t) const;
  double hazard(double t) const;
  double cumulative_hazard(double t) const;
  double inverse_survival(double u) const;
  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
  std::vector<double> cumhaz_;  // -log survival at grid points
  double tail_rate_;
};

using MarginalModel = std::variant<Exponential, PiecewiseExponential, Tabulated>;

double survival(const MarginalModel& m, double t);
double density(const MarginalModel& m, double t);
double hazard(const MarginalModel& m, double t);
double cumulative_hazard(const MarginalModel& m, double t);
double inverse_survival(const MarginalModel& m, double u);

// Time points where the hazard may jump; used as quadrature knots.
std::vector<double> breakpoints(const MarginalModel& m);

// Proportional-hazards scaling: the returned model has cumulative hazard
// factor * H(t).  Used to derive a treatment marginal from a control one.
MarginalModel scale_hazard(const MarginalModel& m, double factor);

}  // namespace winstat
