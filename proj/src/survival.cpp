#include "winstat/survival.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace winstat {

// ---------------------------------------------------------------- Exponential

Exponential::Exponential(double rate) : rate_(rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("Exponential: rate must be finite and > 0");
  }
}

double Exponential::survival(double t) const { return std::exp(-rate_ * t); }
double Exponential::density(double t) const { return rate_ * std::exp(-rate_ * t); }
double Exponential::hazard(double) const { return rate_; }
double Exponential::cumulative_hazard(double t) const { return rate_ * t; }
double Exponential::inverse_survival(double u) const { return -std::log(u) / rate_; }

// ------------------------------------------------------- PiecewiseExponential

PiecewiseExponential::PiecewiseExponential(std::vector<double> breakpoints,
                                           std::vector<double> rates)
    : breaks_(std::move(breakpoints)), rates_(std::move(rates)) {
  if (rates_.size() != breaks_.size() + 1) {
    throw std::invalid_argument("PiecewiseExponential: need one more rate than breakpoints");
  }
  double prev = 0.0;
  for (double b : breaks_) {
    if (!(b > prev) || !std::isfinite(b)) {
      throw std::invalid_argument(
          "PiecewiseExponential: breakpoints must be strictly increasing and > 0");
    }
    prev = b;
  }
  for (double r : rates_) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("PiecewiseExponential: rates must be finite and > 0");
    }
  }
  cum_.resize(breaks_.size());
  prev = 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < breaks_.size(); ++j) {
    acc += rates_[j] * (breaks_[j] - prev);
    cum_[j] = acc;
    prev = breaks_[j];
  }
}

double PiecewiseExponential::cumulative_hazard(double t) const {
  if (t <= 0.0) return 0.0;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - breaks_.begin());
  const double base = (j == 0) ? 0.0 : cum_[j - 1];
  const double t0 = (j == 0) ? 0.0 : breaks_[j - 1];
  return base + rates_[j] * (t - t0);
}

double PiecewiseExponential::hazard(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return rates_[static_cast<std::size_t>(it - breaks_.begin())];
}

double PiecewiseExponential::survival(double t) const {
  return std::exp(-cumulative_hazard(t));
}

double PiecewiseExponential::density(double t) const {
  return hazard(t) * survival(t);
}

double PiecewiseExponential::inverse_survival(double u) const {
  const double target = -std::log(u);
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  const std::size_t j = static_cast<std::size_t>(it - cum_.begin());
  const double base = (j == 0) ? 0.0 : cum_[j - 1];
  const double t0 = (j == 0) ? 0.0 : breaks_[j - 1];
  return t0 + (target - base) / rates_[j];
}

// ------------------------------------------------------------------ Tabulated

Tabulated::Tabulated(std::vector<double> times, std::vector<double> survival_values)
    : times_(std::move(times)) {
  if (times_.size() != survival_values.size() || times_.size() < 2) {
    throw std::invalid_argument("Tabulated: need matching grids with at least two points");
  }
  if (times_.front() != 0.0 || survival_values.front() != 1.0) {
    throw std::invalid_argument("Tabulated: grid must start at (0, 1)");
  }
  cumhaz_.resize(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("Tabulated: times must be strictly increasing");
    }
    const double s = survival_values[i];
    if (!(s > 0.0) || s > 1.0) {
      throw std::invalid_argument("Tabulated: survival values must lie in (0, 1]");
    }
    if (i > 0 && !(s < survival_values[i - 1])) {
      throw std::invalid_argument("Tabulated: survival values must be strictly decreasing");
    }
    cumhaz_[i] = -std::log(s);
  }
  const std::size_t n = times_.size();
  tail_rate_ = (cumhaz_[n - 1] - cumhaz_[n - 2]) / (times_[n - 1] - times_[n - 2]);
}

double Tabulated::cumulative_hazard(double t) const {
  if (t <= 0.0) return 0.0;
  const std::size_t n = times_.size();
  if (t >= times_[n - 1]) return cumhaz_[n - 1] + tail_rate_ * (t - times_[n - 1]);
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
  return cumhaz_[j - 1] + w * (cumhaz_[j] - cumhaz_[j - 1]);
}

double Tabulated::hazard(double t) const {
  const std::size_t n = times_.size();
  if (t >= times_[n - 1]) return tail_rate_;
  if (t < 0.0) t = 0.0;
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times_.begin());
  return (cumhaz_[j] - cumhaz_[j - 1]) / (times_[j] - times_[j - 1]);
}

double Tabulated::survival(double t) const { return std::exp(-cumulative_hazard(t)); }
double Tabulated::density(double t) const { return hazard(t) * survival(t); }

double Tabulated::inverse_survival(double u) const {
  const double target = -std::log(u);
  const std::size_t n = times_.size();
  if (target >= cumhaz_[n - 1]) {
    return times_[n - 1] + (target - cumhaz_[n - 1]) / tail_rate_;
  }
  const auto it = std::upper_bound(cumhaz_.begin(), cumhaz_.end(), target);
  const std::size_t j = static_cast<std::size_t>(it - cumhaz_.begin());
  const double w = (target - cumhaz_[j - 1]) / (cumhaz_[j] - cumhaz_[j - 1]);
  return times_[j - 1] + w * (times_[j] - times_[j - 1]);
}

// ------------------------------------------------------------------- dispatch

double survival(const MarginalModel& m, double t) {
  return std::visit([t](const auto& x) { return x.survival(t); }, m);
}
double density(const MarginalModel& m, double t) {
  return std::visit([t](const auto& x) { return x.density(t); }, m);
}
double hazard(const MarginalModel& m, double t) {
  return std::visit([t](const auto& x) { return x.hazard(t); }, m);
}
double cumulative_hazard(const MarginalModel& m, double t) {
  return std::visit([t](const auto& x) { return x.cumulative_hazard(t); }, m);
}
double inverse_survival(const MarginalModel& m, double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw std::domain_error("inverse_survival: u must lie in (0, 1]");
  }
  if (u == 1.0) return 0.0;
  return std::visit([u](const auto& x) { return x.inverse_survival(u); }, m);
}

std::vector<double> breakpoints(const MarginalModel& m) {
  struct Visitor {
    std::vector<double> operator()(const Exponential&) const { return {}; }
    std::vector<double> operator()(const PiecewiseExponential& x) const {
      return x.breakpoints();
    }
    std::vector<double> operator()(const Tabulated& x) const {
      return {x.times().begin() + 1, x.times().end()};
    }
  };
  return std::visit(Visitor{}, m);
}

MarginalModel scale_hazard(const MarginalModel& m, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale_hazard: factor must be finite and > 0");
  }
  struct Visitor {
    double f;
    MarginalModel operator()(const Exponential& x) const { return Exponential(x.rate() * f); }
    MarginalModel operator()(const PiecewiseExponential& x) const {
      std::vector<double> r = x.rates();
      for (double& v : r) v *= f;
      return PiecewiseExponential(x.breakpoints(), std::move(r));
    }
    MarginalModel operator()(const Tabulated& x) const {
      std::vector<double> s(x.times().size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::exp(-f * x.cumulative_hazard(x.times()[i]));
      }
      return Tabulated(x.times(), std::move(s));
    }
  };
  return std::visit(Visitor{factor}, m);
}

}  // namespace winstat
