#include "winstat/censoring.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace winstat {

CensoringModel::CensoringModel(double study_length, double accrual_length,
                               std::pair<double, double> accrual_shape,
                               std::optional<MarginalModel> dropout)
    : s_(study_length),
      b_(accrual_length),
      shape_(accrual_shape),
      dropout_(std::move(dropout)),
      uniform_accrual_(accrual_shape.first == 1.0 && accrual_shape.second == 1.0) {
  if (!(s_ > 0.0) || !std::isfinite(s_)) {
    throw std::invalid_argument("CensoringModel: study_length must be finite and > 0");
  }
  if (b_ < 0.0 || b_ > s_ || !std::isfinite(b_)) {
    throw std::invalid_argument("CensoringModel: accrual_length must lie in [0, study_length]");
  }
  if (!(shape_.first > 0.0) || !(shape_.second > 0.0)) {
    throw std::invalid_argument("CensoringModel: accrual_shape parameters must be > 0");
  }
}

double CensoringModel::admin_survival(double x) const {
  if (x < s_ - b_) return 1.0;
  if (x >= s_) return 0.0;
  if (b_ == 0.0) return 1.0;  // unreachable given the guards, kept for clarity
  const double z = (s_ - x) / b_;
  if (uniform_accrual_) return z;
  return boost::math::ibeta(shape_.first, shape_.second, z);
}

double CensoringModel::admin_density(double x) const {
  if (b_ == 0.0 || x <= s_ - b_ || x >= s_) return 0.0;
  if (uniform_accrual_) return 1.0 / b_;
  // Quadrature nodes can creep to within an ulp of the window edges, where
  // rounding lands z exactly on 0 or 1 and a sub-one shape makes the Beta
  // density infinite; evaluate half an ulp inside instead.
  const double eps = std::numeric_limits<double>::epsilon();
  const double z = std::clamp((s_ - x) / b_, eps, 1.0 - 0.5 * eps);
  return boost::math::ibeta_derivative(shape_.first, shape_.second, z) / b_;
}

double CensoringModel::dropout_survival(double x) const {
  return dropout_ ? winstat::survival(*dropout_, x) : 1.0;
}

double CensoringModel::dropout_density(double x) const {
  return dropout_ ? winstat::density(*dropout_, x) : 0.0;
}

double CensoringModel::survival(double x) const {
  if (x < 0.0) return 1.0;
  return dropout_survival(x) * admin_survival(x);
}

double CensoringModel::density(double x) const {
  if (x < 0.0 || x >= s_) return 0.0;
  return dropout_density(x) * admin_survival(x) + admin_density(x) * dropout_survival(x);
}

double CensoringModel::atom_at_study_end() const {
  return (b_ == 0.0) ? dropout_survival(s_) : 0.0;
}

std::vector<double> CensoringModel::knots() const {
  std::vector<double> k;
  if (b_ > 0.0 && b_ < s_) k.push_back(s_ - b_);
  if (dropout_) {
    for (double t : breakpoints(*dropout_)) {
      if (t < s_) k.push_back(t);
    }
  }
  k.push_back(s_);
  return k;
}

double CensoringModel::sample(RngStream& rng) const {
  double follow_up = s_;
  if (b_ > 0.0) {
    const double u = rng.uniform01();
    const double x = uniform_accrual_ ? u : boost::math::ibeta_inv(shape_.first, shape_.second, u);
    follow_up = s_ - b_ * x;
  }
  if (dropout_) {
    const double g = inverse_survival(*dropout_, rng.uniform01());
    follow_up = std::min(follow_up, g);
  }
  return follow_up;
}

}  // namespace winstat
