#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "winstat/rng.hpp"
#include "winstat/survival.hpp"

// Censoring under administrative follow-up with staggered accrual plus
// optional random dropout.  With study length s and accrual period b, a
// patient's administrative follow-up is L = s - b * X where X ~ Beta(shape)
// on [0,1] is the (scaled) accrual time; b = 0 degenerates to follow-up of
// exactly s for everyone.  The overall censoring time is C = min(G, L) with G
// the dropout time.

namespace winstat {

class CensoringModel {
 public:
  CensoringModel(double study_length, double accrual_length,
                 std::pair<double, double> accrual_shape = {1.0, 1.0},
                 std::optional<MarginalModel> dropout = std::nullopt);

  double study_length() const { return s_; }
  double accrual_length() const { return b_; }
  bool has_dropout() const { return dropout_.has_value(); }

  // Administrative follow-up law L.
  double admin_survival(double x) const;  // P(L > x)
  double admin_density(double x) const;   // zero when b = 0 (point mass at s)

  // Dropout law G (survival 1 / density 0 when absent).
  double dropout_survival(double x) const;
  double dropout_density(double x) const;

  // Combined censoring C = min(G, L): survival and the continuous part of the
  // density.  When b = 0 the point mass P(C = s) is excluded here and exposed
  // via atom_at_study_end().
  double survival(double x) const;
  double density(double x) const;
  double atom_at_study_end() const;

  // Non-smooth points (accrual window edge, dropout breakpoints, s).
  std::vector<double> knots() const;

  double sample(RngStream& rng) const;

 private:
  double s_;
  double b_;
  std::pair<double, double> shape_;
  std::optional<MarginalModel> dropout_;
  bool uniform_accrual_;
};

}  // namespace winstat
