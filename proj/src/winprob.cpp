#include "winstat/winprob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace winstat {

namespace {

// Tighter tolerances for inner integrals so their noise stays well below the
// outer rule's error estimates.
Integrator inner_integrator(const Integrator& outer) {
  Integrator::Options o = outer.options();
  o.rel_tol *= 0.1;
  o.abs_tol *= 0.1;
  return Integrator(o);
}

void check_dims(const ArmJointModel& a, const ArmJointModel& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("win probabilities: arm dimensions differ");
  }
}

// Quadrature knots below `limit` contributed by the marginals of endpoint k
// in both arms.
void add_marginal_knots(std::vector<double>& knots, const ArmJointModel& a,
                        const ArmJointModel& b, int k, double limit) {
  for (const ArmJointModel* arm : {&a, &b}) {
    for (double t : breakpoints(arm->marginal(k))) {
      if (t > 0.0 && t < limit) knots.push_back(t);
    }
  }
}

std::vector<double> outer_knots(const ArmJointModel& a, const ArmJointModel& b,
                                const CensoringModel& cens) {
  std::vector<double> knots = cens.knots();
  for (int k = 0; k < a.dimension(); ++k) {
    add_marginal_knots(knots, a, b, k, cens.study_length());
  }
  return knots;
}

// The semi-competing discount treats the endpoint-1 events of both arms as
// independent censoring of later-endpoint observations.
double sc_weight(const ArmJointModel& t, const ArmJointModel& c, double y) {
  return survival(t.marginal(0), y) * survival(c.marginal(0), y);
}

// Inner integral of win_prob_later at outer point c: the "die" arm's
// endpoint-k event at y < c with the "keep" arm event-free, both arms tied
// (event-free) at endpoints 0..k-1 up to c.
double later_inner(const ArmJointModel& keep, const ArmJointModel& die, int k, double c,
                   const Integrator& integ, const std::vector<double>& knots,
                   const ArmJointModel* sc_t, const ArmJointModel* sc_c) {
  const int dim = keep.dimension();
  std::vector<double> yv(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < k; ++i) yv[static_cast<std::size_t>(i)] = c;
  auto f = [&](double y) {
    yv[static_cast<std::size_t>(k)] = y;
    double v = keep.joint_survival(yv) * die.neg_partial(yv, k);
    if (sc_t) v *= sc_weight(*sc_t, *sc_c, y);
    return v;
  };
  std::vector<double> cut;
  for (double t : knots) {
    if (t < c) cut.push_back(t);
  }
  return integ.integrate(f, 0.0, c, cut);
}

double win_prob_later_impl(const ArmJointModel& keep, const ArmJointModel& die,
                           const CensoringModel& cens, int k, const Integrator& outer,
                           const ArmJointModel* sc_t, const ArmJointModel* sc_c) {
  check_dims(keep, die);
  if (k < 1 || k >= keep.dimension()) {
    throw std::invalid_argument("win_prob_later: k must lie in [1, K)");
  }
  const Integrator inner = inner_integrator(outer);
  std::vector<double> inner_knots;
  add_marginal_knots(inner_knots, keep, die, k, cens.study_length());
  std::sort(inner_knots.begin(), inner_knots.end());

  const double s = cens.study_length();
  double result = 0.0;
  const double atom = cens.atom_at_study_end();
  if (atom > 0.0) {
    result += atom * atom * later_inner(keep, die, k, s, inner, inner_knots, sc_t, sc_c);
  }
  auto f = [&](double c) {
    const double dens = cens.density(c);
    if (dens == 0.0) return 0.0;
    return 2.0 * dens * cens.survival(c) *
           later_inner(keep, die, k, c, inner, inner_knots, sc_t, sc_c);
  };
  result += outer.integrate(f, 0.0, s, outer_knots(keep, die, cens));
  return result;
}

double s1_win_prob_later_impl(const ArmJointModel& keep, const ArmJointModel& die,
                              double s, int k, const Integrator& integ,
                              const ArmJointModel* sc_t, const ArmJointModel* sc_c) {
  check_dims(keep, die);
  if (k < 1 || k >= keep.dimension()) {
    throw std::invalid_argument("s1_win_prob_later: k must lie in [1, K)");
  }
  std::vector<double> knots;
  add_marginal_knots(knots, keep, die, k, s);
  std::sort(knots.begin(), knots.end());
  return later_inner(keep, die, k, s, integ, knots, sc_t, sc_c);
}

}  // namespace

double WinLossTieTable::total_wins() const {
  double t = 0.0;
  for (double w : wins) t += w;
  return t;
}

double WinLossTieTable::total_losses() const {
  double t = 0.0;
  for (double l : losses) t += l;
  return t;
}

double WinLossTieTable::win_ratio() const {
  const double l = total_losses();
  if (l == 0.0) return std::numeric_limits<double>::infinity();
  return total_wins() / l;
}

double WinLossTieTable::net_benefit() const { return total_wins() - total_losses(); }

double WinLossTieTable::win_odds() const {
  const double denom = total_losses() + 0.5 * tie;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return (total_wins() + 0.5 * tie) / denom;
}

double win_prob_first(const ArmJointModel& keep, const ArmJointModel& die,
                      const CensoringModel& cens, const Integrator& outer) {
  check_dims(keep, die);
  const int dim = keep.dimension();
  std::vector<double> yv(static_cast<std::size_t>(dim), 0.0);
  auto f = [&](double y) {
    yv[0] = y;
    const double sg = cens.survival(y);
    return keep.joint_survival(yv) * sg * sg * die.neg_partial(yv, 0);
  };
  std::vector<double> knots = cens.knots();
  add_marginal_knots(knots, keep, die, 0, cens.study_length());
  return outer.integrate(f, 0.0, cens.study_length(), knots);
}

double win_prob_later(const ArmJointModel& keep, const ArmJointModel& die,
                      const CensoringModel& cens, int k, const Integrator& outer) {
  return win_prob_later_impl(keep, die, cens, k, outer, nullptr, nullptr);
}

double tie_probability(const ArmJointModel& treatment, const ArmJointModel& control,
                       const CensoringModel& cens, const Integrator& outer) {
  check_dims(treatment, control);
  const int dim = treatment.dimension();
  std::vector<double> cv(static_cast<std::size_t>(dim));
  auto both_survive = [&](double c) {
    std::fill(cv.begin(), cv.end(), c);
    return treatment.joint_survival(cv) * control.joint_survival(cv);
  };

  const double s = cens.study_length();
  double result = 0.0;
  const double atom = cens.atom_at_study_end();
  if (atom > 0.0) result += atom * atom * both_survive(s);
  auto f = [&](double c) {
    const double dens = cens.density(c);
    if (dens == 0.0) return 0.0;
    return 2.0 * dens * cens.survival(c) * both_survive(c);
  };
  result += outer.integrate(f, 0.0, s, outer_knots(treatment, control, cens));
  return result;
}

double s1_win_prob_first(const ArmJointModel& keep, const ArmJointModel& die,
                         double study_length, const Integrator& integ) {
  check_dims(keep, die);
  const int dim = keep.dimension();
  std::vector<double> yv(static_cast<std::size_t>(dim), 0.0);
  auto f = [&](double y) {
    yv[0] = y;
    return keep.joint_survival(yv) * die.neg_partial(yv, 0);
  };
  std::vector<double> knots;
  add_marginal_knots(knots, keep, die, 0, study_length);
  return integ.integrate(f, 0.0, study_length, knots);
}

double s1_win_prob_later(const ArmJointModel& keep, const ArmJointModel& die,
                         double study_length, int k, const Integrator& integ) {
  return s1_win_prob_later_impl(keep, die, study_length, k, integ, nullptr, nullptr);
}

double s1_tie_probability(const ArmJointModel& treatment, const ArmJointModel& control,
                          double study_length) {
  check_dims(treatment, control);
  std::vector<double> cv(static_cast<std::size_t>(treatment.dimension()), study_length);
  return treatment.joint_survival(cv) * control.joint_survival(cv);
}

WinLossTieTable compute_table(const ScenarioSpec& scn, const Integrator& outer) {
  check_dims(scn.treatment, scn.control);
  const int dim = scn.treatment.dimension();
  const ArmJointModel* sc_t = scn.semi_competing ? &scn.treatment : nullptr;
  const ArmJointModel* sc_c = scn.semi_competing ? &scn.control : nullptr;

  WinLossTieTable out;
  out.wins.resize(static_cast<std::size_t>(dim));
  out.losses.resize(static_cast<std::size_t>(dim));

  const bool pure_admin =
      scn.censoring.accrual_length() == 0.0 && !scn.censoring.has_dropout();
  const double s = scn.censoring.study_length();

  if (pure_admin) {
    const Integrator inner = inner_integrator(outer);
    out.wins[0] = s1_win_prob_first(scn.treatment, scn.control, s, outer);
    out.losses[0] = s1_win_prob_first(scn.control, scn.treatment, s, outer);
    for (int k = 1; k < dim; ++k) {
      out.wins[static_cast<std::size_t>(k)] =
          s1_win_prob_later_impl(scn.treatment, scn.control, s, k, inner, sc_t, sc_c);
      out.losses[static_cast<std::size_t>(k)] =
          s1_win_prob_later_impl(scn.control, scn.treatment, s, k, inner, sc_t, sc_c);
    }
    out.tie = s1_tie_probability(scn.treatment, scn.control, s);
    return out;
  }

  out.wins[0] = win_prob_first(scn.treatment, scn.control, scn.censoring, outer);
  out.losses[0] = win_prob_first(scn.control, scn.treatment, scn.censoring, outer);
  for (int k = 1; k < dim; ++k) {
    out.wins[static_cast<std::size_t>(k)] =
        win_prob_later_impl(scn.treatment, scn.control, scn.censoring, k, outer, sc_t, sc_c);
    out.losses[static_cast<std::size_t>(k)] =
        win_prob_later_impl(scn.control, scn.treatment, scn.censoring, k, outer, sc_t, sc_c);
  }
  out.tie = tie_probability(scn.treatment, scn.control, scn.censoring, outer);
  return out;
}

}  // namespace winstat
