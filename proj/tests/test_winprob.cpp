#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "winstat/winprob.hpp"

using namespace winstat;

namespace {

ArmJointModel exp_gh(std::vector<double> rates, double tau) {
  std::vector<MarginalModel> margins;
  for (double r : rates) margins.push_back(Exponential(r));
  return ArmJointModel(std::move(margins), GumbelHougaard{tau_to_kappa(tau)});
}

// The three-endpoint benchmark scenario used across the test suite: control
// hazards (0.00057, 0.0018, 0.0015) per day, log hazard ratios alpha, uniform
// accrual over 200 days, exponential dropout at 0.00015 per day.
ScenarioSpec benchmark_scenario(std::vector<double> alphas, double tau, double s) {
  const std::vector<double> control_rates{0.00057, 0.0018, 0.0015};
  std::vector<double> treat_rates;
  for (std::size_t k = 0; k < control_rates.size(); ++k) {
    treat_rates.push_back(control_rates[k] * std::exp(-alphas[k]));
  }
  return ScenarioSpec{exp_gh(treat_rates, tau), exp_gh(control_rates, tau),
                      CensoringModel(s, 200.0, {1.0, 1.0}, Exponential(0.00015)),
                      false};
}

double table_sum(const WinLossTieTable& t) {
  return t.total_wins() + t.total_losses() + t.tie;
}

}  // namespace

TEST_CASE("single endpoint, fixed follow-up: exponential race closed form") {
  SUBCASE("equal hazards split the decided mass evenly") {
    const ScenarioSpec scn{exp_gh({0.002}, 0.0), exp_gh({0.002}, 0.0),
                           CensoringModel(500.0, 0.0), false};
    const WinLossTieTable t = compute_table(scn);
    const double decided = 1.0 - std::exp(-2.0);
    CHECK(t.wins[0] == doctest::Approx(decided / 2.0).epsilon(1e-10));
    CHECK(t.losses[0] == doctest::Approx(decided / 2.0).epsilon(1e-10));
    CHECK(t.tie == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    CHECK(t.win_ratio() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.net_benefit() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(t.win_odds() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("2:1 hazard race") {
    const ScenarioSpec scn{exp_gh({0.001}, 0.0), exp_gh({0.002}, 0.0),
                           CensoringModel(500.0, 0.0), false};
    const WinLossTieTable t = compute_table(scn);
    const double decided = 1.0 - std::exp(-1.5);
    CHECK(t.wins[0] == doctest::Approx(2.0 / 3.0 * decided).epsilon(1e-10));
    CHECK(t.losses[0] == doctest::Approx(1.0 / 3.0 * decided).epsilon(1e-10));
    CHECK(t.tie == doctest::Approx(std::exp(-1.5)).epsilon(1e-10));
    CHECK(t.win_ratio() == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("general censoring path reduces to the fixed-follow-up closed forms") {
  const ArmJointModel treat = exp_gh({0.0004, 0.0012}, 0.25);
  const ArmJointModel control = exp_gh({0.0007, 0.0016}, 0.25);
  // accrual_length = 0 without dropout: all censoring mass is the atom at s.
  const CensoringModel atom_only(800.0, 0.0);
  CHECK(win_prob_first(treat, control, atom_only) ==
        doctest::Approx(s1_win_prob_first(treat, control, 800.0)).epsilon(1e-8));
  CHECK(win_prob_later(treat, control, atom_only, 1) ==
        doctest::Approx(s1_win_prob_later(treat, control, 800.0, 1)).epsilon(1e-8));
  CHECK(tie_probability(treat, control, atom_only) ==
        doctest::Approx(s1_tie_probability(treat, control, 800.0)).epsilon(1e-8));
}

TEST_CASE("three-endpoint benchmark row, independent endpoints") {
  const WinLossTieTable t = compute_table(benchmark_scenario({0.2, 0.3, 0.1}, 0.0, 500.0));
  REQUIRE(t.wins.size() == 3);
  CHECK(t.wins[0] == doctest::Approx(0.16470518).epsilon(2e-6));
  CHECK(t.wins[1] == doctest::Approx(0.25752561).epsilon(2e-6));
  CHECK(t.wins[2] == doctest::Approx(0.07462785).epsilon(2e-6));
  CHECK(t.losses[0] == doctest::Approx(0.13484920).epsilon(2e-6));
  CHECK(t.losses[1] == doctest::Approx(0.19077966).epsilon(2e-6));
  CHECK(t.losses[2] == doctest::Approx(0.06752607).epsilon(2e-6));
  CHECK(t.tie == doctest::Approx(0.10998643).epsilon(2e-6));
  CHECK(t.win_ratio() == doctest::Approx(1.263773).epsilon(2e-6));
  CHECK(table_sum(t) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("three-endpoint benchmark row, strong correlation") {
  const WinLossTieTable t = compute_table(benchmark_scenario({0.2, 0.3, 0.1}, 0.8, 1000.0));
  CHECK(t.win_ratio() == doctest::Approx(1.286467).epsilon(1e-5));
  CHECK(t.tie == doctest::Approx(0.115031).epsilon(1e-5));
  CHECK(table_sum(t) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("swapping the arms swaps wins and losses") {
  ScenarioSpec scn = benchmark_scenario({0.2, 0.3, 0.1}, 0.3, 750.0);
  const WinLossTieTable fwd = compute_table(scn);
  std::swap(scn.treatment, scn.control);
  const WinLossTieTable rev = compute_table(scn);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(fwd.wins[k] == doctest::Approx(rev.losses[k]).epsilon(1e-9));
    CHECK(fwd.losses[k] == doctest::Approx(rev.wins[k]).epsilon(1e-9));
  }
  CHECK(fwd.tie == doctest::Approx(rev.tie).epsilon(1e-9));
  CHECK(fwd.win_ratio() == doctest::Approx(1.0 / rev.win_ratio()).epsilon(1e-8));
}

TEST_CASE("Gaussian copula scenario keeps the partition of unity") {
  const Eigen::MatrixXd corr = exchangeable_gauss_corr(2, 0.4);
  const ArmJointModel treat({Exponential(0.0004), Exponential(0.0012)},
                            GaussianCopula{corr});
  const ArmJointModel control({Exponential(0.0007), Exponential(0.0016)},
                              GaussianCopula{corr});
  const ScenarioSpec scn{treat, control,
                         CensoringModel(900.0, 300.0, {1.0, 1.0}, Exponential(0.0001)),
                         false};
  const WinLossTieTable t = compute_table(scn);
  CHECK(table_sum(t) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t.win_ratio() > 1.0);  // treatment has lower hazards on both endpoints
}

TEST_CASE("piecewise and tabulated marginals integrate cleanly") {
  std::vector<MarginalModel> tm{PiecewiseExponential({180.0}, {0.0005, 0.0011}),
                                Tabulated({0.0, 200.0, 600.0}, {1.0, 0.85, 0.55})};
  std::vector<MarginalModel> cm{PiecewiseExponential({180.0}, {0.0008, 0.0015}),
                                Tabulated({0.0, 200.0, 600.0}, {1.0, 0.8, 0.45})};
  const ScenarioSpec scn{
      ArmJointModel(tm, GumbelHougaard{tau_to_kappa(0.3)}),
      ArmJointModel(cm, GumbelHougaard{tau_to_kappa(0.3)}),
      CensoringModel(700.0, 250.0, {1.0, 1.0}, Exponential(0.0002)), false};
  const WinLossTieTable t = compute_table(scn);
  CHECK(table_sum(t) == doctest::Approx(1.0).epsilon(1e-6));
  for (double w : t.wins) CHECK(w > 0.0);
  for (double l : t.losses) CHECK(l > 0.0);
  CHECK(t.tie > 0.0);
}

TEST_CASE("beta accrual shapes shift the tie probability") {
  ScenarioSpec late = benchmark_scenario({0.2, 0.3, 0.1}, 0.0, 500.0);
  // Late-heavy accrual (more short follow-ups) must produce more ties than
  // uniform accrual, early-heavy fewer.
  const WinLossTieTable uniform = compute_table(late);
  late.censoring = CensoringModel(500.0, 200.0, {2.0, 1.0}, Exponential(0.00015));
  const WinLossTieTable late_heavy = compute_table(late);
  late.censoring = CensoringModel(500.0, 200.0, {1.0, 2.0}, Exponential(0.00015));
  const WinLossTieTable early_heavy = compute_table(late);
  CHECK(late_heavy.tie > uniform.tie);
  CHECK(early_heavy.tie < uniform.tie);
  CHECK(table_sum(late_heavy) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(table_sum(early_heavy) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("the semi-competing discount removes later-endpoint mass only") {
  ScenarioSpec scn = benchmark_scenario({0.2, 0.3, 0.1}, 0.3, 500.0);
  const WinLossTieTable base = compute_table(scn);
  scn.semi_competing = true;
  const WinLossTieTable sc = compute_table(scn);
  CHECK(sc.wins[0] == doctest::Approx(base.wins[0]).epsilon(1e-10));
  CHECK(sc.losses[0] == doctest::Approx(base.losses[0]).epsilon(1e-10));
  CHECK(sc.tie == doctest::Approx(base.tie).epsilon(1e-10));
  CHECK(sc.wins[1] < base.wins[1]);
  CHECK(sc.wins[2] < base.wins[2]);
  CHECK(sc.losses[1] < base.losses[1]);
  // The discounted mass is deliberately not reassigned.
  CHECK(table_sum(sc) < 1.0);
}

TEST_CASE("argument validation") {
  const ArmJointModel a = exp_gh({0.001, 0.002}, 0.2);
  const ArmJointModel b = exp_gh({0.001, 0.002}, 0.2);
  const CensoringModel cens(500.0, 100.0);
  CHECK_THROWS_AS(win_prob_later(a, b, cens, 0), std::invalid_argument);
  CHECK_THROWS_AS(win_prob_later(a, b, cens, 2), std::invalid_argument);
  const ArmJointModel k1 = exp_gh({0.001}, 0.0);
  CHECK_THROWS_AS(compute_table(ScenarioSpec{k1, b, cens, false}),
                  std::invalid_argument);
}

TEST_CASE("win/loss/tie table helpers") {
  WinLossTieTable t;
  t.wins = {0.3, 0.1};
  t.losses = {0.2, 0.1};
  t.tie = 0.3;
  CHECK(t.total_wins() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(t.total_losses() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(t.win_ratio() == doctest::Approx(0.4 / 0.3).epsilon(1e-14));
  CHECK(t.net_benefit() == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(t.win_odds() == doctest::Approx(0.55 / 0.45).epsilon(1e-14));
  t.losses = {0.0, 0.0};
  CHECK(std::isinf(t.win_ratio()));
}
