#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "winstat/sim.hpp"

using namespace winstat;

namespace {

ArmJointModel exp_gh(std::vector<double> rates, double tau) {
  std::vector<MarginalModel> margins;
  for (double r : rates) margins.push_back(Exponential(r));
  return ArmJointModel(std::move(margins), GumbelHougaard{tau_to_kappa(tau)});
}

ScenarioSpec benchmark_scenario(double tau, double s) {
  return ScenarioSpec{
      exp_gh({0.00057 * std::exp(-0.2), 0.0018 * std::exp(-0.3),
              0.0015 * std::exp(-0.1)}, tau),
      exp_gh({0.00057, 0.0018, 0.0015}, tau),
      CensoringModel(s, 200.0, {1.0, 1.0}, Exponential(0.00015)), false};
}

// Build a one-endpoint ArmData column from parallel arrays.
ArmData make_arm(std::vector<std::vector<double>> times,
                 std::vector<std::vector<std::uint8_t>> events) {
  ArmData a;
  a.time = std::move(times);
  a.event = std::move(events);
  return a;
}

}  // namespace

TEST_CASE("pairwise comparison: hand-checked single endpoint") {
  TrialData trial;
  // treated: event at 10; censored at 5.  control: event at 5; censored at 8.
  trial.treatment = make_arm({{10.0, 5.0}}, {{1, 0}});
  trial.control = make_arm({{5.0, 8.0}}, {{1, 0}});
  const PairCounts pc = pairwise_win_ratio(trial);
  CHECK(pc.pairs == doctest::Approx(4.0));
  // (t=10,e) vs (c=5,e):   control event first -> win
  // (t=10,e) vs (c=8,cens): treated event at 10 after lost-to-follow-up 8 -> tie
  // (t=5,cens) vs (c=5,e):  simultaneous, strict rule -> tie
  // (t=5,cens) vs (c=8,cens): no event -> tie
  CHECK(pc.wins[0] == doctest::Approx(1.0));
  CHECK(pc.losses[0] == doctest::Approx(0.0));
  CHECK(pc.ties == doctest::Approx(3.0));
  CHECK(pc.tie_fraction() == doctest::Approx(0.75));
}

TEST_CASE("pairwise comparison: losses and the second endpoint") {
  TrialData trial;
  // Endpoint 1 ties (both censored late), endpoint 2 decides.
  trial.treatment = make_arm({{100.0}, {30.0}}, {{0}, {1}});
  trial.control = make_arm({{100.0}, {50.0}}, {{0}, {1}});
  const PairCounts a = pairwise_win_ratio(trial);
  CHECK(a.wins[0] == doctest::Approx(0.0));
  CHECK(a.wins[1] == doctest::Approx(0.0));
  CHECK(a.losses[1] == doctest::Approx(1.0));  // treated event earlier -> loss
  // Flip the event order: now the control fails first on endpoint 2.
  trial.treatment = make_arm({{100.0}, {50.0}}, {{0}, {1}});
  trial.control = make_arm({{100.0}, {30.0}}, {{0}, {1}});
  const PairCounts b = pairwise_win_ratio(trial);
  CHECK(b.wins[1] == doctest::Approx(1.0));
  CHECK(b.losses[1] == doctest::Approx(0.0));
  // First endpoint decides before the second is consulted.
  trial.treatment = make_arm({{60.0}, {50.0}}, {{1}, {1}});
  trial.control = make_arm({{40.0}, {30.0}}, {{1}, {1}});
  const PairCounts c = pairwise_win_ratio(trial);
  CHECK(c.wins[0] == doctest::Approx(1.0));
  CHECK(c.losses[1] == doctest::Approx(0.0));
}

TEST_CASE("trial generation is deterministic per (seed, replicate)") {
  const ScenarioSpec scn = benchmark_scenario(0.3, 500.0);
  SimConfig cfg;
  cfg.n_per_trial = 40;
  cfg.seed = 999;
  const TrialData a = generate_trial(scn, cfg, 17);
  const TrialData b = generate_trial(scn, cfg, 17);
  REQUIRE(a.treatment.size() == 20);
  REQUIRE(a.control.size() == 20);
  CHECK(a.treatment.time == b.treatment.time);
  CHECK(a.control.event == b.control.event);
  const TrialData c = generate_trial(scn, cfg, 18);
  CHECK(a.treatment.time != c.treatment.time);
}

TEST_CASE("allocation controls the arm sizes") {
  const ScenarioSpec scn = benchmark_scenario(0.0, 500.0);
  SimConfig cfg;
  cfg.n_per_trial = 100;
  cfg.allocation = 0.7;
  const TrialData t = generate_trial(scn, cfg, 0);
  CHECK(t.treatment.size() == 70);
  CHECK(t.control.size() == 30);
}

TEST_CASE("generated data respect the follow-up horizon") {
  const ScenarioSpec scn = benchmark_scenario(0.3, 500.0);
  SimConfig cfg;
  cfg.n_per_trial = 400;
  const TrialData t = generate_trial(scn, cfg, 3);
  int events = 0;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < t.treatment.size(); ++i) {
      const double x = t.treatment.time[std::size_t(k)][std::size_t(i)];
      REQUIRE(x > 0.0);
      REQUIRE(x <= 500.0);
      events += t.treatment.event[std::size_t(k)][std::size_t(i)];
    }
  }
  CHECK(events > 0);
}

TEST_CASE("semi-competing truncation never alters outcomes when endpoint 1 is fatal") {
  // With the first endpoint treated as death, truncating later endpoints at
  // the death time must not change any pairwise outcome: the decided-by-k
  // comparisons only use times before both deaths.
  const ScenarioSpec scn = benchmark_scenario(0.5, 750.0);
  SimConfig plain;
  plain.n_per_trial = 300;
  plain.seed = 4242;
  SimConfig sc = plain;
  sc.semi_competing = true;
  const TrialData a = generate_trial(scn, plain, 11);
  const TrialData b = generate_trial(scn, sc, 11);
  const PairCounts pa = pairwise_win_ratio(a);
  const PairCounts pb = pairwise_win_ratio(b);
  CHECK(pa.wins == pb.wins);
  CHECK(pa.losses == pb.losses);
  CHECK(pa.ties == doctest::Approx(pb.ties));
}

TEST_CASE("simulation summary agrees with the analytic table") {
  const ScenarioSpec scn = benchmark_scenario(0.0, 500.0);
  const WinLossTieTable t = compute_table(scn);
  SimConfig cfg;
  cfg.replicates = 300;
  cfg.n_per_trial = 400;
  cfg.seed = 31415;
  const SimSummary s = simulate(scn, cfg);
  CHECK(s.replicates == 300);
  CHECK(s.degenerate == 0);
  CHECK(std::fabs(s.mean_win_ratio - t.win_ratio()) < 4.0 * s.se_win_ratio);
  CHECK(std::fabs(s.mean_tie_fraction - t.tie) < 4.0 * s.se_tie_fraction);
  const double formula_power =
      power_at_n(t.win_ratio(), t.tie, 400.0, cfg.alpha, cfg.allocation);
  CHECK(std::fabs(s.empirical_power - formula_power) < 5.0 * s.se_power + 0.02);
  CHECK(s.se_power > 0.0);
  CHECK(s.se_power < 0.05);
}

TEST_CASE("simulation summaries are reproducible and thread-invariant") {
  const ScenarioSpec scn = benchmark_scenario(0.3, 500.0);
  SimConfig cfg;
  cfg.replicates = 40;
  cfg.n_per_trial = 100;
  cfg.seed = 77;
  cfg.threads = 1;
  const SimSummary a = simulate(scn, cfg);
  cfg.threads = 4;
  const SimSummary b = simulate(scn, cfg);
  CHECK(a.mean_win_ratio == b.mean_win_ratio);
  CHECK(a.mean_tie_fraction == b.mean_tie_fraction);
  CHECK(a.empirical_power == b.empirical_power);
  CHECK(a.degenerate == b.degenerate);
}

TEST_CASE("degenerate replicates never reject") {
  // A scenario with almost no decidable pairs: tiny hazards, short study.
  const ScenarioSpec scn{exp_gh({1e-7}, 0.0), exp_gh({1e-7}, 0.0),
                         CensoringModel(10.0, 0.0), false};
  SimConfig cfg;
  cfg.replicates = 30;
  cfg.n_per_trial = 10;
  cfg.seed = 8;
  const SimSummary s = simulate(scn, cfg);
  CHECK(s.degenerate == 30);
  CHECK(s.empirical_power == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(s.mean_win_ratio == doctest::Approx(0.0).scale(1.0));  // no usable replicate
}

TEST_CASE("null scenario holds the type I error near alpha") {
  // Identical arms: rejection rate should sit near the two-sided level.
  const ScenarioSpec scn{exp_gh({0.002, 0.004}, 0.3), exp_gh({0.002, 0.004}, 0.3),
                         CensoringModel(600.0, 200.0, {1.0, 1.0}, Exponential(1e-4)),
                         false};
  SimConfig cfg;
  cfg.replicates = 600;
  cfg.n_per_trial = 300;
  cfg.seed = 2718;
  const SimSummary s = simulate(scn, cfg);
  // 600 replicates: se ~ 0.009 at p = 0.05; allow a generous band.
  CHECK(s.empirical_power > 0.02);
  CHECK(s.empirical_power < 0.09);
  CHECK(std::fabs(s.mean_win_ratio - 1.0) < 5.0 * s.se_win_ratio + 0.01);
}
