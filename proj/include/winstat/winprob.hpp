#pragma once

#include <vector>

#include "winstat/censoring.hpp"
#include "winstat/copula.hpp"
#include "winstat/quadrature.hpp"

// Win/loss/tie probabilities for a single randomly chosen treatment-control
// pair compared hierarchically over K prioritised time-to-event endpoints.
// A pair is decided at the highest-priority endpoint whose event is observed
// first (within the shared follow-up window) in exactly one arm... more
// precisely: at endpoint k the pair is decided if one arm's endpoint-k event
// precedes the other arm's endpoint-k event and both fall inside the common
// observation window; otherwise the comparison moves to endpoint k+1, and a
// pair undecided after endpoint K is a tie.
//
// The probabilities integrate the joint survival functions of the two arms
// against the law of the shared censoring window; pure administrative
// censoring (no accrual spread, no dropout) contributes a point mass at the
// study length which is handled in closed form.

namespace winstat {

struct ScenarioSpec {
  ArmJointModel treatment;
  ArmJointModel control;
  CensoringModel censoring;
  // Opt-in approximation: additionally discount endpoint-k (k >= 2) win/loss
  // mass by the probability that neither arm's endpoint-1 event has occurred
  // by the comparison time, treating that event as an independent censoring
  // mechanism.  Off by default; when on, win+loss+tie deliberately sums to
  // less than one (the deflated mass is not reassigned).
  bool semi_competing = false;
};

struct WinLossTieTable {
  std::vector<double> wins;    // P(treatment wins at endpoint k)
  std::vector<double> losses;  // P(treatment loses at endpoint k)
  double tie = 0.0;

  double total_wins() const;
  double total_losses() const;
  double win_ratio() const;    // total wins / total losses
  double net_benefit() const;  // total wins - total losses
  double win_odds() const;     // (wins + tie/2) / (losses + tie/2)
};

// P(the "die" arm's endpoint-1 event is observed first), i.e. the "keep" arm
// wins at the first endpoint.
double win_prob_first(const ArmJointModel& keep, const ArmJointModel& die,
                      const CensoringModel& censoring,
                      const Integrator& outer = Integrator{});

// Win at endpoint k (0-based, k >= 1) after ties at endpoints 0..k-1.
double win_prob_later(const ArmJointModel& keep, const ArmJointModel& die,
                      const CensoringModel& censoring, int k,
                      const Integrator& outer = Integrator{});

// P(no endpoint decides the pair).
double tie_probability(const ArmJointModel& treatment, const ArmJointModel& control,
                       const CensoringModel& censoring,
                       const Integrator& outer = Integrator{});

// Closed forms for pure administrative censoring (accrual_length = 0, no
// dropout): everyone is followed for exactly the study length.
double s1_win_prob_first(const ArmJointModel& keep, const ArmJointModel& die,
                         double study_length, const Integrator& = Integrator{});
double s1_win_prob_later(const ArmJointModel& keep, const ArmJointModel& die,
                         double study_length, int k, const Integrator& = Integrator{});
double s1_tie_probability(const ArmJointModel& treatment, const ArmJointModel& control,
                          double study_length);

// Full table; dispatches to the closed forms when censoring is purely
// administrative.
WinLossTieTable compute_table(const ScenarioSpec& scenario,
                              const Integrator& outer = Integrator{});

}  // namespace winstat
