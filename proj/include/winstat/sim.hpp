#pragma once

#include <cstdint>
#include <vector>

#include "winstat/design.hpp"
#include "winstat/winprob.hpp"

// Monte Carlo oracle for the analytic win/loss/tie machinery: generates
// two-arm trials from the scenario's joint models and censoring law, scores
// every treatment-control pair with the hierarchical rule, and tests each
// replicate with the normal approximation on ln WR-hat using the plug-in
// variance from the replicate's empirical tie fraction.
//
// Replicate r always draws from the stream keyed (seed, r), so summaries are
// bit-identical regardless of the number of worker threads.

namespace winstat {

struct SimConfig {
  int replicates = 2000;
  int n_per_trial = 1000;
  double allocation = 0.5;  // treatment fraction
  double alpha = 0.05;      // two-sided level of the per-replicate test
  std::uint64_t seed = 1;
  bool semi_competing = false;  // observe T_k = min(Y_k, C, Y_1) for k >= 2
  int threads = 1;
};

// Column-oriented observed data: time[k][i] / event[k][i] for endpoint k.
struct ArmData {
  std::vector<std::vector<double>> time;
  std::vector<std::vector<std::uint8_t>> event;
  int size() const { return time.empty() ? 0 : static_cast<int>(time[0].size()); }
};

struct TrialData {
  ArmData treatment;
  ArmData control;
};

TrialData generate_trial(const ScenarioSpec& scenario, const SimConfig& cfg,
                         std::uint64_t replicate_index);

struct PairCounts {
  std::vector<double> wins;    // decided for treatment at endpoint k
  std::vector<double> losses;
  double ties = 0.0;
  double pairs = 0.0;

  double total_wins() const;
  double total_losses() const;
  double win_ratio() const;
  double tie_fraction() const { return pairs > 0.0 ? ties / pairs : 0.0; }
};

PairCounts pairwise_win_ratio(const TrialData& data);

struct SimSummary {
  int replicates = 0;
  int degenerate = 0;  // replicates with zero wins or zero losses
  double mean_win_ratio = 0.0;  // over non-degenerate replicates
  double se_win_ratio = 0.0;    // Monte Carlo standard error of the mean
  double mean_tie_fraction = 0.0;
  double se_tie_fraction = 0.0;
  double empirical_power = 0.0;  // rejection rate (degenerates never reject)
  double se_power = 0.0;
};

SimSummary simulate(const ScenarioSpec& scenario, const SimConfig& cfg);

}  // namespace winstat
