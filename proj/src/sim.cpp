#include "winstat/sim.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "winstat/normal.hpp"

namespace winstat {

namespace {

void fill_arm(ArmData& arm, const ArmJointModel& model, const CensoringModel& cens,
              int n, bool semi_competing, RngStream& rng) {
  const int k = model.dimension();
  arm.time.assign(static_cast<std::size_t>(k), {});
  arm.event.assign(static_cast<std::size_t>(k), {});
  for (int e = 0; e < k; ++e) {
    arm.time[static_cast<std::size_t>(e)].resize(static_cast<std::size_t>(n));
    arm.event[static_cast<std::size_t>(e)].resize(static_cast<std::size_t>(n));
  }
  std::vector<double> y(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    model.sample(rng, y);
    const double c = cens.sample(rng);
    for (int e = 0; e < k; ++e) {
      double horizon = c;
      if (semi_competing && e > 0) horizon = std::min(horizon, y[0]);
      const double t = std::min(y[static_cast<std::size_t>(e)], horizon);
      arm.time[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] = t;
      arm.event[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] =
          y[static_cast<std::size_t>(e)] <= horizon ? 1 : 0;
    }
  }
}

}  // namespace

TrialData generate_trial(const ScenarioSpec& scn, const SimConfig& cfg,
                         std::uint64_t replicate_index) {
  if (cfg.n_per_trial < 2) throw std::invalid_argument("generate_trial: n_per_trial < 2");
  if (!(cfg.allocation > 0.0) || !(cfg.allocation < 1.0)) {
    throw std::invalid_argument("generate_trial: allocation must lie in (0, 1)");
  }
  const int nt = static_cast<int>(std::lround(cfg.allocation * cfg.n_per_trial));
  const int nc = cfg.n_per_trial - nt;
  if (nt < 1 || nc < 1) throw std::invalid_argument("generate_trial: degenerate arm size");

  RngStream rng(cfg.seed, replicate_index);
  TrialData data;
  fill_arm(data.treatment, scn.treatment, scn.censoring, nt, cfg.semi_competing, rng);
  fill_arm(data.control, scn.control, scn.censoring, nc, cfg.semi_competing, rng);
  return data;
}

double PairCounts::total_wins() const {
  double t = 0.0;
  for (double w : wins) t += w;
  return t;
}

double PairCounts::total_losses() const {
  double t = 0.0;
  for (double l : losses) t += l;
  return t;
}

double PairCounts::win_ratio() const {
  const double l = total_losses();
  if (l == 0.0) return std::numeric_limits<double>::infinity();
  return total_wins() / l;
}

PairCounts pairwise_win_ratio(const TrialData& data) {
  const std::size_t k = data.treatment.time.size();
  if (k == 0 || data.control.time.size() != k) {
    throw std::invalid_argument("pairwise_win_ratio: endpoint count mismatch");
  }
  const int nt = data.treatment.size();
  const int nc = data.control.size();

  PairCounts out;
  out.wins.assign(k, 0.0);
  out.losses.assign(k, 0.0);
  out.pairs = static_cast<double>(nt) * static_cast<double>(nc);

  std::vector<long long> wins(k, 0), losses(k, 0);
  long long ties = 0;

  std::vector<const double*> tt(k), tc(k);
  std::vector<const std::uint8_t*> dt(k), dc(k);
  for (std::size_t e = 0; e < k; ++e) {
    tt[e] = data.treatment.time[e].data();
    dt[e] = data.treatment.event[e].data();
    tc[e] = data.control.time[e].data();
    dc[e] = data.control.event[e].data();
  }

  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nc; ++j) {
      bool decided = false;
      for (std::size_t e = 0; e < k; ++e) {
        const double a = tt[e][i];
        const double b = tc[e][j];
        // Control's event first: observed and strictly earlier than whatever
        // the treated subject has (event or censoring) at this endpoint.
        if (dc[e][j] && b < a) {
          ++wins[e];
          decided = true;
          break;
        }
        if (dt[e][i] && a < b) {
          ++losses[e];
          decided = true;
          break;
        }
      }
      if (!decided) ++ties;
    }
  }

  for (std::size_t e = 0; e < k; ++e) {
    out.wins[e] = static_cast<double>(wins[e]);
    out.losses[e] = static_cast<double>(losses[e]);
  }
  out.ties = static_cast<double>(ties);
  return out;
}

namespace {

struct ReplicateOutcome {
  double wr = 0.0;
  double tie_fraction = 0.0;
  bool reject = false;
  bool degenerate = false;
};

ReplicateOutcome run_replicate(const ScenarioSpec& scn, const SimConfig& cfg,
                               std::uint64_t index) {
  const TrialData data = generate_trial(scn, cfg, index);
  const PairCounts counts = pairwise_win_ratio(data);

  ReplicateOutcome out;
  out.tie_fraction = counts.tie_fraction();
  const double w = counts.total_wins();
  const double l = counts.total_losses();
  if (w == 0.0 || l == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.wr = w / l;
  const double realised_rho =
      static_cast<double>(data.treatment.size()) / cfg.n_per_trial;
  const double sd = std::sqrt(yg_variance_factor(out.tie_fraction, realised_rho) /
                              cfg.n_per_trial);
  const double z = std::log(out.wr) / sd;
  out.reject = std::fabs(z) >= norm_ppf(1.0 - cfg.alpha / 2.0);
  return out;
}

}  // namespace

SimSummary simulate(const ScenarioSpec& scn, const SimConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("simulate: replicates < 1");
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replicates));

  const int workers = std::max(1, cfg.threads);
  if (workers == 1) {
    for (int r = 0; r < cfg.replicates; ++r) {
      outcomes[static_cast<std::size_t>(r)] =
          run_replicate(scn, cfg, static_cast<std::uint64_t>(r));
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int r = next.fetch_add(1);
          if (r >= cfg.replicates) return;
          try {
            outcomes[static_cast<std::size_t>(r)] =
                run_replicate(scn, cfg, static_cast<std::uint64_t>(r));
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SimSummary s;
  s.replicates = cfg.replicates;
  double wr_sum = 0.0, wr_sq = 0.0, tie_sum = 0.0, tie_sq = 0.0;
  int valid = 0, rejections = 0;
  for (const auto& o : outcomes) {
    tie_sum += o.tie_fraction;
    tie_sq += o.tie_fraction * o.tie_fraction;
    if (o.degenerate) {
      ++s.degenerate;
      continue;
    }
    ++valid;
    wr_sum += o.wr;
    wr_sq += o.wr * o.wr;
    if (o.reject) ++rejections;
  }
  const double r = static_cast<double>(cfg.replicates);
  if (valid > 0) {
    s.mean_win_ratio = wr_sum / valid;
    const double var = std::max(0.0, wr_sq / valid - s.mean_win_ratio * s.mean_win_ratio);
    s.se_win_ratio = std::sqrt(var / valid);
  }
  s.mean_tie_fraction = tie_sum / r;
  const double tvar = std::max(0.0, tie_sq / r - s.mean_tie_fraction * s.mean_tie_fraction);
  s.se_tie_fraction = std::sqrt(tvar / r);
  s.empirical_power = rejections / r;
  s.se_power = std::sqrt(std::max(0.0, s.empirical_power * (1.0 - s.empirical_power)) / r);
  return s;
}

}  // namespace winstat
