#include "winstat/design.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "winstat/normal.hpp"

namespace winstat {

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw std::domain_error("allocation fraction must lie in (0, 1)");
  }
}

void check_p_tie(double p_tie) {
  if (!(p_tie >= 0.0) || !(p_tie < 1.0)) {
    throw std::domain_error("p_tie must lie in [0, 1)");
  }
}

double z_quantile(double p) { return norm_ppf(p); }

long ceil_even(double x) {
  // Round up to the next even integer, tolerating float fuzz just below it.
  const long half = static_cast<long>(std::ceil(x / 2.0 - 1e-9));
  return 2 * std::max(1L, half);
}

}  // namespace

double yg_variance_factor(double p_tie, double rho) {
  check_p_tie(p_tie);
  check_rho(rho);
  return 4.0 * (1.0 + p_tie) / (3.0 * rho * (1.0 - rho) * (1.0 - p_tie));
}

double power_from_variance(double win_ratio, double variance_factor, double n,
                           double alpha) {
  if (!(win_ratio > 0.0)) throw std::domain_error("power: win ratio must be > 0");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("power: bad alpha");
  if (!(n > 0.0)) throw std::domain_error("power: n must be > 0");
  const double sd = std::sqrt(variance_factor / n);
  return 1.0 - norm_cdf(z_quantile(1.0 - alpha / 2.0) - std::log(win_ratio) / sd);
}

double power_at_n(double win_ratio, double p_tie, double n, double alpha, double rho) {
  return power_from_variance(win_ratio, yg_variance_factor(p_tie, rho), n, alpha);
}

SampleSize sample_size_from_variance(double win_ratio, double variance_factor,
                                     const DesignSpec& design) {
  if (!(win_ratio > 0.0) || win_ratio == 1.0) {
    throw std::domain_error("required_sample_size: win ratio must be positive and != 1");
  }
  if (!(design.power > 0.0) || !(design.power < 1.0)) {
    throw std::domain_error("required_sample_size: target power must lie in (0, 1)");
  }
  check_rho(design.allocation);
  const double zsum = z_quantile(1.0 - design.alpha / 2.0) + z_quantile(design.power);
  const double lnwr = std::log(win_ratio);
  SampleSize out;
  out.n_raw = variance_factor * zsum * zsum / (lnwr * lnwr);

  if (design.allocation == 0.5) {
    out.n = ceil_even(out.n_raw);
    out.achieved_power = power_from_variance(win_ratio, variance_factor,
                                             static_cast<double>(out.n), design.alpha);
    return out;
  }

  // Unequal allocation: the variance factor scales as 1/(rho (1 - rho)), so
  // re-evaluate it at the realised arm split and find the smallest workable N.
  const double base = variance_factor * design.allocation * (1.0 - design.allocation);
  long n = std::max(2L, static_cast<long>(std::ceil(out.n_raw - 1e-9)));
  for (long guard = 0; guard < 100000; ++n, ++guard) {
    const long nt = std::lround(design.allocation * static_cast<double>(n));
    const long nc = n - nt;
    if (nt < 1 || nc < 1) continue;
    const double realised = static_cast<double>(nt) / static_cast<double>(n);
    const double var = base / (realised * (1.0 - realised));
    const double pw =
        power_from_variance(win_ratio, var, static_cast<double>(n), design.alpha);
    if (pw >= design.power) {
      out.n = n;
      out.achieved_power = pw;
      return out;
    }
  }
  throw std::runtime_error("required_sample_size: no feasible N found");
}

SampleSize required_sample_size(double win_ratio, double p_tie, const DesignSpec& design) {
  return sample_size_from_variance(
      win_ratio, yg_variance_factor(p_tie, design.allocation), design);
}

// ---------------------------------------------------------------- stratified

namespace {

void check_strata(std::span<const StratumInput> strata) {
  if (strata.empty()) throw std::invalid_argument("strata must be non-empty");
  double fsum = 0.0;
  for (const auto& st : strata) {
    if (!(st.weight > 0.0)) throw std::invalid_argument("stratum weights must be > 0");
    if (!(st.fraction > 0.0)) throw std::invalid_argument("stratum fractions must be > 0");
    fsum += st.fraction;
  }
  if (std::fabs(fsum - 1.0) > 1e-8) {
    throw std::invalid_argument("stratum fractions must sum to 1");
  }
}

}  // namespace

double stratified_win_ratio(std::span<const StratumInput> strata) {
  check_strata(strata);
  double num = 0.0, den = 0.0;
  for (const auto& st : strata) {
    const double scale = st.weight * st.fraction * st.fraction;
    num += scale * st.win_sum;
    den += scale * st.loss_sum;
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

double stratified_tie(std::span<const StratumInput> strata) {
  check_strata(strata);
  double num = 0.0, den = 0.0;
  for (const auto& st : strata) {
    const double scale = st.weight * st.fraction * st.fraction;
    num += scale * st.tie;
    den += scale;
  }
  return num / den;
}

double stratified_variance_factor(std::span<const StratumInput> strata, double rho) {
  const double p_tie = stratified_tie(strata);
  double num = 0.0, den = 0.0;
  for (const auto& st : strata) {
    num += st.weight * st.weight * st.fraction * st.fraction * st.fraction;
    den += st.weight * st.fraction * st.fraction;
  }
  return yg_variance_factor(p_tie, rho) * num / (den * den);
}

double stratified_power_at_n(std::span<const StratumInput> strata, double n, double alpha,
                             double rho) {
  return power_from_variance(stratified_win_ratio(strata),
                             stratified_variance_factor(strata, rho), n, alpha);
}

SampleSize stratified_required_sample_size(std::span<const StratumInput> strata,
                                           const DesignSpec& design) {
  return sample_size_from_variance(stratified_win_ratio(strata),
                                   stratified_variance_factor(strata, design.allocation),
                                   design);
}

// ----------------------------------------------------------------- tau grids

double relative_change_rate(double x1, double y1, double x2, double y2) {
  if (y1 == 0.0 || x2 == x1) return std::numeric_limits<double>::quiet_NaN();
  return (y2 - y1) / y1 / (x2 - x1) * 0.1;
}

std::vector<GridRow> correlation_grid(
    const std::function<WinLossTieTable(double, double)>& evaluate,
    std::span<const double> taus, std::span<const double> study_lengths,
    const DesignSpec& design, long fixed_n, int threads, double variance_inflation) {
  if (taus.empty() || study_lengths.empty()) {
    throw std::invalid_argument("correlation_grid: empty sweep");
  }
  const std::size_t n_rows = taus.size() * study_lengths.size();
  std::vector<GridRow> rows(n_rows);

  auto fill_cell = [&](std::size_t idx) {
    const std::size_t si = idx / taus.size();
    const std::size_t ti = idx % taus.size();
    GridRow& row = rows[idx];
    row.tau = taus[ti];
    row.study_length = study_lengths[si];
    const WinLossTieTable t = evaluate(row.tau, row.study_length);
    row.win_ratio = t.win_ratio();
    row.p_tie = t.tie;
    const double var =
        yg_variance_factor(row.p_tie, design.allocation) * variance_inflation;
    if (fixed_n > 0) {
      row.n = fixed_n;
      row.power = power_from_variance(row.win_ratio, var, static_cast<double>(fixed_n),
                                      design.alpha);
    } else {
      const SampleSize ss = sample_size_from_variance(row.win_ratio, var, design);
      row.n = ss.n;
      row.power = ss.achieved_power;
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1 || n_rows <= 1) {
    for (std::size_t i = 0; i < n_rows; ++i) fill_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n_rows) return;
          try {
            fill_cell(i);
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

  // RCR per 0.1 tau between consecutive rows of one study-length block.
  for (std::size_t si = 0; si < study_lengths.size(); ++si) {
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      GridRow& row = rows[si * taus.size() + ti];
      if (ti == 0) {
        row.rcr = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const GridRow& prev = rows[si * taus.size() + ti - 1];
      const double y1 = (fixed_n > 0) ? prev.power : static_cast<double>(prev.n);
      const double y2 = (fixed_n > 0) ? row.power : static_cast<double>(row.n);
      row.rcr = relative_change_rate(prev.tau, y1, row.tau, y2);
    }
  }
  return rows;
}

}  // namespace winstat
