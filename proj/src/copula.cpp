#include "winstat/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "winstat/normal.hpp"
#include "winstat/quadrature.hpp"

namespace winstat {

double tau_to_kappa(double tau) {
  if (tau < 0.0 || tau >= 1.0) {
    throw std::domain_error("tau_to_kappa: tau must lie in [0, 1)");
  }
  return 1.0 / (1.0 - tau);
}

double kappa_to_tau(double kappa) {
  if (!(kappa >= 1.0)) throw std::domain_error("kappa_to_tau: kappa must be >= 1");
  return 1.0 - 1.0 / kappa;
}

double tau_to_gauss_rho(double tau) {
  if (tau <= -1.0 || tau >= 1.0) {
    throw std::domain_error("tau_to_gauss_rho: tau must lie in (-1, 1)");
  }
  return std::sin(std::numbers::pi * tau / 2.0);
}

Eigen::MatrixXd exchangeable_gauss_corr(int dim, double tau) {
  const double rho = tau_to_gauss_rho(tau);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, rho);
  m.diagonal().setOnes();
  return m;
}

// --------------------------------------------------------------- MVN orthant

namespace {

// First 19 primes: square roots form the Richtmyer quasi-random directions.
const double kPrimes[19] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                            31, 37, 41, 43, 47, 53, 59, 61, 67};

double clamp01(double p) { return std::min(1.0 - 1e-16, std::max(1e-300, p)); }

// Genz sequential-conditioning integrand for P(Z <= b), lower limits -inf.
double genz_integrand(const Eigen::MatrixXd& chol, const Eigen::VectorXd& b,
                      const double* w, std::vector<double>& y) {
  const int m = static_cast<int>(b.size());
  double e = norm_cdf(b[0] / chol(0, 0));
  double f = e;
  for (int i = 1; i < m; ++i) {
    y[i - 1] = norm_ppf(clamp01(w[i - 1] * e));
    double dot = 0.0;
    for (int j = 0; j < i; ++j) dot += chol(i, j) * y[j];
    e = norm_cdf((b[i] - dot) / chol(i, i));
    f *= e;
  }
  return f;
}

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissae; symmetric).
const double kGlX[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
const double kGlW[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// Trivariate orthant by conditioning on the first coordinate: the remaining
// pair is bivariate normal with closed-form CDF, leaving one 1-D integral of
// phi(z) * Phi2(...).  The panels are a fixed ladder resolving the normal
// density plus knots tracking each conditional sigmoid at its own scale, with
// Gauss-Legendre nodes per panel.  Every node position varies continuously
// with the arguments (knots enter and leave the range through its endpoints),
// so unlike an adaptive rule the result carries no refinement jitter and can
// sit inside an outer adaptive integral without polluting its error estimate.
// Absolute accuracy is ~1e-13; the truncation at |z| = 8.5 contributes ~1e-17.
double tvn_cdf(const Eigen::VectorXd& upper, const Eigen::MatrixXd& corr,
               double* error_estimate) {
  const double r01 = corr(0, 1), r02 = corr(0, 2), r12 = corr(1, 2);
  const double s1 = std::sqrt((1.0 - r01) * (1.0 + r01));
  const double s2 = std::sqrt((1.0 - r02) * (1.0 + r02));
  const double rc = std::clamp((r12 - r01 * r02) / (s1 * s2), -1.0, 1.0);
  if (error_estimate) *error_estimate = 1e-12;
  const double hi = std::min(upper[0], 8.5);
  if (hi <= -8.5) return 0.0;

  double cuts[32];
  int ncuts = 0;
  cuts[ncuts++] = -8.5;
  for (double c : {-6.0, -4.0, -2.5, -1.25, 0.0, 1.25, 2.5, 4.0, 6.0}) {
    if (c < hi) cuts[ncuts++] = c;
  }
  const double rr[2] = {r01, r02}, ss[2] = {s1, s2};
  for (int j = 0; j < 2; ++j) {
    if (std::fabs(rr[j]) < 1e-12) continue;
    const double centre = upper[j + 1] / rr[j];
    const double width = ss[j] / std::fabs(rr[j]);
    for (double off : {-8.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 8.0}) {
      const double c = centre + off * width;
      if (c > -8.5 && c < hi) cuts[ncuts++] = c;
    }
  }
  cuts[ncuts++] = hi;
  std::sort(cuts, cuts + ncuts);

  double total = 0.0;
  for (int i = 0; i + 1 < ncuts; ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double half = 0.5 * (cuts[i + 1] - cuts[i]);
    if (half <= 0.0) continue;
    double acc = 0.0;
    for (int q = 0; q < 8; ++q) {
      for (double sgn : {-1.0, 1.0}) {
        const double z = mid + sgn * half * kGlX[q];
        acc += kGlW[q] * norm_pdf(z) *
               bvn_cdf((upper[1] - r01 * z) / s1, (upper[2] - r02 * z) / s2, rc);
      }
    }
    total += half * acc;
  }
  return total;
}

}  // namespace

double mvn_cdf(const Eigen::VectorXd& upper, const Eigen::MatrixXd& corr,
               double target_error, double* error_estimate) {
  const int m = static_cast<int>(upper.size());
  if (corr.rows() != m || corr.cols() != m) {
    throw std::invalid_argument("mvn_cdf: dimension mismatch");
  }
  if (error_estimate) *error_estimate = 0.0;
  if (m == 0) return 1.0;
  if (m == 1) return norm_cdf(upper[0]);
  if (m == 2) return bvn_cdf(upper[0], upper[1], corr(0, 1));
  if (m == 3 && std::fabs(corr(0, 1)) < 1.0 - 1e-10 &&
      std::fabs(corr(0, 2)) < 1.0 - 1e-10) {
    return tvn_cdf(upper, corr, error_estimate);
  }
  if (m - 1 > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("mvn_cdf: dimension too large");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("mvn_cdf: correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  constexpr int kShifts = 12;
  std::vector<double> y(static_cast<std::size_t>(m - 1));
  std::vector<double> w(static_cast<std::size_t>(m - 1));
  double value = 0.0, err = 0.0;
  for (int npts = 4096; npts <= 262144; npts *= 4) {
    double sum = 0.0, sumsq = 0.0;
    for (int shift = 0; shift < kShifts; ++shift) {
      // Fixed-seed shifts make the whole scheme deterministic (common random
      // numbers across calls, so results vary smoothly with the arguments).
      RngStream rng(0x5eedba11, static_cast<std::uint64_t>(shift));
      std::vector<double> delta(w.size());
      for (double& d : delta) d = rng.uniform01();
      double acc = 0.0;
      for (int j = 1; j <= npts; ++j) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double v = j * std::sqrt(kPrimes[i]) + delta[i];
          w[i] = std::fabs(2.0 * (v - std::floor(v)) - 1.0);  // baker's transform
        }
        acc += (genz_integrand(chol, upper, w.data(), y) - acc) / j;
      }
      sum += acc;
      sumsq += acc * acc;
    }
    value = sum / kShifts;
    const double var = std::max(0.0, sumsq / kShifts - value * value);
    err = 3.0 * std::sqrt(var / kShifts);
    if (err < target_error) break;
  }
  if (error_estimate) *error_estimate = err;
  return value;
}

// ------------------------------------------------------------- ArmJointModel

ArmJointModel::ArmJointModel(std::vector<MarginalModel> marginals, CopulaSpec copula)
    : marginals_(std::move(marginals)), copula_(std::move(copula)) {
  if (marginals_.empty()) {
    throw std::invalid_argument("ArmJointModel: need at least one marginal");
  }
  if (const auto* gh = std::get_if<GumbelHougaard>(&copula_)) {
    if (!(gh->kappa >= 1.0) || !std::isfinite(gh->kappa)) {
      throw std::invalid_argument("ArmJointModel: Gumbel-Hougaard kappa must be >= 1");
    }
  } else {
    const auto& g = std::get<GaussianCopula>(copula_);
    const int k = dimension();
    if (g.corr.rows() != k || g.corr.cols() != k) {
      throw std::invalid_argument("ArmJointModel: correlation matrix dimension mismatch");
    }
    if (!g.corr.isApprox(g.corr.transpose(), 1e-12)) {
      throw std::invalid_argument("ArmJointModel: correlation matrix must be symmetric");
    }
    for (int i = 0; i < k; ++i) {
      if (std::fabs(g.corr(i, i) - 1.0) > 1e-12) {
        throw std::invalid_argument("ArmJointModel: correlation diagonal must be 1");
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g.corr);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("ArmJointModel: correlation matrix must be positive definite");
    }
    chol_ = llt.matrixL();
  }
}

double ArmJointModel::joint_survival(std::span<const double> y) const {
  const int k = dimension();
  if (static_cast<int>(y.size()) != k) {
    throw std::invalid_argument("joint_survival: argument dimension mismatch");
  }

  if (const auto* gh = std::get_if<GumbelHougaard>(&copula_)) {
    if (gh->kappa == 1.0) {
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        if (y[i] > 0.0) total += cumulative_hazard(marginals_[i], y[i]);
      }
      return std::exp(-total);
    }
    double a = 0.0;
    for (int i = 0; i < k; ++i) {
      if (y[i] > 0.0) a += std::pow(cumulative_hazard(marginals_[i], y[i]), gh->kappa);
    }
    if (a == 0.0) return 1.0;
    return std::exp(-std::pow(a, 1.0 / gh->kappa));
  }

  // Gaussian: active coordinates (y_i > 0) only; the others marginalise away.
  const auto& g = std::get<GaussianCopula>(copula_);
  std::vector<int> active;
  for (int i = 0; i < k; ++i) {
    if (y[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) return 1.0;
  if (active.size() == 1) return survival(marginals_[active[0]], y[active[0]]);
  Eigen::VectorXd z(static_cast<int>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    z[static_cast<int>(i)] = norm_ppf(clamp01(survival(marginals_[active[i]], y[active[i]])));
  }
  if (active.size() == 2) return bvn_cdf(z[0], z[1], g.corr(active[0], active[1]));
  Eigen::MatrixXd sub(static_cast<int>(active.size()), static_cast<int>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = 0; j < active.size(); ++j) {
      sub(static_cast<int>(i), static_cast<int>(j)) = g.corr(active[i], active[j]);
    }
  }
  return mvn_cdf(z, sub);
}

double ArmJointModel::neg_partial(std::span<const double> y, int k) const {
  const int dim = dimension();
  if (static_cast<int>(y.size()) != dim || k < 0 || k >= dim) {
    throw std::invalid_argument("neg_partial: bad arguments");
  }
  if (!(y[k] > 0.0)) {
    throw std::invalid_argument("neg_partial: differentiated coordinate must be > 0");
  }

  if (const auto* gh = std::get_if<GumbelHougaard>(&copula_)) {
    const double kap = gh->kappa;
    if (kap == 1.0) {
      double total = 0.0;
      for (int i = 0; i < dim; ++i) {
        if (y[i] > 0.0) total += cumulative_hazard(marginals_[i], y[i]);
      }
      return std::exp(-total) * hazard(marginals_[k], y[k]);
    }
    double a = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (y[i] > 0.0) a += std::pow(cumulative_hazard(marginals_[i], y[i]), kap);
    }
    const double u = cumulative_hazard(marginals_[k], y[k]);
    if (a == 0.0 || u == 0.0) return 0.0;
    return std::exp(-std::pow(a, 1.0 / kap)) * std::pow(a, 1.0 / kap - 1.0) *
           std::pow(u, kap - 1.0) * hazard(marginals_[k], y[k]);
  }

  const auto& g = std::get<GaussianCopula>(copula_);
  std::vector<int> others;
  for (int i = 0; i < dim; ++i) {
    if (i != k && y[i] > 0.0) others.push_back(i);
  }
  const double fk = density(marginals_[k], y[k]);
  if (others.empty()) return fk;
  const double zk = norm_ppf(clamp01(survival(marginals_[k], y[k])));
  if (others.size() == 1) {
    const int j = others[0];
    const double zj = norm_ppf(clamp01(survival(marginals_[j], y[j])));
    const double rho = g.corr(j, k);
    return fk * norm_cdf((zj - rho * zk) / std::sqrt(1.0 - rho * rho));
  }
  // Conditioning on Z_k leaves the other active coordinates jointly normal
  // with closed-form shifted limits and correlations, so the partial is
  // f_k times an (m-1)-dimensional CDF -- the same identity as the
  // one-other-coordinate branch above, just one dimension up.
  const int m = static_cast<int>(others.size());
  Eigen::VectorXd cz(m);
  Eigen::MatrixXd cc(m, m);
  std::vector<double> sig(others.size());
  for (int i = 0; i < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double rik = g.corr(others[iu], k);
    sig[iu] = std::sqrt((1.0 - rik) * (1.0 + rik));
    const double zi =
        norm_ppf(clamp01(survival(marginals_[others[iu]], y[others[iu]])));
    cz[i] = (zi - rik * zk) / sig[iu];
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const auto iu = static_cast<std::size_t>(i), ju = static_cast<std::size_t>(j);
      if (i == j) {
        cc(i, j) = 1.0;
      } else {
        const double rik = g.corr(others[iu], k), rjk = g.corr(others[ju], k);
        cc(i, j) = std::clamp((g.corr(others[iu], others[ju]) - rik * rjk) /
                                  (sig[iu] * sig[ju]),
                              -1.0, 1.0);
      }
    }
  }
  return fk * mvn_cdf(cz, cc);
}

void ArmJointModel::sample(RngStream& rng, std::span<double> out) const {
  const int k = dimension();
  if (static_cast<int>(out.size()) != k) {
    throw std::invalid_argument("sample: output dimension mismatch");
  }

  if (const auto* gh = std::get_if<GumbelHougaard>(&copula_)) {
    const double kap = gh->kappa;
    if (kap == 1.0) {
      for (int i = 0; i < k; ++i) {
        out[i] = inverse_survival(marginals_[i], rng.uniform01());
      }
      return;
    }
    // Positive-stable frailty (Chambers-Mallows-Stuck / Kanter): V with
    // Laplace transform exp(-t^alpha), alpha = 1/kappa; then
    // U_i = exp(-(E_i / V)^alpha) are Gumbel-Hougaard uniforms.
    const double alpha = 1.0 / kap;
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double wexp = rng.exponential(1.0);
    const double v = std::sin(alpha * theta) / std::pow(std::sin(theta), 1.0 / alpha) *
                     std::pow(std::sin((1.0 - alpha) * theta) / wexp, (1.0 - alpha) / alpha);
    for (int i = 0; i < k; ++i) {
      const double u = std::exp(-std::pow(rng.exponential(1.0) / v, alpha));
      out[i] = inverse_survival(marginals_[i], clamp01(u));
    }
    return;
  }

  // Gaussian: correlated normals through the Cholesky factor, then the
  // survival convention Y_i = S_i^{-1}(Phi(Z_i)).
  Eigen::VectorXd xi(k);
  for (int i = 0; i < k; ++i) xi[i] = rng.normal();
  const Eigen::VectorXd z = chol_ * xi;
  for (int i = 0; i < k; ++i) {
    out[i] = inverse_survival(marginals_[i], clamp01(norm_cdf(z[i])));
  }
}

}  // namespace winstat
