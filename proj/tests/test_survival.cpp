#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "winstat/censoring.hpp"
#include "winstat/survival.hpp"

using namespace winstat;

TEST_CASE("exponential marginal") {
  const Exponential m(0.00057);
  CHECK(m.survival(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.survival(500.0) == doctest::Approx(0.75201).epsilon(1e-5));
  CHECK(m.density(500.0) == doctest::Approx(0.00057 * m.survival(500.0)).epsilon(1e-13));
  CHECK(m.hazard(123.0) == doctest::Approx(0.00057).epsilon(1e-15));
  CHECK(m.cumulative_hazard(500.0) == doctest::Approx(0.285).epsilon(1e-13));
  CHECK(m.inverse_survival(m.survival(321.0)) == doctest::Approx(321.0).epsilon(1e-10));
  CHECK(m.inverse_survival(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Exponential(-1.0), std::invalid_argument);
}

TEST_CASE("piecewise exponential marginal") {
  const PiecewiseExponential m({100.0}, {0.01, 0.02});
  CHECK(m.survival(50.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  CHECK(m.survival(100.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(m.survival(150.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  // Hazard takes the right-limit value at the breakpoint.
  CHECK(m.hazard(100.0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(m.hazard(99.999) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(m.density(150.0) == doctest::Approx(0.02 * std::exp(-2.0)).epsilon(1e-13));
  CHECK(m.cumulative_hazard(150.0) == doctest::Approx(2.0).epsilon(1e-13));
  for (double u : {0.9, 0.5, 0.1, 0.01}) {
    CHECK(m.survival(m.inverse_survival(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  CHECK_THROWS_AS(PiecewiseExponential({100.0}, {0.01}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseExponential({100.0, 50.0}, {0.01, 0.02, 0.03}),
                  std::invalid_argument);
}

TEST_CASE("tabulated marginal interpolates log-linearly") {
  const Tabulated m({0.0, 100.0, 200.0}, {1.0, 0.8, 0.5});
  CHECK(m.survival(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.survival(100.0) == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(m.survival(200.0) == doctest::Approx(0.5).epsilon(1e-13));
  // Log-linear interpolation: the geometric mean at the segment midpoint.
  CHECK(m.survival(150.0) == doctest::Approx(std::sqrt(0.8 * 0.5)).epsilon(1e-12));
  // Exponential tail extends the last segment's hazard.
  const double tail_rate = (std::log(0.8) - std::log(0.5)) / 100.0;
  CHECK(m.survival(300.0) == doctest::Approx(0.5 * std::exp(-tail_rate * 100.0)).epsilon(1e-12));
  CHECK(m.hazard(150.0) == doctest::Approx(tail_rate).epsilon(1e-12));
  CHECK(m.hazard(350.0) == doctest::Approx(tail_rate).epsilon(1e-12));
  for (double u : {0.95, 0.8, 0.6, 0.5, 0.3}) {
    CHECK(m.survival(m.inverse_survival(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Tabulated({0.0, 100.0}, {0.9, 0.8}), std::invalid_argument);
  CHECK_THROWS_AS(Tabulated({0.0, 100.0, 50.0}, {1.0, 0.8, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Tabulated({0.0, 100.0, 200.0}, {1.0, 0.8, 0.9}), std::invalid_argument);
}

TEST_CASE("variant free functions dispatch") {
  const MarginalModel m = Exponential(0.002);
  CHECK(survival(m, 500.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(density(m, 500.0) == doctest::Approx(0.002 * std::exp(-1.0)).epsilon(1e-13));
  CHECK(hazard(m, 500.0) == doctest::Approx(0.002).epsilon(1e-15));
  CHECK(cumulative_hazard(m, 500.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(inverse_survival(m, std::exp(-1.0)) == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(breakpoints(m).empty());
  const MarginalModel pw = PiecewiseExponential({30.0, 70.0}, {0.1, 0.2, 0.3});
  CHECK(breakpoints(pw) == std::vector<double>{30.0, 70.0});
  CHECK_THROWS_AS(inverse_survival(m, 0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_survival(m, 1.5), std::domain_error);
}

TEST_CASE("scale_hazard applies a proportional-hazards factor") {
  const MarginalModel base = Exponential(0.004);
  const MarginalModel scaled = scale_hazard(base, 0.5);
  CHECK(survival(scaled, 700.0) ==
        doctest::Approx(std::pow(survival(base, 700.0), 0.5)).epsilon(1e-12));

  const MarginalModel pw = PiecewiseExponential({100.0}, {0.01, 0.02});
  const MarginalModel pw2 = scale_hazard(pw, 2.0);
  CHECK(survival(pw2, 150.0) ==
        doctest::Approx(survival(pw, 150.0) * survival(pw, 150.0)).epsilon(1e-12));

  const MarginalModel tab = Tabulated({0.0, 100.0, 200.0}, {1.0, 0.8, 0.5});
  const MarginalModel tab3 = scale_hazard(tab, 3.0);
  for (double t : {40.0, 100.0, 170.0, 280.0}) {
    CHECK(survival(tab3, t) == doctest::Approx(std::pow(survival(tab, t), 3.0)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(scale_hazard(base, 0.0), std::invalid_argument);
}

TEST_CASE("censoring with accrual only") {
  const CensoringModel cens(500.0, 200.0);
  // Follow-up is at least s - b and at most s.
  CHECK(cens.survival(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cens.survival(300.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Uniform accrual: P(L > x) = (s - x) / b on (s-b, s).
  CHECK(cens.survival(400.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cens.survival(450.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cens.survival(500.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(cens.density(400.0) == doctest::Approx(1.0 / 200.0).epsilon(1e-12));
  CHECK(cens.density(100.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(cens.atom_at_study_end() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  const std::vector<double> knots = cens.knots();
  CHECK(std::find(knots.begin(), knots.end(), 300.0) != knots.end());
}

TEST_CASE("censoring with accrual and dropout") {
  const CensoringModel cens(500.0, 200.0, {1.0, 1.0}, Exponential(0.00015));
  const double x = 400.0;
  const double sl = 0.5;                        // admin part
  const double sg = std::exp(-0.00015 * x);     // dropout part
  CHECK(cens.survival(x) == doctest::Approx(sl * sg).epsilon(1e-12));
  // density of min(G, L): g sL + fL sG.
  const double expect = 0.00015 * sg * sl + (1.0 / 200.0) * sg;
  CHECK(cens.density(x) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cens.atom_at_study_end() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("censoring without accrual has an atom at the study end") {
  const CensoringModel cens(500.0, 0.0, {1.0, 1.0}, Exponential(0.001));
  CHECK(cens.survival(499.0) == doctest::Approx(std::exp(-0.499)).epsilon(1e-12));
  CHECK(cens.admin_density(499.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // P(C = s) = P(G > s): nobody is administratively censored before s.
  CHECK(cens.atom_at_study_end() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  const CensoringModel pure(500.0, 0.0);
  CHECK(pure.atom_at_study_end() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pure.survival(499.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("beta-shaped accrual changes the censoring law") {
  // Beta(2,1) accrual puts more enrollment mass late in the window, so more
  // patients have short follow-up than under uniform accrual.
  const CensoringModel uni(500.0, 200.0, {1.0, 1.0});
  const CensoringModel beta21(500.0, 200.0, {2.0, 1.0});
  // P(L > 400) = P(X < 0.5): uniform gives 0.5, Beta(2,1) cdf(0.5) = 0.25.
  CHECK(beta21.survival(400.0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(beta21.survival(400.0) < uni.survival(400.0));
  CHECK_THROWS_AS(CensoringModel(500.0, 600.0), std::invalid_argument);
  CHECK_THROWS_AS(CensoringModel(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CensoringModel(500.0, 100.0, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("censoring samples follow the analytic law") {
  const CensoringModel cens(500.0, 200.0, {1.0, 1.0}, Exponential(0.001));
  RngStream rng(11, 0);
  const int n = 40000;
  int above400 = 0;
  double max_seen = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = cens.sample(rng);
    REQUIRE(c > 0.0);
    REQUIRE(c <= 500.0);
    above400 += (c > 400.0);
    max_seen = std::max(max_seen, c);
  }
  const double p = cens.survival(400.0);
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::fabs(double(above400) / n - p) < 4.0 * se);
  CHECK(max_seen > 450.0);
}
