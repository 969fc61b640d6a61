#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lplab/models.hpp"
#include "lplab/risk.hpp"
#include "oracles.hpp"

using namespace lplab;
using models::Prior;

namespace {

Prior gamma_shaped_grid() {
  // Gamma(2,1)-shaped density held as a grid prior
  const auto xs = oracles::linspace(0.0, 14.0, 301);
  std::vector<double> pdf(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pdf[i] = xs[i] * std::exp(-xs[i]);
  return Prior(models::make_grid_density(xs, pdf));
}

}  // namespace

TEST_CASE("absolute normal moments") {
  CHECK(std::abs(risk::abs_normal_moment(1.0) - 0.7978845608028653559) <= 1e-14);
  CHECK(std::abs(risk::abs_normal_moment(1.5) - 0.8600399873245195354) <= 1e-14);
  CHECK(std::abs(risk::abs_normal_moment(4.0) - 3.0) <= 1e-13);
}

TEST_CASE("quadratic loss risk of the standard gaussian prior") {
  // E|X - aY|^2 = (1-a)^2 + a^2
  const Prior prior = models::make_gaussian(0.0, 1.0);
  for (double a : {0.0, 0.3, 0.5, 1.0}) {
    const double expect = (1.0 - a) * (1.0 - a) + a * a;
    const auto pt = risk::bayes_risk(prior, a, 2.0, risk::Quadrature{});
    CHECK(std::abs(pt.value - expect) <= 1e-10);
  }
}

TEST_CASE("absolute loss risk via the half-normal identity") {
  // X - aY ~ N(0, (1-a)^2 + a^2), so E|X - aY| = sqrt(2 ((1-a)^2 + a^2) / pi)
  const Prior prior = models::make_gaussian(0.0, 1.0);
  for (double a : {0.1, 0.5, 0.9, 1.2}) {
    const double s2 = (1.0 - a) * (1.0 - a) + a * a;
    const double expect = std::sqrt(2.0 * s2 / M_PI);
    const auto pt = risk::bayes_risk(prior, a, 1.0, risk::Quadrature{});
    CHECK(std::abs(pt.value - expect) <= 1e-10);
  }
}

TEST_CASE("point mass prior risk is a pure noise moment") {
  const Prior prior = Prior(models::PointMassPrior{0.0});
  const auto pt = risk::bayes_risk(prior, 0.7, 1.5, risk::Quadrature{});
  CHECK(std::abs(pt.value - std::pow(0.7, 1.5) * risk::abs_normal_moment(1.5)) <= 1e-10);
  // minimized at a = 0
  const auto curve = risk::risk_scan(prior, 2.0, oracles::linspace(-0.5, 1.5, 21));
  CHECK(curve.a[risk::argmin(curve)] == 0.0);
}

TEST_CASE("one-sided derivative at a = 1 is the absolute noise moment") {
  for (const Prior& prior :
       {models::make_gaussian(0.0, 1.0), Prior(models::TwoPointPrior{-1.0, 1.0, 0.5})}) {
    const double d = risk::risk_derivative_at_one(prior, 1.0);
    CHECK(d > 0.0);
    CHECK(std::abs(d - std::sqrt(2.0 / M_PI)) <= 1e-3);
  }
}

TEST_CASE("monte carlo agrees with quadrature and is reproducible") {
  const Prior prior = models::make_gaussian(0.0, 1.0);
  const risk::MonteCarlo mc{200000, 20240811};
  for (double p : {1.0, 2.0}) {
    const auto q = risk::bayes_risk(prior, 0.4, p, risk::Quadrature{});
    const auto m = risk::bayes_risk(prior, 0.4, p, mc);
    REQUIRE(m.stderr_est.has_value());
    CHECK(*m.stderr_est > 0.0);
    CHECK(std::abs(m.value - q.value) <= 4.0 * *m.stderr_est);
  }
  // bitwise determinism, independent of the worker count
  const auto m1 = risk::bayes_risk(prior, 0.4, 1.0, mc, 1);
  const auto m4 = risk::bayes_risk(prior, 0.4, 1.0, mc, 4);
  CHECK(m1.value == m4.value);
  CHECK(*m1.stderr_est == *m4.stderr_est);
}

TEST_CASE("risk scans stay admissible for all tested priors and losses") {
  const std::vector<Prior> priors = {models::make_gaussian(0.0, 1.0),
                                     Prior(models::TwoPointPrior{-1.0, 1.0, 0.5}),
                                     gamma_shaped_grid()};
  const auto a_grid = oracles::linspace(-0.5, 1.5, 11);
  for (const Prior& prior : priors) {
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      const auto curve = risk::risk_scan(prior, p, a_grid);
      const double a_min = curve.a[risk::argmin(curve)];
      CHECK(a_min >= 0.0);
      CHECK(a_min < 1.0);
      CHECK(risk::admissible_shape(curve, 1e-9));
    }
  }
}

TEST_CASE("matched prior risk minimizer sits at the matched slope") {
  const auto a_grid = oracles::linspace(-0.5, 1.5, 41);  // step 0.05
  for (double a_star : {0.25, 0.5, 0.75}) {
    for (double p : {1.0, 2.0}) {
      const auto curve =
          risk::risk_scan(models::matched_gaussian_prior(a_star), p, a_grid);
      CHECK(std::abs(curve.a[risk::argmin(curve)] - a_star) <= 0.05 + 1e-12);
    }
  }
}

TEST_CASE("two point prior at p = 1.5 keeps its minimizer inside [0, 1)") {
  const auto curve = risk::risk_scan(Prior(models::TwoPointPrior{-1.0, 1.0, 0.5}), 1.5,
                                     oracles::linspace(-0.5, 1.5, 41));
  const double a_min = curve.a[risk::argmin(curve)];
  CHECK(a_min >= 0.0);
  CHECK(a_min < 1.0);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(risk::bayes_risk(models::make_gaussian(0.0, 1.0), 0.5, 0.5,
                                   risk::Quadrature{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(risk::risk_scan(models::make_gaussian(0.0, 1.0), 1.0, {0.5, 0.0}),
                  std::invalid_argument);
}
