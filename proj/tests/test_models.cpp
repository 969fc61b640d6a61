#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <variant>

#include "lplab/errors.hpp"
#include "lplab/models.hpp"
#include "lplab/specfun.hpp"
#include "oracles.hpp"

using namespace lplab;
using models::CounterexampleParams;
using models::Prior;

namespace {

double gaussian_pdf(double x, double mean, double var) {
  return specfun::std_normal_pdf((x - mean) / std::sqrt(var)) / std::sqrt(var);
}

// discrete total variation between a grid density and a reference density
double grid_tv(const models::GridDensityPrior& g, const std::function<double(double)>& ref) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double h = g.x[i + 1] - g.x[i];
    tv += 0.25 * h *
          (std::abs(g.pdf[i] - ref(g.x[i])) + std::abs(g.pdf[i + 1] - ref(g.x[i + 1])));
  }
  return tv;
}

double grid_mass(const models::GridDensityPrior& g) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    s += 0.5 * (g.x[i + 1] - g.x[i]) * (g.pdf[i] + g.pdf[i + 1]);
  }
  return s;
}

}  // namespace

TEST_CASE("matched gaussian prior") {
  const Prior half = models::matched_gaussian_prior(0.5);
  const auto* g = std::get_if<models::GaussianPrior>(&half);
  REQUIRE(g != nullptr);
  CHECK(g->mean == 0.0);
  CHECK(g->variance == 1.0);

  const Prior tq = models::matched_gaussian_prior(0.75);
  CHECK(std::get<models::GaussianPrior>(tq).variance == doctest::Approx(3.0).epsilon(1e-15));

  const Prior zero = models::matched_gaussian_prior(0.0);
  CHECK(std::holds_alternative<models::PointMassPrior>(zero));

  CHECK_THROWS_AS(models::matched_gaussian_prior(1.0), std::invalid_argument);
  CHECK_THROWS_AS(models::matched_gaussian_prior(-0.2), std::invalid_argument);
}

TEST_CASE("grid density construction invariants") {
  auto g = models::make_grid_density({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, -1e-14, 1.0});
  CHECK(std::abs(grid_mass(g) - 1.0) <= 1e-9);
  for (double v : g.pdf) CHECK(v >= 0.0);
  CHECK(g.cdf.front() == 0.0);
  CHECK(std::abs(g.cdf.back() - 1.0) <= 1e-9);

  CHECK_THROWS_AS(models::make_grid_density({0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(models::make_grid_density({0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("counterexample prior with rho = 0 is the matched gaussian") {
  const auto g = models::counterexample_prior({0.5, 0.0, 0.0, 1.3});
  double sup = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    sup = std::max(sup, std::abs(g.pdf[i] - gaussian_pdf(g.x[i], 0.0, 1.0)));
  }
  CHECK(sup <= 1e-10);
  CHECK(grid_tv(g, [](double x) { return gaussian_pdf(x, 0.0, 1.0); }) <= 1e-8);
}

TEST_CASE("counterexample prior variance identities") {
  // (a, omega) = (1/2, 0): unit variance for any rho
  for (double rho : {0.3, 1.0}) {
    const auto g = models::counterexample_prior({0.5, rho, 0.0, 0.0});
    const auto mom = models::prior_moments(Prior(g));
    CHECK(std::abs(mom.variance - 1.0) <= 1e-6);
  }
  // omega at the He_3 zero sqrt(3): frozen from the closed-form variance
  const auto g = models::counterexample_prior({0.5, 1.0, 0.0, std::sqrt(3.0)});
  const auto mom = models::prior_moments(Prior(g));
  CHECK(std::abs(mom.variance - 0.7154447609345993147) <= 1e-6);
  CHECK(std::abs(mom.mean) <= 1e-9);

  CHECK_THROWS_AS(models::counterexample_prior({0.5, 1.2, 0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(models::counterexample_prior({1.0, 0.5, 0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("prior moments closed forms") {
  const auto mg = models::prior_moments(models::make_gaussian(0.0, 3.0));
  CHECK(mg.mean == 0.0);
  CHECK(mg.variance == 3.0);

  const auto mgam = models::prior_moments(Prior(models::GammaPrior{1.0, 1.0}));
  CHECK(mgam.mean == 1.0);
  CHECK(mgam.variance == 1.0);

  const auto mtp = models::prior_moments(Prior(models::TwoPointPrior{-1.0, 1.0, 0.5}));
  CHECK(mtp.mean == 0.0);
  CHECK(mtp.variance == 1.0);

  const auto mpm = models::prior_moments(Prior(models::PointMassPrior{2.5}));
  CHECK(mpm.mean == 2.5);
  CHECK(mpm.variance == 0.0);
}

TEST_CASE("nef matched prior: quadratic log-partition reproduces the matched gaussian") {
  models::NefNoise nef;
  nef.log_partition = [](double x) { return 0.5 * x * x; };
  nef.psi_gap_bound = 0.0;
  for (double a : {0.3, 0.5}) {
    const auto g = models::nef_matched_prior(nef, a);
    const double v = a / (1.0 - a);
    CHECK(grid_tv(g, [&](double x) { return gaussian_pdf(x, 0.0, v); }) <= 1e-8);
  }
}

TEST_CASE("nef matched prior: gaussian-like psi with a cauchy dip") {
  models::NefNoise nef;
  nef.log_partition = [](double x) { return 0.5 * x * x - 1.0 / (1.0 + x * x); };
  nef.psi_gap_bound = 1.0;  // sup (x^2/2 - psi) = sup 1/(1+x^2)
  const auto g = models::nef_matched_prior(nef, 0.5);
  CHECK(std::abs(grid_mass(g) - 1.0) <= 1e-9);
  for (double v : g.pdf) CHECK(v >= 0.0);
  // density is even in x
  const std::size_t n = g.x.size();
  for (std::size_t i = 0; i < n / 4; ++i) {
    CHECK(std::abs(g.pdf[i] - g.pdf[n - 1 - i]) <= 1e-12);
  }
}

TEST_CASE("nef matched prior rejects non-integrable densities") {
  models::NefNoise nef;
  nef.log_partition = [](double x) { return x * x; };  // psi = x^2
  nef.psi_gap_bound = 0.0;                             // sup (x^2/2 - x^2) = 0
  // exponent -x^2/(2a) + x^2 grows for a > 1/2
  CHECK_THROWS_AS(models::nef_matched_prior(nef, 0.9), model_error);
}

TEST_CASE("prior density and window") {
  const Prior g = models::make_gaussian(1.0, 4.0);
  CHECK(std::abs(models::prior_density(g, 1.0) - gaussian_pdf(1.0, 1.0, 4.0)) <= 1e-16);
  const auto w = models::prior_window(g, 8.0);
  CHECK(w.lo == doctest::Approx(1.0 - 16.0));
  CHECK(w.hi == doctest::Approx(17.0));

  CHECK_THROWS_AS(models::prior_density(Prior(models::PointMassPrior{0.0}), 0.0),
                  std::invalid_argument);

  const Prior gam = Prior(models::GammaPrior{1.0, 1.0});
  const auto wg = models::prior_window(gam, 8.5);
  CHECK(wg.lo == 0.0);
  CHECK(wg.hi == doctest::Approx(9.5));
}
