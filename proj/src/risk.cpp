#include "lplab/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lplab/errors.hpp"
#include "lplab/quadrature.hpp"
#include "lplab/rng.hpp"
#include "lplab/specfun.hpp"

namespace lplab::risk {

namespace {

using models::GammaPrior;
using models::GaussianPrior;
using models::GridDensityPrior;
using models::PointMassPrior;
using models::Prior;
using models::TwoPointPrior;

// integral of |z - c|^p phi(z) dz. For non-integer p the integrand has
// unbounded curvature at the kink, so panels are graded geometrically
// toward z = c.
double gauss_abs_moment_shifted(double p, double c) {
  std::vector<double> splits = {c};
  for (int k = 1; k <= 8; ++k) {
    const double d = 0.5 * std::pow(0.25, k);
    splits.push_back(c - d);
    splits.push_back(c + d);
  }
  const auto brk = quad::breakpoints(-8.6, 8.6, std::move(splits), 0.5);
  return quad::panels(
      [&](double z) {
        return std::pow(std::abs(z - c), p) * specfun::std_normal_pdf(z);
      },
      brk);
}

// E_Z |(1-a) x - a Z|^p for one outer point x
double inner_risk(double x, double a, double p) {
  const double c = (1.0 - a) * x;
  if (a == 0.0) return std::pow(std::abs(c), p);
  const double ap = std::pow(std::abs(a), p);
  return ap * gauss_abs_moment_shifted(p, c / a);  // |c - a z| = |a| |z - c/a|
}

double quadrature_risk(const Prior& prior, double a, double p) {
  if (const auto* pm = std::get_if<PointMassPrior>(&prior)) {
    return inner_risk(pm->location, a, p);
  }
  if (const auto* tp = std::get_if<TwoPointPrior>(&prior)) {
    return tp->w * inner_risk(tp->x1, a, p) + (1.0 - tp->w) * inner_risk(tp->x2, a, p);
  }
  if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g->x.size(); ++i) {
      if (g->pdf[i] == 0.0 && g->pdf[i + 1] == 0.0) continue;
      const double x0 = g->x[i], x1 = g->x[i + 1];
      const double slope = (g->pdf[i + 1] - g->pdf[i]) / (x1 - x0);
      acc += quad::gl(
          [&](double x) {
            return (g->pdf[i] + slope * (x - x0)) * inner_risk(x, a, p);
          },
          x0, x1, 5);
    }
    return acc;
  }
  const auto w = models::prior_window(prior, 8.5);
  const auto mom = models::prior_moments(prior);
  const double width = std::min(0.5, std::max(0.05, 0.5 * std::sqrt(mom.variance)));
  const auto brk = quad::breakpoints(w.lo, w.hi, {}, width);
  return quad::panels(
      [&](double x) { return models::prior_density(prior, x) * inner_risk(x, a, p); },
      brk);
}

// deterministic inverse-cdf sample of the prior from one uniform
double sample_prior(const Prior& prior, const rng::CounterRng& gen, std::uint64_t i) {
  return std::visit(
      [&](const auto& pr) -> double {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          return pr.mean + std::sqrt(pr.variance) * gen.normal(i, 0);
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          return specfun::inv_lower_gamma(pr.shape, gen.uniform(i, 0)) / pr.rate;
        } else if constexpr (std::is_same_v<T, PointMassPrior>) {
          return pr.location;
        } else if constexpr (std::is_same_v<T, TwoPointPrior>) {
          return gen.uniform(i, 0) < pr.w ? pr.x1 : pr.x2;
        } else {
          return pr.quantile(gen.uniform(i, 0));
        }
      },
      prior);
}

RiskPoint monte_carlo_risk(const Prior& prior, double a, double p, const MonteCarlo& mc,
                           int jobs) {
  const rng::CounterRng gen{mc.seed};
  const std::uint64_t n = mc.samples;
  if (n == 0) throw std::invalid_argument("bayes_risk: need at least one sample");

  // fixed block partition keeps the reduction order independent of jobs
  constexpr std::uint64_t kBlocks = 256;
  std::vector<double> bsum(kBlocks, 0.0), bsq(kBlocks, 0.0);
  const auto run_block = [&](std::uint64_t b) {
    const std::uint64_t lo = n * b / kBlocks, hi = n * (b + 1) / kBlocks;
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const double x = sample_prior(prior, gen, i);
      const double z = gen.normal(i, 2);
      const double v = std::pow(std::abs(x - a * (x + z)), p);
      s += v;
      s2 += v * v;
    }
    bsum[b] = s;
    bsq[b] = s2;
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(kBlocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < kBlocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next.fetch_add(1); b < kBlocks; b = next.fetch_add(1)) {
          run_block(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, sq = 0.0;
  for (std::uint64_t b = 0; b < kBlocks; ++b) {
    sum += bsum[b];
    sq += bsq[b];
  }
  if (!std::isfinite(sum) || !std::isfinite(sq)) {
    throw numerical_error("bayes_risk: Monte Carlo accumulation went non-finite");
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sq / n - mean * mean);
  const double se = std::sqrt(var / std::max<std::uint64_t>(1, n - 1));
  return {mean, se};
}

}  // namespace

RiskPoint bayes_risk(const Prior& prior, double a, double p, const Method& method,
                     int jobs) {
  if (!(p >= 1.0)) throw std::invalid_argument("bayes_risk: p must be >= 1");
  if (!std::isfinite(a)) throw std::invalid_argument("bayes_risk: non-finite a");
  if (std::holds_alternative<Quadrature>(method)) {
    const double v = quadrature_risk(prior, a, p);
    if (!std::isfinite(v)) throw numerical_error("bayes_risk: quadrature went non-finite");
    return {v, std::nullopt};
  }
  return monte_carlo_risk(prior, a, p, std::get<MonteCarlo>(method), jobs);
}

RiskCurve risk_scan(const Prior& prior, double p, const std::vector<double>& a_grid,
                    const Method& method, int jobs) {
  if (!std::is_sorted(a_grid.begin(), a_grid.end())) {
    throw std::invalid_argument("risk_scan: a_grid must be sorted");
  }
  RiskCurve c;
  c.a = a_grid;
  c.p = p;
  c.method = method;
  c.value.resize(a_grid.size());
  const bool mc = std::holds_alternative<MonteCarlo>(method);
  if (mc) c.stderr_est.resize(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    const RiskPoint pt = bayes_risk(prior, a_grid[i], p, method, jobs);
    c.value[i] = pt.value;
    if (mc) c.stderr_est[i] = *pt.stderr_est;
  }
  return c;
}

std::size_t argmin(const RiskCurve& curve) {
  return std::min_element(curve.value.begin(), curve.value.end()) - curve.value.begin();
}

bool admissible_shape(const RiskCurve& curve, double slack) {
  for (std::size_t i = 0; i + 1 < curve.a.size(); ++i) {
    const double tol =
        slack + (curve.stderr_est.empty()
                     ? 0.0
                     : 3.0 * (curve.stderr_est[i] + curve.stderr_est[i + 1]));
    if (curve.a[i] >= 1.0 && curve.value[i + 1] < curve.value[i] - tol) return false;
    if (curve.a[i + 1] <= 0.0 && curve.value[i + 1] > curve.value[i] + tol) return false;
  }
  return true;
}

double abs_normal_moment(double p) {
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0))) /
         specfun::kSqrtPi;
}

double risk_derivative_at_one(const models::Prior& prior, double p) {
  constexpr double h = 1e-4;
  const double f1 = quadrature_risk(prior, 1.0, p);
  const double f1h = quadrature_risk(prior, 1.0 + h, p);
  return (f1h - f1) / h;
}

}  // namespace lplab::risk
