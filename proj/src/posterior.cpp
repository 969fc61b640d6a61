#include "lplab/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lplab/errors.hpp"
#include "lplab/quadrature.hpp"
#include "lplab/specfun.hpp"

namespace lplab::posterior {

namespace {

using models::GammaPrior;
using models::GaussianPrior;
using models::GridDensityPrior;
using models::NefNoise;
using models::PointMassPrior;
using models::Prior;
using models::TwoPointPrior;

PosteriorGrid grid_from_values(std::vector<double> x, std::vector<double> f, double y) {
  GridDensityPrior g = models::make_grid_density(std::move(x), std::move(f));
  PosteriorGrid out;
  out.x = std::move(g.x);
  out.pdf = std::move(g.pdf);
  out.cdf = std::move(g.cdf);
  out.y = y;
  return out;
}

PosteriorAtoms atoms_posterior(std::vector<double> x, std::vector<double> logw, double y) {
  const double m = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    w[i] = std::exp(logw[i] - m);
    z += w[i];
  }
  for (double& v : w) v /= z;
  if (x.size() == 2 && x[0] > x[1]) {
    std::swap(x[0], x[1]);
    std::swap(w[0], w[1]);
  }
  return {std::move(x), std::move(w), y};
}

// log Poisson kernel log(x^y e^-x) with the 0^0 = 1 convention; y! dropped
// (cancels in normalization).
double log_poisson_kernel(double x, double y) {
  if (x < 0.0) return -1e300;
  if (x == 0.0) return (y == 0.0) ? 0.0 : -1e300;
  return y * std::log(x) - x;
}

void check_poisson_obs(double y) {
  if (!(y >= 0.0) || y != std::floor(y)) {
    throw std::invalid_argument("posterior: Poisson noise needs a nonnegative integer y");
  }
}

std::vector<double> uniform_grid(double lo, double hi, int nodes) {
  std::vector<double> x(nodes);
  for (int i = 0; i < nodes; ++i) x[i] = lo + (hi - lo) * i / (nodes - 1);
  return x;
}

PosteriorGrid gaussian_noise_grid(const Prior& prior, double y, int nodes) {
  // fresh grid for parametric priors, the prior's own grid for grid priors
  if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
    std::vector<double> f(g->x.size());
    for (std::size_t i = 0; i < g->x.size(); ++i) {
      f[i] = g->pdf[i] * specfun::std_normal_pdf(y - g->x[i]);
    }
    return grid_from_values(g->x, std::move(f), y);
  }
  if (const auto* gp = std::get_if<GaussianPrior>(&prior)) {
    const double v = gp->variance;
    const double pm = (gp->mean + v * y) / (1.0 + v);
    const double ps = std::sqrt(v / (1.0 + v));
    auto x = uniform_grid(pm - 8.0 * ps, pm + 8.0 * ps, nodes);
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      f[i] = models::prior_density(prior, x[i]) * specfun::std_normal_pdf(y - x[i]);
    }
    return grid_from_values(std::move(x), std::move(f), y);
  }
  if (std::holds_alternative<GammaPrior>(prior)) {
    const auto w = models::prior_window(prior, 8.5);
    const double lo = std::max(0.0, std::min(w.lo, y - 9.0));
    const double hi = std::max(w.hi, y + 9.0);
    auto x = uniform_grid(lo, hi, nodes);
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      f[i] = models::prior_density(prior, x[i]) * specfun::std_normal_pdf(y - x[i]);
    }
    return grid_from_values(std::move(x), std::move(f), y);
  }
  throw model_error("posterior: unsupported prior for Gaussian noise");
}

PosteriorGrid poisson_noise_grid(const Prior& prior, double y, int nodes) {
  if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
    if (g->x.front() < 0.0) {
      throw model_error("posterior: Poisson noise needs a prior supported on [0,inf)");
    }
    std::vector<double> logf(g->x.size());
    for (std::size_t i = 0; i < g->x.size(); ++i) {
      logf[i] = (g->pdf[i] > 0.0) ? std::log(g->pdf[i]) + log_poisson_kernel(g->x[i], y)
                                  : -1e300;
    }
    const double m = *std::max_element(logf.begin(), logf.end());
    std::vector<double> f(logf.size());
    for (std::size_t i = 0; i < logf.size(); ++i) f[i] = std::exp(logf[i] - m);
    return grid_from_values(g->x, std::move(f), y);
  }
  if (const auto* gp = std::get_if<GammaPrior>(&prior)) {
    // conjugate: Gam(alpha + y, beta + 1). The exponential-type tail decays
    // slower than a Gaussian, so the window is the union of mean +/- 8 sd
    // and the 1e-15 quantile band.
    const double k = gp->shape + y;
    const double r = gp->rate + 1.0;
    const double pm = k / r;
    const double ps = std::sqrt(k) / r;
    const double q_lo = specfun::inv_lower_gamma(k, 1e-15) / r;
    const double q_hi = specfun::inv_lower_gamma(k, 1.0 - 1e-15) / r;
    const double lo = std::max(0.0, std::min(pm - 8.0 * ps, q_lo));
    // small shapes put density (and a derivative kink) at x = 0; the
    // trapezoid normalization needs a finer grid to stay within 1e-8 there
    const int use_nodes = (k < 3.5) ? std::max(nodes, 200001) : nodes;
    auto x = uniform_grid(lo, std::max(pm + 8.0 * ps, q_hi), use_nodes);
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      f[i] = (x[i] > 0.0) ? std::exp((k - 1.0) * std::log(x[i]) - r * x[i] -
                                     std::lgamma(k) + k * std::log(r))
                          : ((k == 1.0) ? r : 0.0);
    }
    return grid_from_values(std::move(x), std::move(f), y);
  }
  throw model_error("posterior: unsupported prior/noise pairing for Poisson noise");
}

PosteriorGrid nef_noise_grid(const Prior& prior, const NefNoise& nef, double y, int nodes) {
  if (!nef.log_partition) {
    throw std::invalid_argument("posterior: NEF noise lacks a log-partition");
  }
  const auto& psi = nef.log_partition;
  if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
    std::vector<double> logf(g->x.size());
    for (std::size_t i = 0; i < g->x.size(); ++i) {
      logf[i] = (g->pdf[i] > 0.0)
                    ? std::log(g->pdf[i]) + g->x[i] * y - psi(g->x[i])
                    : -1e300;
    }
    const double m = *std::max_element(logf.begin(), logf.end());
    std::vector<double> f(logf.size());
    for (std::size_t i = 0; i < logf.size(); ++i) f[i] = std::exp(logf[i] - m);
    return grid_from_values(g->x, std::move(f), y);
  }
  if (std::holds_alternative<GaussianPrior>(prior) ||
      std::holds_alternative<GammaPrior>(prior)) {
    const auto w = models::prior_window(prior, 8.5);
    const double lo = std::min(w.lo, y - 9.0);
    const double hi = std::max(w.hi, y + 9.0);
    auto x = uniform_grid(lo, hi, nodes);
    std::vector<double> logf(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = models::prior_density(prior, x[i]);
      logf[i] = (d > 0.0) ? std::log(d) + x[i] * y - psi(x[i]) : -1e300;
    }
    const double m = *std::max_element(logf.begin(), logf.end());
    std::vector<double> f(logf.size());
    for (std::size_t i = 0; i < logf.size(); ++i) f[i] = std::exp(logf[i] - m);
    return grid_from_values(std::move(x), std::move(f), y);
  }
  throw model_error("posterior: unsupported prior for NEF noise");
}

// Derivative (up to the positive factor p) of t -> integral |x - t|^p f(x) dx
// for the piecewise-linear density:
//   d(t) = integral_{x < t} (t - x)^q f dx - integral_{x > t} (x - t)^q f dx,
// q = p - 1. Monotone nondecreasing in t, so its root is the L^p estimator;
// root-finding on d reaches machine precision where value-based minimization
// stalls at sqrt(eps).
double lp_gradient(const PosteriorGrid& g, double t, double q) {
  const double q1 = q + 1.0, q2 = q + 2.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double x0 = g.x[i], x1 = g.x[i + 1];
    const double f0 = g.pdf[i], f1 = g.pdf[i + 1];
    if (f0 == 0.0 && f1 == 0.0) continue;
    const double slope = (f1 - f0) / (x1 - x0);
    const double c0 = f0 + slope * (t - x0);  // f(x) = c0 + slope*(x - t)
    // right part: x in [max(x0,t), x1], u = x - t
    if (x1 > t) {
      const double ulo = std::max(0.0, x0 - t), uhi = x1 - t;
      const double a1 = std::pow(uhi, q1) - std::pow(ulo, q1);
      const double a2 = std::pow(uhi, q2) - std::pow(ulo, q2);
      acc -= c0 * a1 / q1 + slope * a2 / q2;
    }
    // left part: x in [x0, min(x1,t)], v = t - x
    if (x0 < t) {
      const double vlo = std::max(0.0, t - x1), vhi = t - x0;
      const double a1 = std::pow(vhi, q1) - std::pow(vlo, q1);
      const double a2 = std::pow(vhi, q2) - std::pow(vlo, q2);
      acc += c0 * a1 / q1 - slope * a2 / q2;
    }
  }
  return acc;
}

double lp_gradient_atoms(const PosteriorAtoms& at, double t, double q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < at.x.size(); ++i) {
    const double d = t - at.x[i];
    if (d != 0.0) acc += at.w[i] * std::copysign(std::pow(std::abs(d), q), d);
  }
  return acc;
}

// bisection root of a nondecreasing function on [a, b]
template <class F>
double bisect_monotone(F&& f, double a, double b) {
  double fa = f(a);
  if (fa >= 0.0) return a;
  if (f(b) <= 0.0) return b;
  for (int it = 0; it < 120 && b - a > 1e-16 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fm < 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Posterior compute_posterior(const Prior& prior, const models::NoiseModel& noise, double y,
                            int nodes) {
  if (!std::isfinite(y)) throw std::invalid_argument("posterior: non-finite y");
  const bool poisson = std::holds_alternative<models::PoissonNoise>(noise);
  if (poisson) check_poisson_obs(y);

  // atomic priors stay atomic under every channel
  if (const auto* pm = std::get_if<PointMassPrior>(&prior)) {
    if (poisson && pm->location < 0.0) {
      throw model_error("posterior: Poisson noise needs nonnegative support");
    }
    return PosteriorAtoms{{pm->location}, {1.0}, y};
  }
  if (const auto* tp = std::get_if<TwoPointPrior>(&prior)) {
    std::vector<double> xs = {tp->x1, tp->x2};
    std::vector<double> lw(2);
    if (std::holds_alternative<models::GaussianNoise>(noise)) {
      lw[0] = std::log(tp->w) - 0.5 * (y - tp->x1) * (y - tp->x1);
      lw[1] = std::log(1.0 - tp->w) - 0.5 * (y - tp->x2) * (y - tp->x2);
    } else if (poisson) {
      if (std::min(tp->x1, tp->x2) < 0.0) {
        throw model_error("posterior: Poisson noise needs nonnegative support");
      }
      lw[0] = std::log(tp->w) + log_poisson_kernel(tp->x1, y);
      lw[1] = std::log(1.0 - tp->w) + log_poisson_kernel(tp->x2, y);
    } else {
      const auto& nef = std::get<NefNoise>(noise);
      lw[0] = std::log(tp->w) + tp->x1 * y - nef.log_partition(tp->x1);
      lw[1] = std::log(1.0 - tp->w) + tp->x2 * y - nef.log_partition(tp->x2);
    }
    return atoms_posterior(std::move(xs), std::move(lw), y);
  }

  if (std::holds_alternative<models::GaussianNoise>(noise)) {
    return gaussian_noise_grid(prior, y, nodes);
  }
  if (poisson) {
    return poisson_noise_grid(prior, y, nodes);
  }
  return nef_noise_grid(prior, std::get<NefNoise>(noise), y, nodes);
}

double cond_mean(const Posterior& post) {
  if (const auto* at = std::get_if<PosteriorAtoms>(&post)) {
    double m = 0.0;
    for (std::size_t i = 0; i < at->x.size(); ++i) m += at->w[i] * at->x[i];
    return m;
  }
  const auto& g = std::get<PosteriorGrid>(post);
  // exact first moment of the piecewise-linear density
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double h = g.x[i + 1] - g.x[i];
    m += h / 6.0 * (g.pdf[i] * (2.0 * g.x[i] + g.x[i + 1]) +
                    g.pdf[i + 1] * (g.x[i] + 2.0 * g.x[i + 1]));
  }
  return m;
}

double quantile(const Posterior& post, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q outside (0,1)");
  if (const auto* at = std::get_if<PosteriorAtoms>(&post)) {
    double c = 0.0;
    for (std::size_t i = 0; i < at->x.size(); ++i) {
      c += at->w[i];
      if (c >= q - 1e-15) return at->x[i];
    }
    return at->x.back();
  }
  const auto& g = std::get<PosteriorGrid>(post);
  const auto it = std::lower_bound(g.cdf.begin(), g.cdf.end(), q);
  if (it == g.cdf.begin()) return g.x.front();
  if (it == g.cdf.end()) return g.x.back();
  const std::size_t i = it - g.cdf.begin();
  const double dc = g.cdf[i] - g.cdf[i - 1];
  if (dc <= 0.0) return g.x[i];
  return g.x[i - 1] + (q - g.cdf[i - 1]) / dc * (g.x[i] - g.x[i - 1]);
}

double cond_median(const Posterior& post) { return quantile(post, 0.5); }

double cond_lp_estimator(const Posterior& post, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("cond_lp_estimator: p must be >= 1");
  const double q = p - 1.0;
  if (const auto* at = std::get_if<PosteriorAtoms>(&post)) {
    if (at->x.size() == 1) return at->x.front();
    if (p == 1.0) return cond_median(post);  // gradient is a step function
    return bisect_monotone([&](double t) { return lp_gradient_atoms(*at, t, q); },
                           at->x.front(), at->x.back());
  }
  const auto& g = std::get<PosteriorGrid>(post);
  return bisect_monotone([&](double t) { return lp_gradient(g, t, q); }, g.x.front(),
                         g.x.back());
}

double marginal_density_gaussian(const Prior& prior, double y) {
  return std::visit(
      [y](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          const double s = std::sqrt(1.0 + p.variance);
          return specfun::std_normal_pdf((y - p.mean) / s) / s;
        } else if constexpr (std::is_same_v<T, PointMassPrior>) {
          return specfun::std_normal_pdf(y - p.location);
        } else if constexpr (std::is_same_v<T, TwoPointPrior>) {
          return p.w * specfun::std_normal_pdf(y - p.x1) +
                 (1.0 - p.w) * specfun::std_normal_pdf(y - p.x2);
        } else if constexpr (std::is_same_v<T, GridDensityPrior>) {
          double acc = 0.0;
          for (std::size_t i = 0; i + 1 < p.x.size(); ++i) {
            const double h = p.x[i + 1] - p.x[i];
            acc += 0.5 * h *
                   (p.pdf[i] * specfun::std_normal_pdf(y - p.x[i]) +
                    p.pdf[i + 1] * specfun::std_normal_pdf(y - p.x[i + 1]));
          }
          return acc;
        } else {
          // Gamma prior: quadrature over the overlap of prior and kernel
          const auto w = models::prior_window(Prior(p), 8.5);
          const double lo = std::max(w.lo, y - 9.0);
          const double hi = std::min(std::max(w.hi, y + 9.0), w.hi);
          if (!(hi > lo)) return 0.0;
          const auto brk = quad::breakpoints(lo, hi, {}, 0.5);
          return quad::panels(
              [&](double x) {
                return models::prior_density(Prior(p), x) * specfun::std_normal_pdf(y - x);
              },
              brk);
        }
      },
      prior);
}

double third_cumulant_logfd(const Prior& prior, double y) {
  // kappa_3 = (log f_Y)'''(y): 5-point stencil with Richardson extrapolation
  const auto logf = [&](double t) { return std::log(marginal_density_gaussian(prior, t)); };
  const auto d3 = [&](double h) {
    return (logf(y + 2.0 * h) - 2.0 * logf(y + h) + 2.0 * logf(y - h) -
            logf(y - 2.0 * h)) /
           (2.0 * h * h * h);
  };
  const double h = 1e-2;
  return (4.0 * d3(0.5 * h) - d3(h)) / 3.0;
}

double posterior_third_cumulant(const Prior& prior, double y) {
  // route (i): third central moment of the posterior
  const Posterior post = compute_posterior(prior, models::GaussianNoise{}, y);
  const double m = cond_mean(post);
  double k3 = 0.0;
  if (const auto* at = std::get_if<PosteriorAtoms>(&post)) {
    for (std::size_t i = 0; i < at->x.size(); ++i) {
      const double u = at->x[i] - m;
      k3 += at->w[i] * u * u * u;
    }
  } else {
    const auto& g = std::get<PosteriorGrid>(post);
    for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
      const double h = g.x[i + 1] - g.x[i];
      const double u0 = g.x[i] - m, u1 = g.x[i + 1] - m;
      k3 += 0.5 * h * (u0 * u0 * u0 * g.pdf[i] + u1 * u1 * u1 * g.pdf[i + 1]);
    }
  }

  // route (ii) must agree before (i) is trusted
  const double k3_fd = third_cumulant_logfd(prior, y);
  if (std::abs(k3 - k3_fd) > 1e-4) {
    throw numerical_error("posterior_third_cumulant: moment and log-derivative routes disagree");
  }
  return k3;
}

EstimatorCurve estimator_curve(const Prior& prior, const models::NoiseModel& noise,
                               const std::vector<double>& y_grid, EstimatorKind kind,
                               double p, int nodes) {
  EstimatorCurve out;
  out.y = y_grid;
  out.value.resize(y_grid.size());
  out.kind = kind;
  out.p = (kind == EstimatorKind::mean) ? 2.0 : (kind == EstimatorKind::median ? 1.0 : p);
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    const Posterior post = compute_posterior(prior, noise, y_grid[i], nodes);
    switch (kind) {
      case EstimatorKind::mean: out.value[i] = cond_mean(post); break;
      case EstimatorKind::median: out.value[i] = cond_median(post); break;
      case EstimatorKind::lp: out.value[i] = cond_lp_estimator(post, p); break;
    }
  }
  return out;
}

}  // namespace lplab::posterior
