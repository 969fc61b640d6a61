#include "lplab/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lplab/errors.hpp"
#include "lplab/specfun.hpp"

namespace lplab::models {

namespace {

void require_finite(double v, const char* who) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(who) + ": non-finite parameter");
  }
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
  }
  return s;
}

// Uniform grid for a density given by its log, adapting the half-width until
// the log has dropped decades below its maximum on both sides. Returns false
// if no decaying window is found within width_cap.
bool adapt_window(const std::function<double(double)>& logf, double center,
                  double half0, double width_cap, double& lo, double& hi) {
  const int probes = 257;
  double half = half0;
  while (half <= width_cap) {
    double fmax = -1e300, fl = 0.0, fr = 0.0;
    for (int i = 0; i < probes; ++i) {
      const double x = center - half + 2.0 * half * i / (probes - 1);
      const double v = logf(x);
      fmax = std::max(fmax, v);
      if (i == 0) fl = v;
      if (i == probes - 1) fr = v;
    }
    if (fl < fmax - 42.0 && fr < fmax - 42.0) {
      lo = center - half;
      hi = center + half;
      return true;
    }
    half *= 2.0;
  }
  return false;
}

GridDensityPrior grid_from_log_density(const std::function<double(double)>& logf,
                                       double lo, double hi, int nodes) {
  std::vector<double> x(nodes), f(nodes);
  double lmax = -1e300;
  for (int i = 0; i < nodes; ++i) {
    x[i] = lo + (hi - lo) * i / (nodes - 1);
    f[i] = logf(x[i]);
    lmax = std::max(lmax, f[i]);
  }
  for (double& v : f) v = std::exp(v - lmax);
  return make_grid_density(std::move(x), std::move(f));
}

}  // namespace

double GridDensityPrior::density_at(double xq) const {
  if (xq < x.front() || xq > x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = std::min<std::size_t>(x.size() - 1, it - x.begin());
  if (i == 0) return pdf.front();
  const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return pdf[i - 1] + t * (pdf[i] - pdf[i - 1]);
}

double GridDensityPrior::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q outside (0,1)");
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
  if (it == cdf.begin()) return x.front();
  if (it == cdf.end()) return x.back();
  const std::size_t i = it - cdf.begin();
  const double dc = cdf[i] - cdf[i - 1];
  if (dc <= 0.0) return x[i];
  return x[i - 1] + (q - cdf[i - 1]) / dc * (x[i] - x[i - 1]);
}

GridDensityPrior make_grid_density(std::vector<double> x, std::vector<double> density) {
  if (x.size() < 2 || x.size() != density.size()) {
    throw std::invalid_argument("make_grid_density: need matching grids with >= 2 nodes");
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) {
      throw std::invalid_argument("make_grid_density: grid must increase strictly");
    }
  }
  for (double& v : density) {
    require_finite(v, "make_grid_density");
    if (v < 0.0) v = 0.0;  // clamp roundoff negatives; positivity is essential
  }
  const double z = trapezoid(x, density);
  if (!(z > 0.0)) throw std::invalid_argument("make_grid_density: zero total mass");
  for (double& v : density) v /= z;

  GridDensityPrior g;
  g.cdf.resize(x.size());
  g.cdf[0] = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    g.cdf[i] = g.cdf[i - 1] + 0.5 * (x[i] - x[i - 1]) * (density[i] + density[i - 1]);
  }
  g.x = std::move(x);
  g.pdf = std::move(density);
  return g;
}

Prior make_gaussian(double mean, double variance) {
  require_finite(mean, "make_gaussian");
  require_finite(variance, "make_gaussian");
  if (variance < 0.0) throw std::invalid_argument("make_gaussian: variance < 0");
  if (variance == 0.0) return PointMassPrior{mean};
  return GaussianPrior{mean, variance};
}

Prior matched_gaussian_prior(double a) {
  require_finite(a, "matched_gaussian_prior");
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("matched_gaussian_prior: admissible slopes lie in [0,1)");
  }
  return make_gaussian(0.0, a / (1.0 - a));
}

GridDensityPrior counterexample_prior(const CounterexampleParams& params, int nodes) {
  require_finite(params.a, "counterexample_prior");
  require_finite(params.rho, "counterexample_prior");
  require_finite(params.theta, "counterexample_prior");
  require_finite(params.omega, "counterexample_prior");
  if (!(params.a > 0.0 && params.a < 1.0)) {
    throw std::invalid_argument("counterexample_prior: a must lie in (0,1)");
  }
  if (std::abs(params.rho) > 1.0) {
    throw std::invalid_argument("counterexample_prior: |rho| must be <= 1");
  }
  if (nodes < 2) throw std::invalid_argument("counterexample_prior: nodes < 2");

  const double sigma = std::sqrt(params.a / (1.0 - params.a));
  const double half = kEnvelopeSigmas * sigma;
  const double decay = (1.0 - params.a) / (2.0 * params.a);
  const double freq = params.omega / std::sqrt(params.a);
  std::vector<double> x(nodes), f(nodes);
  for (int i = 0; i < nodes; ++i) {
    x[i] = -half + 2.0 * half * i / (nodes - 1);
    f[i] = std::exp(-decay * x[i] * x[i]) *
           (1.0 + params.rho * std::cos(freq * x[i] + params.theta));
  }
  return make_grid_density(std::move(x), std::move(f));
}

GridDensityPrior nef_matched_prior(const NefNoise& noise, double a, int nodes) {
  require_finite(a, "nef_matched_prior");
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("nef_matched_prior: a must lie in (0,1)");
  }
  if (!noise.log_partition) {
    throw std::invalid_argument("nef_matched_prior: noise lacks a log-partition");
  }
  if (!std::isfinite(noise.psi_gap_bound)) {
    throw model_error("nef_matched_prior: sup(x^2/2 - psi) must be declared finite");
  }
  const auto& psi = noise.log_partition;
  const auto logf = [&](double x) { return -x * x / (2.0 * a) + psi(x); };

  // With psi within psi_gap_bound of x^2/2 the density has a Gaussian
  // envelope of variance a/(1-a); adapt from there.
  const double sigma = std::sqrt(a / (1.0 - a));
  double lo = 0.0, hi = 0.0;
  if (!adapt_window(logf, 0.0, kEnvelopeSigmas * sigma, 64.0 * std::max(1.0, sigma), lo,
                    hi)) {
    throw model_error("nef_matched_prior: density does not decay on any probe window");
  }

  // tail-mass certificate: mass in the one-window extension on each side
  const auto tail_mass = [&](double from, double to, double ref) {
    const int m = 513;
    std::vector<double> xs(m), fs(m);
    for (int i = 0; i < m; ++i) {
      xs[i] = from + (to - from) * i / (m - 1);
      fs[i] = std::exp(logf(xs[i]) - ref);
    }
    return trapezoid(xs, fs);
  };
  double lref = -1e300;
  for (int i = 0; i < 257; ++i) {
    lref = std::max(lref, logf(lo + (hi - lo) * i / 256.0));
  }
  const double core = tail_mass(lo, hi, lref);
  const double width = hi - lo;
  const double tails =
      tail_mass(hi, hi + width, lref) + tail_mass(lo - width, lo, lref);
  if (!(core > 0.0) || tails > 1e-6 * core) {
    throw model_error("nef_matched_prior: tail mass beyond the grid exceeds 1e-6");
  }
  return grid_from_log_density(logf, lo, hi, nodes);
}

Moments prior_moments(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> Moments {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          return {p.mean, p.variance};
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          return {p.shape / p.rate, p.shape / (p.rate * p.rate)};
        } else if constexpr (std::is_same_v<T, PointMassPrior>) {
          return {p.location, 0.0};
        } else if constexpr (std::is_same_v<T, TwoPointPrior>) {
          const double m = p.w * p.x1 + (1.0 - p.w) * p.x2;
          const double v = p.w * (p.x1 - m) * (p.x1 - m) + (1.0 - p.w) * (p.x2 - m) * (p.x2 - m);
          return {m, v};
        } else {
          double m = 0.0;
          for (std::size_t i = 0; i + 1 < p.x.size(); ++i) {
            const double h = p.x[i + 1] - p.x[i];
            m += 0.5 * h * (p.x[i] * p.pdf[i] + p.x[i + 1] * p.pdf[i + 1]);
          }
          double v = 0.0;
          for (std::size_t i = 0; i + 1 < p.x.size(); ++i) {
            const double h = p.x[i + 1] - p.x[i];
            const double u0 = p.x[i] - m, u1 = p.x[i + 1] - m;
            v += 0.5 * h * (u0 * u0 * p.pdf[i] + u1 * u1 * p.pdf[i + 1]);
          }
          return {m, v};
        }
      },
      prior);
}

bool is_atomic(const Prior& prior) {
  return std::holds_alternative<PointMassPrior>(prior) ||
         std::holds_alternative<TwoPointPrior>(prior);
}

double prior_density(const Prior& prior, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          const double s = std::sqrt(p.variance);
          return specfun::std_normal_pdf((x - p.mean) / s) / s;
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          if (x <= 0.0) return 0.0;
          return std::exp(p.shape * std::log(p.rate) + (p.shape - 1.0) * std::log(x) -
                          p.rate * x - std::lgamma(p.shape));
        } else if constexpr (std::is_same_v<T, GridDensityPrior>) {
          return p.density_at(x);
        } else {
          throw std::invalid_argument("prior_density: atomic prior has no density");
        }
      },
      prior);
}

Window prior_window(const Prior& prior, double sigmas) {
  return std::visit(
      [sigmas](const auto& p) -> Window {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          const double s = std::sqrt(p.variance);
          return {p.mean - sigmas * s, p.mean + sigmas * s};
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          const double m = p.shape / p.rate;
          const double s = std::sqrt(p.shape) / p.rate;
          return {std::max(0.0, m - sigmas * s), m + sigmas * s};
        } else if constexpr (std::is_same_v<T, PointMassPrior>) {
          return {p.location, p.location};
        } else if constexpr (std::is_same_v<T, TwoPointPrior>) {
          return {std::min(p.x1, p.x2), std::max(p.x1, p.x2)};
        } else {
          return {p.x.front(), p.x.back()};
        }
      },
      prior);
}

}  // namespace lplab::models
