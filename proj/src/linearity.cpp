#include "lplab/linearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lplab/errors.hpp"
#include "lplab/quadrature.hpp"
#include "lplab/specfun.hpp"

namespace lplab::linearity {

namespace {

using cx = std::complex<double>;
using models::GridDensityPrior;
using models::PointMassPrior;
using models::Prior;
using models::TwoPointPrior;

double sign0(double s) { return (s > 0.0) - (s < 0.0); }  // sign(0) = 0

// integral of f against the prior measure, with forced panel splits
double integrate_against_prior(const Prior& prior, const std::function<double(double)>& f,
                               std::vector<double> splits) {
  if (const auto* pm = std::get_if<PointMassPrior>(&prior)) {
    return f(pm->location);
  }
  if (const auto* tp = std::get_if<TwoPointPrior>(&prior)) {
    return tp->w * f(tp->x1) + (1.0 - tp->w) * f(tp->x2);
  }
  if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
    // piecewise-linear density: low-order rule per cell, cells split at the
    // forced points
    std::sort(splits.begin(), splits.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g->x.size(); ++i) {
      const double x0 = g->x[i], x1 = g->x[i + 1];
      if (g->pdf[i] == 0.0 && g->pdf[i + 1] == 0.0) continue;
      const double slope = (g->pdf[i + 1] - g->pdf[i]) / (x1 - x0);
      const auto cell = [&](double a, double b) {
        return quad::gl(
            [&](double x) { return (g->pdf[i] + slope * (x - x0)) * f(x); }, a, b, 5);
      };
      double a = x0;
      for (double s : splits) {
        if (s > a && s < x1) {
          acc += cell(a, s);
          a = s;
        }
      }
      acc += cell(a, x1);
    }
    return acc;
  }
  // parametric continuous priors: panel quadrature over the mass window
  const auto w = models::prior_window(prior, 8.5);
  const auto mom = models::prior_moments(prior);
  const double width = std::min(0.5, std::max(0.05, 0.5 * std::sqrt(mom.variance)));
  const auto brk = quad::breakpoints(w.lo, w.hi, std::move(splits), width);
  return quad::panels(
      [&](double x) { return models::prior_density(prior, x) * f(x); }, brk);
}

LinearityReport finish_report(double a, double p, std::vector<double> y,
                              std::vector<double> r, double tolerance) {
  LinearityReport rep;
  rep.a = a;
  rep.p = p;
  rep.sup_norm = 0.0;
  for (double v : r) rep.sup_norm = std::max(rep.sup_norm, std::abs(v));
  rep.tolerance = tolerance;
  rep.linear = rep.sup_norm <= tolerance;
  rep.y = std::move(y);
  rep.residual = std::move(r);
  return rep;
}

double lp_weight(double s, double p) {
  if (p == 1.0) return sign0(s);
  return sign0(s) * std::pow(std::abs(s), p - 1.0);
}

double median_residual_at(const Prior& prior, double a, double y) {
  return integrate_against_prior(
      prior,
      [&](double x) { return sign0(x - a * y) * specfun::std_normal_pdf(y - x); },
      {a * y});
}

}  // namespace

LinearityReport median_linearity_residual(const Prior& prior, double a,
                                          const std::vector<double>& y_grid,
                                          double tolerance) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("median_linearity_residual: a must lie in [0,1)");
  }
  std::vector<double> r(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    r[i] = median_residual_at(prior, a, y_grid[i]);
  }
  return finish_report(a, 1.0, y_grid, std::move(r), tolerance);
}

LinearityReport lp_linearity_residual(const Prior& prior, double a, double p,
                                      const std::vector<double>& y_grid,
                                      double tolerance) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("lp_linearity_residual: a must lie in [0,1)");
  }
  if (!(p >= 1.0)) {
    throw std::invalid_argument("lp_linearity_residual: p must be >= 1");
  }
  std::vector<double> r(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    const double y = y_grid[i];
    r[i] = integrate_against_prior(
        prior,
        [&](double x) { return lp_weight(x - a * y, p) * specfun::std_normal_pdf(y - x); },
        {a * y});
  }
  return finish_report(a, p, y_grid, std::move(r), tolerance);
}

LinearityReport convolution_residual(const Prior& prior, double a,
                                     const std::vector<double>& y_grid,
                                     double tolerance) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("convolution_residual: a must lie in (0,1)");
  }
  const double sqa = std::sqrt(a);

  std::vector<double> r(y_grid.size());
  for (std::size_t iy = 0; iy < y_grid.size(); ++iy) {
    const double y = y_grid[iy];
    double s;
    if (models::is_atomic(prior)) {
      // mu keeps the atom weights, relocated to x/sqrt(a) and reweighted
      std::vector<std::pair<double, double>> atoms;
      if (const auto* pm = std::get_if<PointMassPrior>(&prior)) {
        atoms = {{pm->location / sqa, 1.0}};
      } else {
        const auto& tp = std::get<TwoPointPrior>(prior);
        atoms = {{tp.x1 / sqa, tp.w}, {tp.x2 / sqa, 1.0 - tp.w}};
      }
      s = 0.0;
      for (auto [v, wgt] : atoms) {
        s += wgt * std::exp((1.0 - a) * v * v / 2.0) * sign0(v - y) *
             specfun::std_normal_pdf(y - v);
      }
    } else if (const auto* g = std::get_if<GridDensityPrior>(&prior)) {
      // change variables back to x = sqrt(a) v so the piecewise-linear kinks
      // land on cell boundaries: S(y) = integral sign(x/sqrt(a) - y)
      //   phi(y - x/sqrt(a)) exp((1-a) x^2/(2a)) f(x) dx
      s = integrate_against_prior(
          prior,
          [&](double x) {
            const double v = x / sqa;
            return sign0(v - y) * specfun::std_normal_pdf(y - v) *
                   std::exp((1.0 - a) * x * x / (2.0 * a));
          },
          {sqa * y});
    } else {
      const auto mu = [&](double v) {
        return sqa * models::prior_density(prior, sqa * v) *
               std::exp((1.0 - a) * v * v / 2.0);
      };
      const auto integrand = [&](double v) { return mu(v) * specfun::std_normal_pdf(y - v); };
      // adapt the window until the envelope has decayed at both ends
      double half = 8.7;
      double peak = 0.0, e_lo = 0.0, e_hi = 0.0;
      for (; half <= 44.0; half *= 1.5) {
        peak = 0.0;
        for (int i = 0; i <= 64; ++i) {
          peak = std::max(peak, std::abs(integrand(y - half + 2.0 * half * i / 64.0)));
        }
        e_lo = std::abs(integrand(y - half));
        e_hi = std::abs(integrand(y + half));
        if (peak == 0.0 || (e_lo <= 1e-12 * peak && e_hi <= 1e-12 * peak)) break;
      }
      if (peak > 0.0 && (e_lo > 1e-12 * peak || e_hi > 1e-12 * peak)) {
        throw std::domain_error(
            "convolution_residual: rescaled integrand does not decay on the window");
      }
      const auto brk = quad::breakpoints(y - half, y + half, {y}, 0.25);
      s = quad::panels([&](double v) { return sign0(v - y) * integrand(v); }, brk);
    }

    // cross-check against the direct median condition at y/sqrt(a)
    const double factor = std::exp(y * y * (1.0 - a) / (2.0 * a));
    const double direct = median_residual_at(prior, a, y / sqa);
    if (std::abs(s - factor * direct) > 1e-8 * std::max(1.0, factor)) {
      throw numerical_error(
          "convolution_residual: disagrees with the direct median condition");
    }
    r[iy] = s;
  }
  return finish_report(a, 1.0, y_grid, std::move(r), tolerance);
}

std::complex<double> apply_ta(const std::function<cx(double)>& f, double lo, double hi,
                              double a, double y, double max_panel) {
  if (!(hi > lo)) throw std::invalid_argument("apply_ta: need hi > lo");
  const auto brk = quad::breakpoints(lo, hi, {a * y}, max_panel);
  return quad::panels(
      [&](double x) {
        return sign0(x - a * y) * specfun::std_normal_pdf(y - x) * f(x);
      },
      brk);
}

std::complex<double> gabor_wavelet(const GaborParams& params, double x) {
  const double u = x - params.mu;
  return std::exp(cx(-u * u / (2.0 * params.sigma2), params.omega * x));
}

std::complex<double> gabor_closed_form(const GaborParams& params, double a, double y) {
  const double s2 = params.sigma2;
  if (!(s2 > -1.0) || s2 == 0.0) {
    throw std::invalid_argument("gabor_closed_form: sigma^2 must lie in (-1, inf) \\ {0}");
  }
  const cx b(params.b(), 0.0);
  const cx d = cx(y + params.mu / s2, params.omega);
  const cx pref = 2.0 * specfun::std_normal_pdf(y) *
                  std::exp(cx(-params.mu * params.mu / (2.0 * s2), 0.0)) *
                  std::sqrt(M_PI / (2.0 * b)) * std::exp(d * d / (2.0 * b));
  const cx arg = (cx((1.0 - params.b() * a) * y + params.mu / s2, params.omega)) /
                 std::sqrt(2.0 * b);
  return pref * specfun::erf_complex(arg);
}

GaborParams gabor_null_member(double a, std::complex<double> erf_zero) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("gabor_null_member: a must lie in (0,1)");
  }
  GaborParams p;
  p.sigma2 = a / (1.0 - a);
  p.mu = specfun::kSqrt2 * erf_zero.real() * std::sqrt(a) / (1.0 - a);
  p.omega = specfun::kSqrt2 * erf_zero.imag() / std::sqrt(a);
  return p;
}

double fp(double w, double p) {
  if (!(p > 0.0) || !std::isfinite(p) || !std::isfinite(w)) {
    throw std::invalid_argument("fp: need finite w and p > 0");
  }
  if (w == 0.0) return 0.0;
  const double sgn = (w > 0.0) ? 1.0 : -1.0;
  const double aw = std::abs(w);

  // head: integral_0^delta x^{p-1} e^{-x^2} sin(w x) dx as a double series;
  // absorbs the x^{p-1} singularity for p < 1
  const double delta = 0.25;
  const double d2 = delta * delta;
  double head = 0.0;
  double sj = aw * delta;  // (w delta)^{2j+1} / (2j+1)!
  for (int j = 0; j <= 60; ++j) {
    double si = 1.0;  // delta^{2i} / i! -> (d2)^i/i!
    double inner = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double term = si / (p + 2.0 * j + 2.0 * i + 1.0);
      inner += (i % 2 == 0) ? term : -term;
      si *= d2 / (i + 1.0);
      if (si < 1e-22) break;
    }
    const double contrib = ((j % 2 == 0) ? 1.0 : -1.0) * sj * inner;
    head += contrib;
    sj *= (aw * delta) * (aw * delta) / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
    if (sj < 1e-22 * std::max(1.0, std::abs(head))) break;
  }
  head *= std::pow(delta, p);

  // tail: oscillation-aware panels
  const double width = std::min(0.5, M_PI / std::max(1.0, aw));
  const auto brk = quad::breakpoints(delta, 8.5, {}, width);
  const double tail = quad::panels(
      [&](double x) {
        return std::pow(x, p - 1.0) * std::exp(-x * x) * std::sin(aw * x);
      },
      brk);
  return sgn * (head + tail);
}

RootSet fp_roots(double p, double w_max) {
  if (!(p > 0.0)) throw std::invalid_argument("fp_roots: p must be > 0");
  if (!(w_max >= 1.0)) throw std::invalid_argument("fp_roots: w_max must be >= 1");

  constexpr double step = 0.05;
  const int n = static_cast<int>(std::floor(w_max / step));
  std::vector<double> wv(n), fv(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    wv[i] = (i + 1) * step;
    fv[i] = fp(wv[i], p);
    scale = std::max(scale, std::abs(fv[i]));
  }

  // ignore sign flips in quadrature noise: where f_p has decayed to ~1e-12
  // of its peak the computed values are pure roundoff, not roots
  const double floor = 1e-12 * scale;

  RootSet out;
  for (int i = 0; i + 1 < n; ++i) {
    if (std::max(std::abs(fv[i]), std::abs(fv[i + 1])) < floor) continue;
    if (fv[i] == 0.0) {
      out.roots.push_back(wv[i]);
      out.brackets.push_back({wv[i] - step, wv[i] + step});
      out.residuals.push_back(0.0);
      continue;
    }
    if (fv[i] * fv[i + 1] < 0.0) {
      double lo = wv[i], hi = wv[i + 1];
      double flo = fv[i];
      while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fp(mid, p);
        if (fm == 0.0) {
          lo = mid - 1e-15 * std::max(1.0, mid);
          hi = mid + 1e-15 * std::max(1.0, mid);
          break;
        }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      const double root = 0.5 * (lo + hi);
      out.roots.push_back(root);
      out.brackets.push_back({lo, hi});
      out.residuals.push_back(std::abs(fp(root, p)));
    }
  }

  const int expected = (p <= 2.0) ? 0 : static_cast<int>(std::ceil(p / 2.0)) - 1;
  if (static_cast<int>(out.roots.size()) != expected) {
    throw numerical_error("fp_roots: root count disagrees with the (2k, 2k+2] rule; "
                          "w_max may be too small");
  }
  return out;
}

double fp_ode_residual(double p, const std::vector<double>& w_grid) {
  constexpr double h = 1e-3;
  double worst = 0.0;
  for (double w : w_grid) {
    const double f0 = fp(w, p);
    const double fplus = fp(w + h, p);
    const double fminus = fp(w - h, p);
    const double d1 = (fplus - fminus) / (2.0 * h);
    const double d2 = (fplus - 2.0 * f0 + fminus) / (h * h);
    // 2 f'' + (p-1) f + (w f)' = 2 f'' + p f + w f'
    worst = std::max(worst, std::abs(2.0 * d2 + p * f0 + w * d1));
  }
  return worst;
}

double dawson_fourier_check(const std::vector<double>& w_grid) {
  double worst = 0.0;
  for (double w : w_grid) {
    const double aw = std::abs(w);
    double numeric;
    if (aw == 0.0) {
      numeric = 0.0;
    } else {
      const double width = std::min(0.5, M_PI / std::max(1.0, aw));
      const auto brk = quad::breakpoints(0.0, 8.6, {}, width);
      numeric = 2.0 * quad::panels(
                          [&](double x) {
                            return specfun::std_normal_pdf(x) * std::sin(aw * x);
                          },
                          brk);
    }
    const double analytic = 2.0 / specfun::kSqrtPi * specfun::dawson(aw / specfun::kSqrt2);
    worst = std::max(worst, std::abs(numeric - analytic));
  }
  return worst;
}

double fp_pv_integral(double w, double p) {
  if (!(p > 0.0 && p < 2.0)) {
    throw std::invalid_argument("fp_pv_integral: p must lie in (0,2)");
  }
  if (w == 0.0) return 0.0;
  const double sgn = (w > 0.0) ? 1.0 : -1.0;
  const double aw = std::abs(w);

  // head: u^{-p} e^{-(w^2+u^2)/4} 2 sinh(w u / 2) as a double series,
  //   e^{-w^2/4} sum_{j,i} 2 (w/2)^{2j+1}/(2j+1)! (-1/4)^i/i!
  //                        delta^{2j+2i+2-p}/(2j+2i+2-p)
  const double delta = 0.25;
  double head = 0.0;
  double cj = aw / 2.0;  // (w/2)^{2j+1} / (2j+1)!
  for (int j = 0; j <= 60; ++j) {
    double ci = 1.0;  // (1/4)^i / i!
    double inner = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double expo = 2.0 * j + 2.0 * i + 2.0 - p;
      const double term = ci * std::pow(delta, expo) / expo;
      inner += (i % 2 == 0) ? term : -term;
      ci *= 0.25 / (i + 1.0);
      if (ci * std::pow(delta, expo + 2.0) < 1e-24) break;
    }
    head += 2.0 * cj * inner;
    cj *= (aw / 2.0) * (aw / 2.0) / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
    if (cj * std::pow(delta, 2.0 * j + 4.0 - p) <
        1e-24 * std::max(1.0, std::abs(head))) {
      break;
    }
  }
  head *= std::exp(-aw * aw / 4.0);

  // tail
  const auto brk = quad::breakpoints(delta, aw + 13.0, {aw}, 0.4);
  const double tail = quad::panels(
      [&](double u) {
        const double e1 = std::exp(-(aw - u) * (aw - u) / 4.0);
        const double e2 = std::exp(-(aw + u) * (aw + u) / 4.0);
        return std::pow(u, -p) * (e1 - e2);
      },
      brk);
  return sgn * (head + tail);
}

}  // namespace lplab::linearity
