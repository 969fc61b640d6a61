#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lplab/models.hpp"
#include "lplab/rootset.hpp"

namespace lplab::linearity {

// Residuals of a linearity condition over a y grid, plus summary norms.
struct LinearityReport {
  double a = 0.0;
  double p = 1.0;  // loss exponent behind the condition (1 for the median)
  std::vector<double> y;
  std::vector<double> residual;
  double sup_norm = 0.0;
  double tolerance = 0.0;
  bool linear = false;  // sup_norm <= tolerance
};

// residual(y) = integral sign(x - a y) phi(y - x) dP_X(x); identically zero
// exactly when the conditional median under Gaussian noise is a*y.
// Atomic priors are summed exactly; continuous priors use panel quadrature
// split at the sign change x = a y. sign(0) := 0 throughout.
LinearityReport median_linearity_residual(const models::Prior& prior, double a,
                                          const std::vector<double>& y_grid,
                                          double tolerance = 1e-6);

// Same condition restated against the rescaled measure
// mu(dx) = exp((1-a) x^2/2) P_X(sqrt(a) dx):
// residual(y) = integral sign(x - y) phi(y - x) mu(dx).
// Each value is checked on the fly against the median residual at y/sqrt(a)
// through the exact positive factor exp(y^2 (1-a)/(2a)) (numerical_error on
// disagreement beyond 1e-8 of that scale). Throws domain_error when the
// rescaled integrand fails to decay on any reasonable window.
LinearityReport convolution_residual(const models::Prior& prior, double a,
                                     const std::vector<double>& y_grid,
                                     double tolerance = 1e-6);

// residual(y) = integral sign(x - a y) |x - a y|^{p-1} phi(y - x) dP_X(x),
// the stationarity condition of the L^p Bayes estimator at a*y; p = 1
// reduces to median_linearity_residual.
LinearityReport lp_linearity_residual(const models::Prior& prior, double a, double p,
                                      const std::vector<double>& y_grid,
                                      double tolerance = 1e-6);

// T_a[f](y) = integral sign(x - a y) phi(y - x) f(x) dx over [lo, hi],
// with the sign discontinuity used as a panel boundary.
std::complex<double> apply_ta(const std::function<std::complex<double>(double)>& f,
                              double lo, double hi, double a, double y,
                              double max_panel = 0.25);

// Gaussian-windowed complex exponential exp(-(x-mu)^2/(2 sigma^2)) e^{i omega x}.
struct GaborParams {
  double mu = 0.0;
  double sigma2 = 1.0;  // in (-1, inf) \ {0}
  double omega = 0.0;

  double b() const { return 1.0 + 1.0 / sigma2; }
};

std::complex<double> gabor_wavelet(const GaborParams& params, double x);

// Closed form of T_a applied to the Gabor wavelet:
//   2 phi(y) exp(-mu^2/(2 sigma^2)) sqrt(pi/(2b))
//     * exp((y + mu/sigma^2 + i omega)^2 / (2b))
//     * erf(((1 - b a) y + mu/sigma^2 + i omega) / sqrt(2b)),  b = 1 + 1/sigma^2.
// The integral it represents converges for b > 0; for sigma2 in (-1, 0) the
// expression is evaluated as the analytic continuation. Throws
// std::invalid_argument for sigma2 outside (-1, inf) or sigma2 == 0.
std::complex<double> gabor_closed_form(const GaborParams& params, double a, double y);

// Matched-width Gabor parameters (sigma^2 = a/(1-a)) whose closed form
// carries erf(zero) as a factor: mu and omega solve
// zero = ((1-a) mu / sqrt(a) + i sqrt(a) omega) / sqrt(2).
GaborParams gabor_null_member(double a, std::complex<double> erf_zero);

// f_p(w) = integral_0^inf x^{p-1} e^{-x^2} sin(w x) dx, p > 0. Analytic head
// series on [0, delta] (handles the x^{p-1} singularity for p < 1), then
// oscillation-aware panels of width ~ pi/w.
double fp(double w, double p);

// Positive roots of f_p on (0, w_max]: sign-change scan at step 0.05,
// bisection to machine width, sign-change brackets kept as certificates.
// The count must equal ceil(p/2) - 1 (0 for p <= 2); a mismatch throws
// numerical_error (insufficient w_max or quadrature failure).
RootSet fp_roots(double p, double w_max);

// Max over w_grid of |2 f_p''(w) + (p-1) f_p(w) + (w f_p(w))'|, derivatives
// by central differences with step 1e-3.
double fp_ode_residual(double p, const std::vector<double>& w_grid);

// Max over w_grid of the deviation between the sine transform
// 2 integral_0^inf phi(x) sin(w x) dx and (2/sqrt(pi)) D(w/sqrt(2)).
// (This is the imaginary part of integral sign(x) phi(x) e^{i w x} dx; the
// identity holds in the unnormalized e^{+i w x} transform convention.)
double dawson_fourier_check(const std::vector<double>& w_grid);

// Principal-value representation of f_p for p in (0,2), up to an unknown
// constant: integral_0^inf u^{-p} [e^{-(w-u)^2/4} - e^{-(w+u)^2/4}] du
// (the odd regularization of p.v. integral t^{-p} e^{-(w-t)^2/4} dt).
double fp_pv_integral(double w, double p);

}  // namespace lplab::linearity
