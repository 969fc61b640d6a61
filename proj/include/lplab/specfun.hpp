#pragma once

#include <complex>
#include <vector>

#include "lplab/rootset.hpp"

namespace lplab::specfun {

inline constexpr double kSqrtPi = 1.7724538509055160273;     // sqrt(pi)
inline constexpr double kSqrt2Pi = 2.5066282746310005024;    // sqrt(2*pi)
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779; // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;

// Global maximum of the Dawson function, attained near x = 0.9241.
inline constexpr double kDawsonMax = 0.54104422463518169847;

struct NormalEval {
  double pdf;
  double cdf;
};

// Standard normal density exp(-x^2/2)/sqrt(2*pi).
double std_normal_pdf(double x);

// Standard normal cdf via erfc; satisfies cdf(-x) == 1 - cdf(x) exactly.
double std_normal_cdf(double x);

// pdf and cdf together. Throws std::invalid_argument on non-finite input.
NormalEval std_normal(double x);

// Inverse standard normal cdf. Rational initial guess polished by Halley
// steps on the cdf; accurate to a few ulp across (0, 1).
double std_normal_quantile(double p);

// Dawson function D(x) = exp(-x^2) * integral_0^x exp(t^2) dt.
//
// Piecewise: Maclaurin series on |x| < 1, Gaussian-sampling series
// (Rybicki) on [1, 6.5), asymptotic expansion beyond. Each piece is
// accurate to a few ulp, so centered differences on D stay quiet down to
// steps of 1e-5. Throws std::invalid_argument on non-finite input.
double dawson(double x);

// Error function of a complex argument.
//
// Declared accuracy domain: |Re z| <= 30 and |Im z| <= 30 (domain_error
// outside). Relative error stays below 1e-11 wherever the value is
// representable in double; points with |Im z|^2 - |Re z|^2 > ~709
// overflow and come back with infinite components. Symmetries
// erf(-z) = -erf(z) and erf(conj z) = conj erf(z) hold exactly by
// construction.
//
// Regions: Maclaurin series (long double accumulation) for |z| <= 4;
// near either axis, direct real formulas or a Taylor step off the
// imaginary axis; elsewhere erfc(z) = exp(-z^2) w(iz) with the Faddeeva
// function evaluated by a Laplace continued fraction (large |z|) or a
// midpoint-rule Cauchy sum with aliasing-controlled step.
std::complex<double> erf_complex(std::complex<double> z);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva(std::complex<double> z);

// Univariate polynomial, coefficients in ascending degree.
struct PolyCoeffs {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double eval(double x) const;  // Horner
};

// Probabilist's Hermite polynomial He_n as explicit coefficients.
// He_0 = 1, He_1 = x, He_{n+1} = x He_n - n He_{n-1}. Requires n <= 50
// (domain_error beyond).
PolyCoeffs hermite_prob(int n);

// He_n(x) by the three-term recurrence (stable for all n <= 50).
double hermite_eval(int n, double x);

// d/dx He_n(x) = n He_{n-1}(x).
double hermite_deriv(int n, double x);

// All n real zeros of He_n, sorted, with sign-change brackets.
// Eigenvalues of the symmetric tridiagonal Jacobi matrix (off-diagonal
// sqrt(k)), one Newton polish on the recurrence, then exact
// symmetrization of the +/- pairs.
RootSet hermite_zeros(int n);

// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double lower_gamma_regularized(double s, double x);

// Inverse of P(s, .) in its second argument: returns t with P(s, t) = p.
// Wilson-Hilferty initial guess, then Newton iterations confined to a
// verified bracket with bisection fallback; final residual
// |P(s,t) - p| <= 1e-12. Throws std::invalid_argument unless s > 0 and
// 0 < p < 1.
double inv_lower_gamma(double s, double p);

}  // namespace lplab::specfun
