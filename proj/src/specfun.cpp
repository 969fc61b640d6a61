#include "lplab/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lplab::specfun {

namespace {

using cx = std::complex<double>;

void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(who) + ": non-finite argument");
  }
}

// ---------------------------------------------------------------------------
// Dawson pieces
// ---------------------------------------------------------------------------

double dawson_series(double x) {
  // D(x) = sum_k (-1)^k 2^k x^{2k+1} / (2k+1)!!, |x| < 1
  double term = x;
  double s = x;
  int k = 0;
  while (std::abs(term) > 1e-18 * std::abs(s)) {
    term *= -2.0 * x * x / (2 * k + 3);
    s += term;
    ++k;
  }
  return s;
}

double dawson_sampling(double x) {
  // Rybicki's expansion: D(x) ~ (1/sqrt(pi)) sum_{n odd} exp(-(x-nh)^2)/n,
  // error O(exp(-(pi/2h)^2)); h = 0.25 puts that below double epsilon.
  constexpr double h = 0.25;
  const int n_lo = static_cast<int>(std::floor((x - 8.7) / h));
  const int n_hi = static_cast<int>(std::ceil((x + 8.7) / h));
  double s = 0.0;
  for (int n = n_lo | 1; n <= n_hi; n += 2) {
    if (n == 0) continue;
    const double u = x - n * h;
    s += std::exp(-u * u) / n;
  }
  return s / kSqrtPi;
}

double dawson_asymptotic(double x) {
  // D(x) ~ (1/2x) sum_k (2k-1)!!/(2x^2)^k
  const double r = 1.0 / (2.0 * x * x);
  double term = 1.0 / (2.0 * x);
  double s = term;
  for (int k = 1; k <= 60; ++k) {
    term *= (2 * k - 1) * r;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
    s += term;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Faddeeva pieces (Im z >= 0 throughout)
// ---------------------------------------------------------------------------

cx faddeeva_cf(cx z) {
  // Laplace continued fraction, modified Lentz. Converges to full double
  // precision for |z| >= ~8 anywhere in the closed upper half plane.
  constexpr double tiny = 1e-300;
  cx f(tiny, 0.0), C = f, D(0.0, 0.0);
  for (int k = 1; k <= 160; ++k) {
    const double ak = (k == 1) ? 1.0 : -0.5 * (k - 1);
    D = z + ak * D;
    if (D == cx(0.0, 0.0)) D = tiny;
    C = z + ak / C;
    if (C == cx(0.0, 0.0)) C = tiny;
    D = 1.0 / D;
    const cx delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return cx(0.0, 1.0 / kSqrtPi) * f;
}

cx faddeeva_midpoint(cx z) {
  // Midpoint rule on w(z) = (i/pi) integral exp(-t^2)/(z-t) dt. The step is
  // chosen so both aliasing terms (Gaussian image and pole image scaled by
  // |exp(-z^2)|) sit below 1e-18.
  const double x = z.real(), y = z.imag();
  const double pole_excess = std::max(0.0, y * y - x * x);
  const double h = std::min(0.47, 2.0 * M_PI * y / (42.0 + pole_excess));
  const int n_max = static_cast<int>(std::ceil(7.6 / h));
  cx s(0.0, 0.0);
  for (int n = -n_max - 1; n <= n_max; ++n) {
    const double t = (n + 0.5) * h;
    s += std::exp(-t * t) / (z - t);
  }
  return cx(0.0, h / M_PI) * s;
}

cx faddeeva_axis_taylor(cx z) {
  // Taylor step off the real axis from the exactly-known anchor
  // w(xi) = exp(-xi^2) + 2i/sqrt(pi) D(xi). Uses
  // w^{(k+1)} = -2 (xi w^{(k)} + k w^{(k-1)}).
  const double xi = z.real();
  const cx dz(0.0, z.imag());
  cx wkm1 = cx(std::exp(-xi * xi), 2.0 / kSqrtPi * dawson(xi));
  cx wk = -2.0 * xi * wkm1 + cx(0.0, 2.0 / kSqrtPi);
  cx s = wkm1;
  cx p = dz;
  s += wk * p;
  for (int k = 1; k < 64; ++k) {
    const cx wkp1 = -2.0 * (xi * wk + static_cast<double>(k) * wkm1);
    wkm1 = wk;
    wk = wkp1;
    p *= dz / static_cast<double>(k + 1);
    const cx term = wk * p;
    s += term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// erf pieces; quadrant Re z >= 0, Im z >= 0
// ---------------------------------------------------------------------------

cx erf_maclaurin(cx z) {
  // (2/sqrt(pi)) sum_k (-1)^k z^{2k+1}/(k! (2k+1)); extended-precision
  // accumulation tames the cancellation near |z| = 4.
  const std::complex<long double> zl(z.real(), z.imag());
  const std::complex<long double> zz = zl * zl;
  std::complex<long double> u = zl;  // z^{2k+1}/k!
  std::complex<long double> s = zl;
  for (int k = 1; k < 320; ++k) {
    u *= -zz / static_cast<long double>(k);
    const std::complex<long double> term = u / static_cast<long double>(2 * k + 1);
    s += term;
    if (std::abs(term) < 1e-22L * std::abs(s)) break;
  }
  s *= 2.0L / 1.772453850905516027298167483341145183L;
  return cx(static_cast<double>(s.real()), static_cast<double>(s.imag()));
}

// erf on the positive imaginary axis: erf(iy) = i (2/sqrt(pi)) e^{y^2} D(y).
double erfi_real(double y) {
  if (y == 0.0) return 0.0;
  const double ln = y * y + std::log(2.0 / kSqrtPi * dawson(y));
  if (ln > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(ln);
}

cx erf_near_imag_axis(cx z) {
  // Re z < 0.01: Taylor around z0 = i Im z. f' = (2/sqrt(pi)) exp(-z^2);
  // the polynomial factors follow P_{k+1} = -2 z0 P_k - 2(k-1) P_{k-1}.
  const double y = z.imag();
  const double e0 = erfi_real(y);
  if (!std::isfinite(e0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return cx(inf, inf);  // magnitude overflows double
  }
  const cx z0(0.0, y);
  const cx dz(z.real(), 0.0);
  // exp(-z0^2) = exp(y^2), real and large but finite here since e0 was.
  const double expy2 = std::exp(y * y);
  cx pk(2.0 / kSqrtPi * expy2, 0.0);  // f'(z0)
  cx pkm1(0.0, 0.0);
  cx s(0.0, e0);
  cx p = dz;
  s += pk * p;
  for (int k = 1; k < 48; ++k) {
    const cx pkp1 = -2.0 * (z0 * pk + static_cast<double>(k - 1) * pkm1);
    pkm1 = pk;
    pk = pkp1;
    p *= dz / static_cast<double>(k + 1);
    const cx term = pk * p;
    s += term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

cx erf_quadrant(cx z) {
  const double x = z.real(), y = z.imag();
  if (y == 0.0) return cx(std::erf(x), 0.0);
  if (x == 0.0) return cx(0.0, erfi_real(y));
  if (std::abs(z) <= 4.0) return erf_maclaurin(z);
  if (x < 0.01) return erf_near_imag_axis(z);
  // erfc(z) = exp(-z^2) w(iz)
  const cx w = faddeeva(cx(-y, x));
  const double re_mz2 = (y - x) * (y + x);  // Re(-z^2), computed stably
  if (re_mz2 + std::log(std::abs(w)) > 708.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return cx(inf, inf);
  }
  const cx emz2 = std::exp(cx(re_mz2, -2.0 * x * y));
  return 1.0 - emz2 * w;
}

// ---------------------------------------------------------------------------
// incomplete gamma pieces (classic series / continued fraction split)
// ---------------------------------------------------------------------------

double gamma_p_series(double s, double x) {
  // P(s,x) = x^s e^-x / Gamma(s+1) * sum_k x^k / ((s+1)...(s+k))
  double ap = s;
  double term = 1.0 / s;
  double sum = term;
  for (int k = 0; k < 10000; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_cf(double s, double x) {
  // Q(s,x) by Lentz's continued fraction, x >= s+1.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int k = 1; k < 10000; ++k) {
    const double an = -k * (k - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return f * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

// ---------------------------------------------------------------------------

double std_normal_pdf(double x) {
  require_finite(x, "std_normal");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal");
  return 0.5 * std::erfc(-x / kSqrt2);
}

NormalEval std_normal(double x) { return {std_normal_pdf(x), std_normal_cdf(x)}; }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must lie in (0,1)");
  }
  const double q = std::min(p, 1.0 - p);
  // Abramowitz-Stegun 26.2.23 seed, |error| < 4.5e-4
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t));
  if (p < 0.5) x = -x;
  // Halley polish on cdf(x) - p
  for (int it = 0; it < 4; ++it) {
    const double e = std_normal_cdf(x) - p;
    const double d = std_normal_pdf(x);
    if (d == 0.0) break;
    const double u = e / d;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double dawson(double x) {
  require_finite(x, "dawson");
  const double ax = std::abs(x);
  double d;
  if (ax < 1.0) {
    d = dawson_series(ax);
  } else if (ax < 6.5) {
    d = dawson_sampling(ax);
  } else {
    d = dawson_asymptotic(ax);
  }
  return std::copysign(d, x);
}

std::complex<double> faddeeva(std::complex<double> z) {
  if (z.imag() < 0.0) {
    throw std::domain_error("faddeeva: requires Im z >= 0");
  }
  if (std::abs(z) >= 8.4) return faddeeva_cf(z);
  if (z.imag() >= 0.5) return faddeeva_midpoint(z);
  return faddeeva_axis_taylor(z);
}

std::complex<double> erf_complex(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("erf_complex: non-finite argument");
  }
  if (std::abs(z.real()) > 30.0 || std::abs(z.imag()) > 30.0) {
    throw std::domain_error("erf_complex: outside declared accuracy domain |Re|,|Im| <= 30");
  }
  // reduce to the first quadrant so the symmetries hold exactly
  if (z.real() < 0.0) return -erf_complex(-z);
  if (z.imag() < 0.0) return std::conj(erf_complex(std::conj(z)));
  return erf_quadrant(z);
}

double PolyCoeffs::eval(double x) const {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

PolyCoeffs hermite_prob(int n) {
  if (n < 0 || n > 50) {
    throw std::domain_error("hermite_prob: n must lie in [0, 50]");
  }
  std::vector<double> prev = {1.0};          // He_0
  if (n == 0) return {prev};
  std::vector<double> cur = {0.0, 1.0};      // He_1
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) next[j + 1] += cur[j];        // x * He_k
    for (int j = 0; j < k; ++j) next[j] -= k * prev[j];        // -k He_{k-1}
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {cur};
}

double hermite_eval(int n, double x) {
  if (n < 0 || n > 50) {
    throw std::domain_error("hermite_eval: n must lie in [0, 50]");
  }
  double hm = 1.0;  // He_0
  if (n == 0) return hm;
  double h = x;     // He_1
  for (int k = 1; k < n; ++k) {
    const double hp = x * h - k * hm;
    hm = h;
    h = hp;
  }
  return h;
}

double hermite_deriv(int n, double x) {
  if (n == 0) return 0.0;
  return n * hermite_eval(n - 1, x);
}

RootSet hermite_zeros(int n) {
  if (n < 0 || n > 50) {
    throw std::domain_error("hermite_zeros: n must lie in [0, 50]");
  }
  RootSet out;
  if (n == 0) return out;

  // Golub-Welsch: eigenvalues of the Jacobi matrix (diag 0, off-diag sqrt(k))
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(r.begin(), r.end());

  // one Newton step on the recurrence
  for (double& x : r) {
    const double d = hermite_deriv(n, x);
    if (d != 0.0) x -= hermite_eval(n, x) / d;
  }
  // zeros of He_n come in exact +/- pairs (odd n has one at 0): symmetrize
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (r[n - 1 - i] - r[i]);
    r[i] = -v;
    r[n - 1 - i] = v;
  }
  if (n % 2 == 1) r[n / 2] = 0.0;

  out.roots = r;
  out.brackets.resize(n);
  out.residuals.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = r[i];
    const double gap_lo = (i > 0) ? x - r[i - 1] : 1.0;
    const double gap_hi = (i + 1 < n) ? r[i + 1] - x : 1.0;
    double delta = std::max(1e-12 * std::max(1.0, std::abs(x)), 1e-14);
    const double max_delta = 0.25 * std::min(gap_lo, gap_hi);
    while (hermite_eval(n, x - delta) * hermite_eval(n, x + delta) >= 0.0 &&
           delta < max_delta) {
      delta *= 2.0;
    }
    out.brackets[i] = {x - delta, x + delta};
    out.residuals[i] = std::abs(hermite_eval(n, x));
  }
  return out;
}

double lower_gamma_regularized(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    throw std::invalid_argument("lower_gamma_regularized: need s > 0 and finite args");
  }
  if (x <= 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_cf(s, x);
}

double inv_lower_gamma(double s, double p) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("inv_lower_gamma: s must be positive");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("inv_lower_gamma: p must lie in (0,1)");
  }

  // Wilson-Hilferty seed
  const double z = std_normal_quantile(p);
  const double c = 1.0 - 1.0 / (9.0 * s) + z / (3.0 * std::sqrt(s));
  double t = s * c * c * c;
  if (!(t > 0.0) || !std::isfinite(t)) {
    // small-s fallback: invert the leading term P ~ x^s / Gamma(s+1)
    t = std::exp((std::log(p) + std::lgamma(s + 1.0)) / s);
  }

  // grow a bracket around the seed
  double lo = t, hi = t;
  while (lower_gamma_regularized(s, lo) > p && lo > 1e-300) lo *= 0.5;
  while (lower_gamma_regularized(s, hi) < p && hi < 1e300) hi *= 2.0;

  const double lg = std::lgamma(s);
  for (int it = 0; it < 200; ++it) {
    const double f = lower_gamma_regularized(s, t) - p;
    if (f > 0.0) {
      hi = std::min(hi, t);
    } else if (f < 0.0) {
      lo = std::max(lo, t);
    }
    if (std::abs(f) <= 1e-13 && it > 0) break;
    const double dens = std::exp((s - 1.0) * std::log(t) - t - lg);
    double next = (dens > 0.0) ? t - f / dens : 0.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return t;
}

}  // namespace lplab::specfun
