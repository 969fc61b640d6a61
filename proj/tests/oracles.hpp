// Test-only oracles, kept independent of the library code paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// composite 48-point Gauss-Legendre, nodes computed locally by Newton on the
// Legendre recurrence (deliberately separate from lplab::quad)
inline void gl48(std::vector<double>& nodes, std::vector<double>& weights) {
  constexpr int n = 48;
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 16) {
  static std::vector<double> nodes, weights;
  if (nodes.empty()) gl48(nodes, weights);
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * k / panels;
    const double hi = a + (b - a) * (k + 1) / panels;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s += weights[i] * f(mid + half * nodes[i]);
    }
    acc += s * half;
  }
  return acc;
}

// real erf by quadrature of (2/sqrt(pi)) e^{-t^2}
inline double erf_real(double x) {
  const double s = integrate([](double t) { return std::exp(-t * t); }, 0.0, std::abs(x));
  return std::copysign(2.0 / std::sqrt(M_PI) * s, x);
}

// standard normal cdf by quadrature of the density on (-inf, x], truncated
// where the mass is below 1e-33
inline double normal_cdf(double x) {
  const double lo = -12.0;
  return integrate(
      [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }, lo, x, 24);
}

// brute bisection roots of a scalar function on [lo, hi] via a sign scan
inline std::vector<double> bisect_roots(const std::function<double(double)>& f, double lo,
                                        double hi, int scan = 4000) {
  std::vector<double> roots;
  double prev_x = lo, prev_f = f(lo);
  for (int i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * i / scan;
    const double fx = f(x);
    if (prev_f == 0.0) {
      roots.push_back(prev_x);
    } else if (prev_f * fx < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int k = 0; k < 80; ++k) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = fx;
  }
  return roots;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace oracles
