#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

namespace lplab::quad {

// Gauss-Legendre rule on [-1, 1].
struct GLRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule of the given order (thread-safe).
const GLRule& gauss_legendre(int n);

// Single n-point rule over [a, b].
template <class F>
auto gl(F&& f, double a, double b, int n = 24) {
  using R = std::invoke_result_t<F, double>;
  const GLRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R acc{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

// Composite rule over consecutive breakpoints.
template <class F>
auto panels(F&& f, const std::vector<double>& brk, int n = 24) {
  using R = std::invoke_result_t<F, double>;
  R acc{};
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    acc += gl(f, brk[i], brk[i + 1], n);
  }
  return acc;
}

// Sorted breakpoints covering [lo, hi]: interior forced splits, then each
// span subdivided to panels no wider than max_width.
std::vector<double> breakpoints(double lo, double hi, std::vector<double> splits,
                                double max_width);

}  // namespace lplab::quad
