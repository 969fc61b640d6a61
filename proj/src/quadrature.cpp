#include "lplab/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace lplab::quad {

namespace {

GLRule compute_rule(int n) {
  // Newton on the Legendre recurrence (classic gauleg).
  GLRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
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
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GLRule& gauss_legendre(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: bad order");
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::scoped_lock lock(mu);
  auto [it, inserted] = cache.try_emplace(n);
  if (inserted) it->second = compute_rule(n);
  return it->second;
}

std::vector<double> breakpoints(double lo, double hi, std::vector<double> splits,
                                double max_width) {
  if (!(hi > lo)) throw std::invalid_argument("breakpoints: need hi > lo");
  if (!(max_width > 0.0)) throw std::invalid_argument("breakpoints: need max_width > 0");
  std::vector<double> marks = {lo, hi};
  for (double s : splits) {
    if (s > lo && s < hi) marks.push_back(s);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  std::vector<double> out;
  out.push_back(marks.front());
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    const double a = marks[i], b = marks[i + 1];
    const int k = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int j = 1; j <= k; ++j) out.push_back(a + (b - a) * j / k);
  }
  out.back() = hi;
  return out;
}

}  // namespace lplab::quad
