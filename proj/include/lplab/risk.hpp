#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "lplab/models.hpp"

namespace lplab::risk {

struct Quadrature {};

struct MonteCarlo {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
};

using Method = std::variant<Quadrature, MonteCarlo>;

struct RiskPoint {
  double value = 0.0;
  std::optional<double> stderr_est;  // Monte Carlo only
};

// E |X - a Y|^p with Y = X + Z, Z standard normal.
//
// Quadrature: outer integral over the prior (atoms exact), inner Gaussian
// integral split at the kink z = (1-a) x / a. Monte Carlo: mean over
// counter-indexed draws; bitwise independent of thread count. Requires
// p >= 1 and a prior with finite p-th moment; throws numerical_error if the
// accumulation goes non-finite.
RiskPoint bayes_risk(const models::Prior& prior, double a, double p, const Method& method,
                     int jobs = 1);

// Slope sweep f(a) = E |X - a Y|^p over a sorted grid.
struct RiskCurve {
  std::vector<double> a;
  std::vector<double> value;
  std::vector<double> stderr_est;  // empty for quadrature
  double p = 1.0;
  Method method = Quadrature{};
};

RiskCurve risk_scan(const models::Prior& prior, double p, const std::vector<double>& a_grid,
                    const Method& method = Quadrature{}, int jobs = 1);

// index of the smallest risk value
std::size_t argmin(const RiskCurve& curve);

// companion check: nondecreasing on a >= 1 and nonincreasing on a <= 0,
// within slack (use ~3 stderr for Monte Carlo curves, quadrature tolerance
// otherwise)
bool admissible_shape(const RiskCurve& curve, double slack);

// E |N(0,1)|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
double abs_normal_moment(double p);

// one-sided derivative of a -> E |X - a Y|^p at a = 1 (forward difference,
// step 1e-4)
double risk_derivative_at_one(const models::Prior& prior, double p);

}  // namespace lplab::risk
