#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace lplab::models {

inline constexpr int kDefaultGridNodes = 4001;
inline constexpr double kEnvelopeSigmas = 8.0;

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

struct GaussianPrior {
  double mean = 0.0;
  double variance = 1.0;  // > 0; variance 0 is represented as PointMassPrior
};

struct GammaPrior {
  double shape = 1.0;  // alpha > 0
  double rate = 1.0;   // beta > 0
};

struct PointMassPrior {
  double location = 0.0;
};

struct TwoPointPrior {
  double x1 = -1.0;
  double x2 = 1.0;
  double w = 0.5;  // P(X = x1), in (0,1)
};

// Piecewise-linear density on a strictly increasing grid; normalized so the
// trapezoid integral is exactly 1. Negative input values are clamped to 0
// before normalization.
struct GridDensityPrior {
  std::vector<double> x;
  std::vector<double> pdf;
  std::vector<double> cdf;  // running trapezoid integral of pdf

  double density_at(double xq) const;  // 0 outside the grid
  double quantile(double q) const;     // linear interpolation of the cdf
};

using Prior =
    std::variant<GaussianPrior, GammaPrior, PointMassPrior, TwoPointPrior, GridDensityPrior>;

// Validates invariants and normalizes. Throws std::invalid_argument on a
// non-increasing grid, size mismatch, or vanishing total mass.
GridDensityPrior make_grid_density(std::vector<double> x, std::vector<double> density);

// Gaussian prior, identifying variance 0 with a point mass.
Prior make_gaussian(double mean, double variance);

// ---------------------------------------------------------------------------
// Noise channels
// ---------------------------------------------------------------------------

struct GaussianNoise {};  // Y = X + Z, Z standard normal

struct PoissonNoise {};  // P(Y=y | X=x) = x^y e^-x / y!,  0^0 = 1

// Conditional law h(y) exp(x y - psi(x)). psi_gap_bound is a declared finite
// bound for sup_x (x^2/2 - psi(x)); constructors that need it check the
// declaration numerically.
struct NefNoise {
  std::function<double(double)> log_partition;  // psi
  std::function<double(double)> base_measure;   // h, nonnegative
  double psi_gap_bound = 0.0;
};

using NoiseModel = std::variant<GaussianNoise, PoissonNoise, NefNoise>;

// ---------------------------------------------------------------------------
// Special prior families
// ---------------------------------------------------------------------------

// Parameters of the cosine-modulated Gaussian family
//   f(x) ~ exp(-(1-a) x^2 / (2a)) (1 + rho cos(omega x / sqrt(a) + theta)).
struct CounterexampleParams {
  double a = 0.5;      // in (0,1)
  double rho = 1.0;    // in [-1,1]
  double theta = 0.0;  // radians
  double omega = 0.0;  // frequency in the rescaled (convolution) variable
};

// N(0, a/(1-a)); a = 0 degenerates to a point mass at 0.
// Throws std::invalid_argument outside [0, 1).
Prior matched_gaussian_prior(double a);

// Normalized density of the cosine-modulated family on a uniform grid over
// +/- kEnvelopeSigmas envelope standard deviations.
GridDensityPrior counterexample_prior(const CounterexampleParams& params,
                                      int nodes = kDefaultGridNodes);

// Normalized density ~ exp(-x^2/(2a) + psi(x)) for a natural exponential
// family channel satisfying sup_x (x^2/2 - psi(x)) < inf. Throws model_error
// when the density fails the numerical integrability check (tail mass beyond
// the adapted grid above 1e-6 of the total).
GridDensityPrior nef_matched_prior(const NefNoise& noise, double a,
                                   int nodes = kDefaultGridNodes);

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Closed forms for parametric variants; trapezoid quadrature for grids;
// exact finite sums for atoms.
Moments prior_moments(const Prior& prior);

bool is_atomic(const Prior& prior);  // point mass or two-point

// Density of a continuous prior at x (grid priors: piecewise linear,
// 0 outside). Throws std::invalid_argument for atomic priors.
double prior_density(const Prior& prior, double x);

// [lo, hi] window containing all but ~1e-14 of the mass (parametric priors:
// mean +/- sigmas standard deviations clipped to the support; grids: the
// grid span; atoms: the atom span).
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};
Window prior_window(const Prior& prior, double sigmas = 8.5);

}  // namespace lplab::models
