#pragma once

#include <variant>
#include <vector>

#include "lplab/models.hpp"

namespace lplab::posterior {

inline constexpr int kDefaultPosteriorNodes = 12001;

// Posterior of X given Y = y on a grid, normalized; cdf is the running
// trapezoid integral of pdf (so cdf.back() == 1 up to roundoff).
struct PosteriorGrid {
  std::vector<double> x;
  std::vector<double> pdf;
  std::vector<double> cdf;
  double y = 0.0;
};

// Posterior with atomic support (point-mass and two-point priors).
struct PosteriorAtoms {
  std::vector<double> x;  // ascending
  std::vector<double> w;  // sums to 1
  double y = 0.0;
};

using Posterior = std::variant<PosteriorGrid, PosteriorAtoms>;

// Bayes update of the prior through the noise channel at observation y.
//
// Poisson noise requires y to be a nonnegative integer and the prior to be
// supported on [0, inf) (model_error otherwise). Grid-density priors keep
// their own grid; parametric priors get a fresh grid of `nodes` points over
// the posterior mean +/- 8 posterior standard deviations.
Posterior compute_posterior(const models::Prior& prior, const models::NoiseModel& noise,
                            double y, int nodes = kDefaultPosteriorNodes);

// Mean of the posterior (exact under the piecewise-linear density model).
double cond_mean(const Posterior& post);

// Conditional median: smallest x with CDF >= 1/2, by monotone linear
// interpolation of the CDF between grid nodes (atoms: the infimum
// convention on the step CDF).
double cond_median(const Posterior& post);

// Minimizer of t -> integral |x - t|^p dPost(x) for p >= 1, by Brent search
// on the convex objective; the objective itself is evaluated in closed form
// per grid panel, so the kink at x = t costs no quadrature error.
double cond_lp_estimator(const Posterior& post, double p);

// General quantile with the same interpolation convention as cond_median.
double quantile(const Posterior& post, double q);

// Third conditional cumulant kappa_3(y) under Gaussian noise, computed two
// ways and reconciled: (i) third central moment of the posterior,
// (ii) d^3/dy^3 log f_Y by Richardson-extrapolated central differences.
// Returns (i); throws numerical_error if the routes differ by more than
// 1e-4. Requires a prior with finite third absolute moment.
double posterior_third_cumulant(const models::Prior& prior, double y);

// Marginal density f_Y(y) = integral phi(y - x) dP_X(x) under Gaussian noise.
double marginal_density_gaussian(const models::Prior& prior, double y);

// The log-marginal route alone: d^3/dy^3 log f_Y(y) by the same
// Richardson-extrapolated stencil posterior_third_cumulant reconciles
// against.
double third_cumulant_logfd(const models::Prior& prior, double y);

enum class EstimatorKind { mean, median, lp };

struct EstimatorCurve {
  std::vector<double> y;
  std::vector<double> value;
  double p = 2.0;  // loss exponent (meaningful for kind == lp)
  EstimatorKind kind = EstimatorKind::median;
};

// Sweep of the chosen estimator over a y grid.
EstimatorCurve estimator_curve(const models::Prior& prior, const models::NoiseModel& noise,
                               const std::vector<double>& y_grid, EstimatorKind kind,
                               double p = 2.0, int nodes = kDefaultPosteriorNodes);

}  // namespace lplab::posterior
