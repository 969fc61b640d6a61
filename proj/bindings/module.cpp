#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <optional>
#include <variant>

#include "lplab/linearity.hpp"
#include "lplab/models.hpp"
#include "lplab/posterior.hpp"
#include "lplab/risk.hpp"
#include "lplab/specfun.hpp"

namespace py = pybind11;
using namespace lplab;

namespace {

// std::variant would be auto-converted by the stl casters; small holders keep
// Prior / Noise / Posterior as opaque python classes instead
struct PyPrior { models::Prior v; };
struct PyNoise { models::NoiseModel v; };
struct PyPosterior { posterior::Posterior v; };

risk::Method make_method(const std::string& method, std::uint64_t samples,
                         std::optional<std::uint64_t> seed) {
  if (method == "quadrature") return risk::Quadrature{};
  if (method == "monte-carlo") {
    if (!seed) throw std::invalid_argument("monte-carlo needs an explicit seed");
    return risk::MonteCarlo{samples, *seed};
  }
  throw std::invalid_argument("method must be 'quadrature' or 'monte-carlo'");
}

posterior::EstimatorKind parse_kind(const std::string& kind) {
  if (kind == "mean") return posterior::EstimatorKind::mean;
  if (kind == "median") return posterior::EstimatorKind::median;
  if (kind == "lp") return posterior::EstimatorKind::lp;
  throw std::invalid_argument("estimator kind must be mean | median | lp");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal Bayesian estimators under L^p losses: posteriors, linearity "
            "diagnostics, integral-operator checks and Bayes-risk scans.";

  // ---- special functions ----
  m.def("std_normal", [](double x) {
    const auto v = specfun::std_normal(x);
    return py::make_tuple(v.pdf, v.cdf);
  }, py::arg("x"), "Standard normal (pdf, cdf) at x.");
  m.def("dawson", &specfun::dawson, py::arg("x"));
  m.def("erf_complex", &specfun::erf_complex, py::arg("z"));
  m.def("hermite_prob", [](int n) { return specfun::hermite_prob(n).coeffs; },
        py::arg("n"), "Coefficients of He_n, ascending degree.");
  m.def("inv_lower_gamma", &specfun::inv_lower_gamma, py::arg("s"), py::arg("p"));
  m.def("lower_gamma_regularized", &specfun::lower_gamma_regularized, py::arg("s"),
        py::arg("x"));

  py::class_<RootSet>(m, "RootSet")
      .def_readonly("roots", &RootSet::roots)
      .def_readonly("brackets", &RootSet::brackets)
      .def_readonly("residuals", &RootSet::residuals)
      .def("__len__", [](const RootSet& r) { return r.roots.size(); });
  m.def("hermite_zeros", &specfun::hermite_zeros, py::arg("n"));

  // ---- priors and noise ----
  py::class_<PyPrior>(m, "Prior")
      .def_static("gaussian",
                  [](double mean, double variance) {
                    return PyPrior{models::make_gaussian(mean, variance)};
                  },
                  py::arg("mean"), py::arg("variance"))
      .def_static("gamma",
                  [](double shape, double rate) {
                    return PyPrior{models::Prior(models::GammaPrior{shape, rate})};
                  },
                  py::arg("shape"), py::arg("rate"))
      .def_static("point_mass",
                  [](double location) {
                    return PyPrior{models::Prior(models::PointMassPrior{location})};
                  },
                  py::arg("location"))
      .def_static("two_point",
                  [](double x1, double x2, double weight) {
                    return PyPrior{models::Prior(models::TwoPointPrior{x1, x2, weight})};
                  },
                  py::arg("x1"), py::arg("x2"), py::arg("weight") = 0.5)
      .def_static("grid",
                  [](std::vector<double> x, std::vector<double> density) {
                    return PyPrior{models::Prior(
                        models::make_grid_density(std::move(x), std::move(density)))};
                  },
                  py::arg("x"), py::arg("density"))
      .def_static("matched_gaussian",
                  [](double a) { return PyPrior{models::matched_gaussian_prior(a)}; },
                  py::arg("a"))
      .def_static("counterexample",
                  [](double a, double rho, double theta, double omega, int nodes) {
                    return PyPrior{models::Prior(
                        models::counterexample_prior({a, rho, theta, omega}, nodes))};
                  },
                  py::arg("a"), py::arg("rho"), py::arg("theta") = 0.0, py::arg("omega"),
                  py::arg("nodes") = models::kDefaultGridNodes)
      .def("moments", [](const PyPrior& p) {
        const auto mom = models::prior_moments(p.v);
        return py::make_tuple(mom.mean, mom.variance);
      });

  py::class_<PyNoise>(m, "Noise")
      .def_static("gaussian",
                  [] { return PyNoise{models::NoiseModel(models::GaussianNoise{})}; })
      .def_static("poisson",
                  [] { return PyNoise{models::NoiseModel(models::PoissonNoise{})}; })
      .def_static("nef",
                  [](std::function<double(double)> psi, double gap_bound) {
                    models::NefNoise nef;
                    nef.log_partition = std::move(psi);
                    nef.base_measure = [](double y) { return specfun::std_normal_pdf(y); };
                    nef.psi_gap_bound = gap_bound;
                    return PyNoise{models::NoiseModel(std::move(nef))};
                  },
                  py::arg("log_partition"), py::arg("gap_bound"));

  m.def("nef_matched_prior",
        [](const PyNoise& noise, double a, int nodes) {
          const auto* nef = std::get_if<models::NefNoise>(&noise.v);
          if (nef == nullptr) throw std::invalid_argument("expected an NEF noise model");
          return PyPrior{models::Prior(models::nef_matched_prior(*nef, a, nodes))};
        },
        py::arg("noise"), py::arg("a"), py::arg("nodes") = models::kDefaultGridNodes);

  // ---- posterior and estimators ----
  py::class_<PyPosterior>(m, "Posterior")
      .def("mean", [](const PyPosterior& p) { return posterior::cond_mean(p.v); })
      .def("median", [](const PyPosterior& p) { return posterior::cond_median(p.v); })
      .def("lp_estimator",
           [](const PyPosterior& p, double lp) {
             return posterior::cond_lp_estimator(p.v, lp);
           },
           py::arg("p"))
      .def("quantile",
           [](const PyPosterior& p, double q) { return posterior::quantile(p.v, q); },
           py::arg("q"))
      .def_property_readonly("y",
                             [](const PyPosterior& p) {
                               return std::visit([](const auto& v) { return v.y; }, p.v);
                             })
      .def_property_readonly("grid", [](const PyPosterior& p) -> py::object {
        if (const auto* g = std::get_if<posterior::PosteriorGrid>(&p.v)) {
          return py::make_tuple(g->x, g->pdf, g->cdf);
        }
        return py::none();
      });

  m.def("posterior",
        [](const PyPrior& prior, const PyNoise& noise, double y, int nodes) {
          return PyPosterior{posterior::compute_posterior(prior.v, noise.v, y, nodes)};
        },
        py::arg("prior"), py::arg("noise"), py::arg("y"),
        py::arg("nodes") = posterior::kDefaultPosteriorNodes);
  m.def("third_cumulant",
        [](const PyPrior& prior, double y) {
          return posterior::posterior_third_cumulant(prior.v, y);
        },
        py::arg("prior"), py::arg("y"),
        "Reconciled third conditional cumulant under Gaussian noise.");
  m.def("estimator_curve",
        [](const PyPrior& prior, const PyNoise& noise, const std::vector<double>& ys,
           const std::string& kind, double lp) {
          const auto c =
              posterior::estimator_curve(prior.v, noise.v, ys, parse_kind(kind), lp);
          return py::make_tuple(c.y, c.value);
        },
        py::arg("prior"), py::arg("noise"), py::arg("y_grid"), py::arg("kind") = "median",
        py::arg("p") = 2.0);

  // ---- linearity diagnostics ----
  py::class_<linearity::LinearityReport>(m, "LinearityReport")
      .def_readonly("a", &linearity::LinearityReport::a)
      .def_readonly("p", &linearity::LinearityReport::p)
      .def_readonly("y", &linearity::LinearityReport::y)
      .def_readonly("residual", &linearity::LinearityReport::residual)
      .def_readonly("sup_norm", &linearity::LinearityReport::sup_norm)
      .def_readonly("tolerance", &linearity::LinearityReport::tolerance)
      .def_readonly("linear", &linearity::LinearityReport::linear);

  m.def("median_linearity_residual",
        [](const PyPrior& prior, double a, const std::vector<double>& ys, double tol) {
          return linearity::median_linearity_residual(prior.v, a, ys, tol);
        },
        py::arg("prior"), py::arg("a"), py::arg("y_grid"), py::arg("tolerance") = 1e-6);
  m.def("lp_linearity_residual",
        [](const PyPrior& prior, double a, double lp, const std::vector<double>& ys,
           double tol) {
          return linearity::lp_linearity_residual(prior.v, a, lp, ys, tol);
        },
        py::arg("prior"), py::arg("a"), py::arg("p"), py::arg("y_grid"),
        py::arg("tolerance") = 1e-6);
  m.def("convolution_residual",
        [](const PyPrior& prior, double a, const std::vector<double>& ys, double tol) {
          return linearity::convolution_residual(prior.v, a, ys, tol);
        },
        py::arg("prior"), py::arg("a"), py::arg("y_grid"), py::arg("tolerance") = 1e-6);

  py::class_<linearity::GaborParams>(m, "GaborParams")
      .def(py::init([](double mu, double sigma2, double omega) {
             return linearity::GaborParams{mu, sigma2, omega};
           }),
           py::arg("mu"), py::arg("sigma2"), py::arg("omega"))
      .def_readonly("mu", &linearity::GaborParams::mu)
      .def_readonly("sigma2", &linearity::GaborParams::sigma2)
      .def_readonly("omega", &linearity::GaborParams::omega)
      .def_property_readonly("b", &linearity::GaborParams::b);

  m.def("gabor_closed_form", &linearity::gabor_closed_form, py::arg("params"),
        py::arg("a"), py::arg("y"));
  m.def("gabor_null_member", &linearity::gabor_null_member, py::arg("a"),
        py::arg("erf_zero"));
  m.def("apply_ta_gabor",
        [](const linearity::GaborParams& params, double a, double y) {
          const double sigma = std::sqrt(std::abs(params.sigma2));
          return linearity::apply_ta(
              [&](double x) { return linearity::gabor_wavelet(params, x); },
              std::min(params.mu - 9.0 * sigma, y - 9.0),
              std::max(params.mu + 9.0 * sigma, y + 9.0), a, y,
              std::min(0.25, 1.5 / std::max(1.0, std::abs(params.omega))));
        },
        py::arg("params"), py::arg("a"), py::arg("y"),
        "T_a applied to the Gabor wavelet by panel quadrature.");
  m.def("apply_ta",
        [](const std::function<std::complex<double>(double)>& f, double lo, double hi,
           double a, double y, double max_panel) {
          return linearity::apply_ta(f, lo, hi, a, y, max_panel);
        },
        py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("a"), py::arg("y"),
        py::arg("max_panel") = 0.25);

  m.def("fp", &linearity::fp, py::arg("w"), py::arg("p"));
  m.def("fp_roots", &linearity::fp_roots, py::arg("p"), py::arg("w_max") = 20.0);
  m.def("fp_ode_residual", &linearity::fp_ode_residual, py::arg("p"), py::arg("w_grid"));
  m.def("dawson_fourier_check", &linearity::dawson_fourier_check, py::arg("w_grid"));

  // ---- risk ----
  m.def("bayes_risk",
        [](const PyPrior& prior, double a, double lp, const std::string& method,
           std::uint64_t samples, std::optional<std::uint64_t> seed, int jobs) {
          const auto pt =
              risk::bayes_risk(prior.v, a, lp, make_method(method, samples, seed), jobs);
          return py::make_tuple(pt.value, pt.stderr_est);
        },
        py::arg("prior"), py::arg("a"), py::arg("p"), py::arg("method") = "quadrature",
        py::arg("samples") = 1000000, py::arg("seed") = std::nullopt, py::arg("jobs") = 1);
  m.def("risk_scan",
        [](const PyPrior& prior, double lp, const std::vector<double>& a_grid,
           const std::string& method, std::uint64_t samples,
           std::optional<std::uint64_t> seed, int jobs) {
          const auto c =
              risk::risk_scan(prior.v, lp, a_grid, make_method(method, samples, seed), jobs);
          return py::make_tuple(c.a, c.value, c.stderr_est);
        },
        py::arg("prior"), py::arg("p"), py::arg("a_grid"), py::arg("method") = "quadrature",
        py::arg("samples") = 1000000, py::arg("seed") = std::nullopt, py::arg("jobs") = 1);
}
