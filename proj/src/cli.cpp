#include "lplab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lplab/errors.hpp"
#include "lplab/linearity.hpp"
#include "lplab/posterior.hpp"
#include "lplab/quadrature.hpp"
#include "lplab/risk.hpp"
#include "lplab/specfun.hpp"

namespace lplab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

double get_num(const json& doc, const std::string& key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) config_error("field '" + key + "' must be a number");
  return doc[key].get<double>();
}

double require_num(const json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    config_error("missing numeric field '" + key + "'");
  }
  return doc[key].get<double>();
}

// ---------------------------------------------------------------------------
// artifact writing
// ---------------------------------------------------------------------------

void atomic_write(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string render() const {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) {
      s += header[i];
      s += (i + 1 < header.size()) ? ',' : '\n';
    }
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        s += format_number(row[i]);
        s += (i + 1 < row.size()) ? ',' : '\n';
      }
    }
    return s;
  }
};

struct Summary {
  ordered doc;
  bool ok = true;
  std::string failed;

  explicit Summary(const std::string& command) {
    doc["schema"] = 1;
    doc["command"] = command;
    doc["ok"] = true;
    doc["failed_check"] = nullptr;
    doc["checks"] = ordered::array();
  }

  void check(const std::string& name, bool passed, double value, double threshold) {
    ordered c;
    c["name"] = name;
    c["passed"] = passed;
    c["value"] = value;
    c["threshold"] = threshold;
    doc["checks"].push_back(c);
    if (!passed && ok) {
      ok = false;
      failed = name;
    }
  }

  void finalize() {
    doc["ok"] = ok;
    if (!ok) doc["failed_check"] = failed;
  }
};

// ---------------------------------------------------------------------------
// descriptor parsing
// ---------------------------------------------------------------------------

models::NefNoise make_nef_preset(const std::string& name) {
  models::NefNoise nef;
  if (name == "quadratic") {
    nef.log_partition = [](double x) { return 0.5 * x * x; };
    nef.psi_gap_bound = 0.0;
  } else if (name == "quadratic_cauchy") {
    nef.log_partition = [](double x) { return 0.5 * x * x - 1.0 / (1.0 + x * x); };
    nef.psi_gap_bound = 1.0;
  } else {
    config_error("unknown NEF log-partition preset '" + name + "'");
  }
  nef.base_measure = [](double y) { return specfun::std_normal_pdf(y); };
  return nef;
}

}  // namespace

std::vector<double> GridSpec::materialize() const {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = min + (max - min) * i / (count - 1);
  return g;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

models::Prior parse_prior(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    config_error("prior descriptor needs a 'kind' string");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "gaussian") {
    return models::make_gaussian(get_num(doc, "mean", 0.0), require_num(doc, "variance"));
  }
  if (kind == "gamma") {
    const double shape = require_num(doc, "shape"), rate = require_num(doc, "rate");
    if (!(shape > 0.0) || !(rate > 0.0)) config_error("gamma prior needs shape, rate > 0");
    return models::GammaPrior{shape, rate};
  }
  if (kind == "point_mass") {
    return models::PointMassPrior{require_num(doc, "location")};
  }
  if (kind == "two_point") {
    const double w = get_num(doc, "weight", 0.5);
    if (!(w > 0.0 && w < 1.0)) config_error("two_point weight must lie in (0,1)");
    return models::TwoPointPrior{require_num(doc, "x1"), require_num(doc, "x2"), w};
  }
  if (kind == "grid") {
    if (!doc.contains("x") || !doc.contains("density")) {
      config_error("grid prior needs 'x' and 'density' arrays");
    }
    return models::make_grid_density(doc["x"].get<std::vector<double>>(),
                                     doc["density"].get<std::vector<double>>());
  }
  if (kind == "matched_gaussian") {
    return models::matched_gaussian_prior(require_num(doc, "a"));
  }
  if (kind == "counterexample") {
    models::CounterexampleParams p;
    p.a = require_num(doc, "a");
    p.rho = require_num(doc, "rho");
    p.theta = get_num(doc, "theta", 0.0);
    p.omega = require_num(doc, "omega");
    const int nodes = static_cast<int>(get_num(doc, "nodes", models::kDefaultGridNodes));
    return models::counterexample_prior(p, nodes);
  }
  if (kind == "nef_matched") {
    if (!doc.contains("psi") || !doc["psi"].is_string()) {
      config_error("nef_matched prior needs a 'psi' preset name");
    }
    const auto nef = make_nef_preset(doc["psi"].get<std::string>());
    const int nodes = static_cast<int>(get_num(doc, "nodes", models::kDefaultGridNodes));
    return models::nef_matched_prior(nef, require_num(doc, "a"), nodes);
  }
  config_error("unknown prior kind '" + kind + "'");
}

models::NoiseModel parse_noise(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    config_error("noise descriptor needs a 'kind' string");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "gaussian") return models::GaussianNoise{};
  if (kind == "poisson") return models::PoissonNoise{};
  if (kind == "nef") {
    if (!doc.contains("psi") || !doc["psi"].is_string()) {
      config_error("nef noise needs a 'psi' preset name");
    }
    return make_nef_preset(doc["psi"].get<std::string>());
  }
  config_error("unknown noise kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("top level must be a JSON object");
  if (!doc.contains("command") || !doc["command"].is_string()) {
    config_error("missing 'command' string");
  }
  ExperimentConfig cfg;
  cfg.command = doc["command"].get<std::string>();
  cfg.out_stem = doc.value("out", cfg.command);
  if (doc.contains("prior")) cfg.prior = parse_prior(doc["prior"]);
  if (doc.contains("noise")) cfg.noise = parse_noise(doc["noise"]);
  cfg.a = get_num(doc, "a", 0.5);
  cfg.p = get_num(doc, "p", 2.0);
  if (doc.contains("y_grid")) {
    const auto& g = doc["y_grid"];
    cfg.y_grid.min = require_num(g, "min");
    cfg.y_grid.max = require_num(g, "max");
    cfg.y_grid.count = static_cast<int>(get_num(g, "count", 101));
    if (cfg.y_grid.count < 2 || !(cfg.y_grid.max > cfg.y_grid.min)) {
      config_error("y_grid needs max > min and count >= 2");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) config_error("'seed' must be unsigned");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerances")) {
    for (const auto& [k, v] : doc["tolerances"].items()) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        config_error("tolerance '" + k + "' must be a positive number");
      }
      cfg.tolerances[k] = v.get<double>();
    }
  }
  cfg.extra = doc;
  return cfg;
}

namespace {

double tol_or(const ExperimentConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.tolerances.find(name);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

const models::Prior& require_prior(const ExperimentConfig& cfg) {
  if (!cfg.prior) config_error("command '" + cfg.command + "' needs a prior");
  return *cfg.prior;
}

// ---------------------------------------------------------------------------
// command runners: fill the CSV and the summary
// ---------------------------------------------------------------------------

void run_estimate(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  const auto& prior = require_prior(cfg);
  const models::NoiseModel noise = cfg.noise.value_or(models::GaussianNoise{});
  const std::string kind_name = cfg.extra.value("estimator", std::string("median"));
  posterior::EstimatorKind kind;
  if (kind_name == "mean") kind = posterior::EstimatorKind::mean;
  else if (kind_name == "median") kind = posterior::EstimatorKind::median;
  else if (kind_name == "lp") kind = posterior::EstimatorKind::lp;
  else config_error("estimator must be mean | median | lp");

  const auto curve =
      posterior::estimator_curve(prior, noise, cfg.y_grid.materialize(), kind, cfg.p);
  csv.header = {"y", "estimate"};
  double sup_dev = 0.0;
  for (std::size_t i = 0; i < curve.y.size(); ++i) {
    csv.rows.push_back({curve.y[i], curve.value[i]});
    sup_dev = std::max(sup_dev, std::abs(curve.value[i] - cfg.a * curve.y[i]));
  }
  sum.doc["estimator"] = kind_name;
  sum.doc["p"] = curve.p;
  sum.doc["sup_dev_from_ay"] = sup_dev;
}

void run_linearity_check(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  const auto& prior = require_prior(cfg);
  const double tol = tol_or(cfg, "residual", 1e-6);
  const bool expect = cfg.extra.value("expect_linear", true);

  linearity::LinearityReport rep;
  std::string check_name;
  if (cfg.command == "check-median-linearity") {
    rep = linearity::median_linearity_residual(prior, cfg.a, cfg.y_grid.materialize(), tol);
    check_name = "median-linearity-verdict";
  } else if (cfg.command == "check-lp-linearity") {
    rep = linearity::lp_linearity_residual(prior, cfg.a, cfg.p, cfg.y_grid.materialize(), tol);
    check_name = "lp-linearity-verdict";
  } else {
    rep = linearity::convolution_residual(prior, cfg.a, cfg.y_grid.materialize(), tol);
    check_name = "convolution-verdict";
  }

  csv.header = {"y", "residual"};
  for (std::size_t i = 0; i < rep.y.size(); ++i) {
    csv.rows.push_back({rep.y[i], rep.residual[i]});
  }
  sum.doc["a"] = rep.a;
  sum.doc["p"] = rep.p;
  sum.doc["sup_norm"] = rep.sup_norm;
  sum.doc["tolerance"] = rep.tolerance;
  sum.doc["linear"] = rep.linear;
  sum.doc["expected_linear"] = expect;
  sum.check(check_name, rep.linear == expect, rep.sup_norm, tol);
}

void run_operator_gabor(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  linearity::GaborParams params;
  bool null_member = false;
  if (cfg.extra.contains("null_member")) {
    const auto& nm = cfg.extra["null_member"];
    if (!nm.contains("zero") || !nm["zero"].is_array() || nm["zero"].size() != 2) {
      config_error("null_member needs 'zero': [re, im]");
    }
    params = linearity::gabor_null_member(
        cfg.a, {nm["zero"][0].get<double>(), nm["zero"][1].get<double>()});
    null_member = true;
  } else if (cfg.extra.contains("params")) {
    const auto& pj = cfg.extra["params"];
    params.mu = require_num(pj, "mu");
    params.sigma2 = require_num(pj, "sigma2");
    params.omega = require_num(pj, "omega");
  } else {
    config_error("operator-gabor needs 'params' or 'null_member'");
  }

  const double sigma = std::sqrt(std::abs(params.sigma2));
  const double tol = tol_or(cfg, "agreement", 1e-7);
  const auto ys = cfg.y_grid.materialize();

  csv.header = {"y", "numeric_re", "numeric_im", "closed_re", "closed_im", "abs_diff"};
  double max_diff = 0.0, sup_null = 0.0;
  for (double y : ys) {
    const double lo = std::min(params.mu - 8.5 * sigma, y - 9.0);
    const double hi = std::max(params.mu + 8.5 * sigma, y + 9.0);
    const double panel = std::min(0.25, 1.5 / std::max(1.0, std::abs(params.omega)));
    const auto numeric = linearity::apply_ta(
        [&](double x) { return linearity::gabor_wavelet(params, x); }, lo, hi, cfg.a, y,
        panel);
    const auto closed = linearity::gabor_closed_form(params, cfg.a, y);
    const double diff = std::abs(numeric - closed);
    max_diff = std::max(max_diff, diff);
    sup_null = std::max(sup_null, std::abs(numeric));
    csv.rows.push_back(
        {y, numeric.real(), numeric.imag(), closed.real(), closed.imag(), diff});
  }
  sum.doc["mu"] = params.mu;
  sum.doc["sigma2"] = params.sigma2;
  sum.doc["omega"] = params.omega;
  sum.doc["a"] = cfg.a;
  sum.doc["max_abs_diff"] = max_diff;
  sum.check("gabor-closed-form-agreement", max_diff <= tol, max_diff, tol);
  if (null_member) {
    const double tol_null = tol_or(cfg, "null_space", 1e-7);
    sum.doc["sup_abs_ta"] = sup_null;
    sum.check("gabor-null-space", sup_null <= tol_null, sup_null, tol_null);
  }
}

void run_fp_roots(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  const double w_max = cfg.extra.value("w_max", 20.0);
  const RootSet roots = linearity::fp_roots(cfg.p, w_max);

  csv.header = {"root", "bracket_lo", "bracket_hi", "residual"};
  ordered root_list = ordered::array();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    csv.rows.push_back(
        {roots.roots[i], roots.brackets[i][0], roots.brackets[i][1], roots.residuals[i]});
    root_list.push_back(roots.roots[i]);
  }
  const int expected = (cfg.p <= 2.0) ? 0 : static_cast<int>(std::ceil(cfg.p / 2.0)) - 1;
  sum.doc["p"] = cfg.p;
  sum.doc["w_max"] = w_max;
  sum.doc["roots"] = root_list;
  sum.check("fp-root-count", static_cast<int>(roots.size()) == expected,
            static_cast<double>(roots.size()), static_cast<double>(expected));

  if (cfg.extra.contains("expected_roots")) {
    const auto expect = cfg.extra["expected_roots"].get<std::vector<double>>();
    double worst = (expect.size() == roots.size()) ? 0.0 : 1e300;
    for (std::size_t i = 0; i < expect.size() && i < roots.size(); ++i) {
      worst = std::max(worst, std::abs(expect[i] - roots.roots[i]));
    }
    const double tol = tol_or(cfg, "root_values", 1e-8);
    sum.check("fp-root-values", worst <= tol, worst, tol);
  }
}

void run_fp_ode_check(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  GridSpec spec{0.5, 5.0, 46};
  if (cfg.extra.contains("w_grid")) {
    const auto& g = cfg.extra["w_grid"];
    spec.min = require_num(g, "min");
    spec.max = require_num(g, "max");
    spec.count = static_cast<int>(get_num(g, "count", 46));
  }
  const double tol = tol_or(cfg, "residual", 1e-5);
  csv.header = {"w", "residual"};
  double worst = 0.0;
  for (double w : spec.materialize()) {
    const double r = linearity::fp_ode_residual(cfg.p, {w});
    worst = std::max(worst, r);
    csv.rows.push_back({w, r});
  }
  sum.doc["p"] = cfg.p;
  sum.doc["max_residual"] = worst;
  sum.check("fp-ode-residual", worst <= tol, worst, tol);
}

void run_dawson_check(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  GridSpec spec{0.25, 8.0, 32};
  if (cfg.extra.contains("w_grid")) {
    const auto& g = cfg.extra["w_grid"];
    spec.min = require_num(g, "min");
    spec.max = require_num(g, "max");
    spec.count = static_cast<int>(get_num(g, "count", 32));
  }
  const double tol = tol_or(cfg, "deviation", 1e-8);
  csv.header = {"w", "deviation"};
  double worst = 0.0;
  for (double w : spec.materialize()) {
    const double dev = linearity::dawson_fourier_check({w});
    worst = std::max(worst, dev);
    csv.rows.push_back({w, dev});
  }
  sum.doc["max_deviation"] = worst;
  sum.check("dawson-fourier-identity", worst <= tol, worst, tol);
}

void run_risk_scan(const ExperimentConfig& cfg, const RunOptions& opts, CsvTable& csv,
                   Summary& sum) {
  const auto& prior = require_prior(cfg);
  GridSpec spec{-0.5, 1.5, 41};
  if (cfg.extra.contains("a_grid")) {
    const auto& g = cfg.extra["a_grid"];
    spec.min = require_num(g, "min");
    spec.max = require_num(g, "max");
    spec.count = static_cast<int>(get_num(g, "count", 41));
  }
  const std::string method = cfg.extra.value("method", std::string("quadrature"));
  const bool want_mc = (method == "monte-carlo" || method == "both");
  const bool want_quad = (method == "quadrature" || method == "both");
  if (!want_mc && !want_quad) config_error("method must be quadrature | monte-carlo | both");

  std::optional<std::uint64_t> seed = opts.seed_override ? opts.seed_override : cfg.seed;
  if (want_mc && !seed) config_error("monte-carlo risk scans require an explicit seed");
  const std::uint64_t samples =
      static_cast<std::uint64_t>(cfg.extra.value("samples", 1000000.0));

  const auto a_grid = spec.materialize();
  risk::RiskCurve quad_curve, mc_curve;
  if (want_quad) quad_curve = risk::risk_scan(prior, cfg.p, a_grid, risk::Quadrature{});
  if (want_mc) {
    mc_curve = risk::risk_scan(prior, cfg.p, a_grid,
                               risk::MonteCarlo{samples, *seed}, opts.jobs);
  }

  if (want_quad && want_mc) {
    csv.header = {"a", "risk_quadrature", "risk_mc", "stderr_mc"};
  } else if (want_quad) {
    csv.header = {"a", "risk"};
  } else {
    csv.header = {"a", "risk", "stderr"};
  }
  double worst_sigma = 0.0;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (want_quad && want_mc) {
      csv.rows.push_back({a_grid[i], quad_curve.value[i], mc_curve.value[i],
                          mc_curve.stderr_est[i]});
      const double se = std::max(mc_curve.stderr_est[i], 1e-300);
      worst_sigma =
          std::max(worst_sigma, std::abs(quad_curve.value[i] - mc_curve.value[i]) / se);
    } else if (want_quad) {
      csv.rows.push_back({a_grid[i], quad_curve.value[i]});
    } else {
      csv.rows.push_back({a_grid[i], mc_curve.value[i], mc_curve.stderr_est[i]});
    }
  }

  const risk::RiskCurve& main_curve = want_quad ? quad_curve : mc_curve;
  const std::size_t imin = risk::argmin(main_curve);
  const double a_min = main_curve.a[imin];
  sum.doc["p"] = cfg.p;
  sum.doc["method"] = method;
  if (want_mc) {
    sum.doc["samples"] = samples;
    sum.doc["seed"] = *seed;
  }
  sum.doc["argmin_a"] = a_min;
  sum.check("risk-argmin-admissible", a_min >= 0.0 && a_min < 1.0, a_min, 1.0);
  const double slack = want_quad && !want_mc ? 1e-9 : 0.0;
  sum.check("risk-monotone-shape", risk::admissible_shape(main_curve, slack), 0.0, 0.0);
  if (want_quad && want_mc) {
    sum.check("risk-mc-agreement-3sigma", worst_sigma <= 3.0, worst_sigma, 3.0);
  }
}

void run_poisson_demo(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum,
                      const fs::path& base_dir) {
  const double alpha = cfg.extra.value("alpha", 1.0);
  const double beta = cfg.extra.value("beta", 1.0);
  if (!(alpha > 0.0) || !(beta > 0.0)) config_error("poisson-demo needs alpha, beta > 0");
  const int y_max = static_cast<int>(cfg.extra.value("y_max", 20.0));
  const models::Prior prior = models::GammaPrior{alpha, beta};

  csv.header = {"y", "mean", "median", "difference"};
  std::vector<double> medians, diffs;
  for (int y = 0; y <= y_max; ++y) {
    const auto post =
        posterior::compute_posterior(prior, models::PoissonNoise{}, static_cast<double>(y));
    const double mean = (alpha + y) / (beta + 1.0);
    const double median = posterior::cond_median(post);
    medians.push_back(median);
    diffs.push_back(median - mean);
    csv.rows.push_back({static_cast<double>(y), mean, median, median - mean});
  }
  sum.doc["alpha"] = alpha;
  sum.doc["beta"] = beta;

  if (cfg.extra.contains("fixture")) {
    fs::path fixture_path = cfg.extra["fixture"].get<std::string>();
    if (fixture_path.is_relative()) fixture_path = base_dir / fixture_path;
    std::ifstream in(fixture_path);
    if (!in) config_error("cannot open fixture " + fixture_path.string());
    json fx = json::parse(in);
    const auto expected = fx.at("median").get<std::vector<double>>();
    const double tol = tol_or(cfg, "median", 1e-6);
    double worst = 0.0;
    for (std::size_t i = 0; i < expected.size() && i < medians.size(); ++i) {
      worst = std::max(worst, std::abs(expected[i] - medians[i]));
    }
    if (expected.size() > medians.size()) worst = 1e300;
    sum.doc["max_median_deviation"] = worst;
    sum.check("poisson-median-fixture", worst <= tol, worst, tol);

    if (fx.contains("difference_range")) {
      const double lo = fx["difference_range"][0].get<double>();
      const double hi = fx["difference_range"][1].get<double>();
      bool in_range = true;
      for (double d : diffs) in_range = in_range && d >= lo && d <= hi;
      sum.check("poisson-difference-range", in_range, 0.0, 0.0);
    }
  }
}

void run_counterexample_density(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum,
                                const fs::path& base_dir) {
  json sets = json::array();
  if (cfg.extra.contains("sets")) {
    sets = cfg.extra["sets"];
  } else if (cfg.extra.contains("fixture")) {
    fs::path fixture_path = cfg.extra["fixture"].get<std::string>();
    if (fixture_path.is_relative()) fixture_path = base_dir / fixture_path;
    std::ifstream in(fixture_path);
    if (!in) config_error("cannot open fixture " + fixture_path.string());
    sets = json::parse(in).at("sets");
  } else {
    config_error("counterexample-density needs 'sets' or 'fixture'");
  }
  if (!sets.is_array() || sets.empty()) config_error("'sets' must be a non-empty array");

  const int nodes = static_cast<int>(cfg.extra.value("nodes", 1001.0));
  const double var_tol = tol_or(cfg, "variance", 1e-6);
  csv.header = {"set", "x", "density"};
  ordered set_info = ordered::array();
  double worst_var = 0.0;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    models::CounterexampleParams params;
    params.a = require_num(sets[si], "a");
    params.rho = require_num(sets[si], "rho");
    params.theta = get_num(sets[si], "theta", 0.0);
    params.omega = require_num(sets[si], "omega");
    const auto prior = models::counterexample_prior(params, nodes);
    for (std::size_t i = 0; i < prior.x.size(); ++i) {
      csv.rows.push_back({static_cast<double>(si), prior.x[i], prior.pdf[i]});
    }
    const auto mom = models::prior_moments(models::Prior(prior));
    ordered info;
    info["a"] = params.a;
    info["rho"] = params.rho;
    info["theta"] = params.theta;
    info["omega"] = params.omega;
    info["mean"] = mom.mean;
    info["variance"] = mom.variance;
    if (params.theta == 0.0) {
      // variance of exp(-(1-a)x^2/(2a)) (1 + rho cos(omega x / sqrt(a)))
      const double s2 = params.a / (1.0 - params.a);
      const double e = std::exp(-params.omega * params.omega / (2.0 * (1.0 - params.a)));
      const double formula =
          s2 * (1.0 + (1.0 - params.omega * params.omega / (1.0 - params.a)) * params.rho * e) /
          (1.0 + params.rho * e);
      info["variance_formula"] = formula;
      worst_var = std::max(worst_var, std::abs(mom.variance - formula));
    }
    set_info.push_back(info);
  }
  sum.doc["sets"] = set_info;
  sum.doc["max_variance_deviation"] = worst_var;
  sum.check("counterexample-variance", worst_var <= var_tol, worst_var, var_tol);
}

void run_symmetry_check(const ExperimentConfig& cfg, CsvTable& csv, Summary& sum) {
  const auto& prior = require_prior(cfg);
  const bool expect_symmetric = cfg.extra.value("expect_symmetric", true);
  const double route_tol = tol_or(cfg, "route_agreement", 1e-4);

  csv.header = {"y", "kappa3", "kappa3_logfd", "abs_diff"};
  double max_k3 = 0.0, worst_route = 0.0;
  for (double y : cfg.y_grid.materialize()) {
    const double k3 = posterior::posterior_third_cumulant(prior, y);
    const double k3_fd = posterior::third_cumulant_logfd(prior, y);
    max_k3 = std::max(max_k3, std::abs(k3));
    worst_route = std::max(worst_route, std::abs(k3 - k3_fd));
    csv.rows.push_back({y, k3, k3_fd, std::abs(k3 - k3_fd)});
  }
  sum.doc["max_abs_kappa3"] = max_k3;
  sum.doc["expect_symmetric"] = expect_symmetric;
  sum.check("kappa3-route-agreement", worst_route <= route_tol, worst_route, route_tol);
  if (expect_symmetric) {
    const double tol = tol_or(cfg, "kappa3", 1e-6);
    sum.check("kappa3-symmetric", max_k3 <= tol, max_k3, tol);
  } else {
    const double floor = tol_or(cfg, "kappa3_min", 1e-3);
    sum.check("kappa3-asymmetric", max_k3 >= floor, max_k3, floor);
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  fs::path out_dir = opts.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("LPLAB_OUT_DIR");
    out_dir = (env && *env) ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  const fs::path base_dir = cfg.extra.value("base_dir", std::string("."));

  CsvTable csv;
  Summary sum(cfg.command);
  RunResult result;

  try {
    if (cfg.command == "estimate") {
      run_estimate(cfg, csv, sum);
    } else if (cfg.command == "check-median-linearity" ||
               cfg.command == "check-lp-linearity" || cfg.command == "convolution-check") {
      run_linearity_check(cfg, csv, sum);
    } else if (cfg.command == "operator-gabor") {
      run_operator_gabor(cfg, csv, sum);
    } else if (cfg.command == "fp-roots") {
      run_fp_roots(cfg, csv, sum);
    } else if (cfg.command == "fp-ode-check") {
      run_fp_ode_check(cfg, csv, sum);
    } else if (cfg.command == "dawson-check") {
      run_dawson_check(cfg, csv, sum);
    } else if (cfg.command == "risk-scan") {
      run_risk_scan(cfg, opts, csv, sum);
    } else if (cfg.command == "poisson-demo") {
      run_poisson_demo(cfg, csv, sum, base_dir);
    } else if (cfg.command == "counterexample-density") {
      run_counterexample_density(cfg, csv, sum, base_dir);
    } else if (cfg.command == "symmetry-check") {
      run_symmetry_check(cfg, csv, sum);
    } else {
      config_error("unknown command '" + cfg.command + "'");
    }
  } catch (const std::invalid_argument&) {
    throw;  // config problem: usage error, no artifacts
  } catch (const std::exception& e) {
    // run-level failure: record it as a failed check so the summary names it
    sum.doc["error"] = e.what();
    sum.check("exception", false, 0.0, 0.0);
  }

  sum.finalize();
  if (!csv.header.empty()) {
    result.csv_path = out_dir / (cfg.out_stem + ".csv");
    atomic_write(result.csv_path, csv.render());
    sum.doc["outputs"]["csv"] = result.csv_path.filename().string();
  }
  if (std::getenv("LPLAB_TIMINGS")) {
    // timings are opt-in so default artifacts stay byte-reproducible
    sum.doc["timings"] = ordered::object();
  }
  result.json_path = out_dir / (cfg.out_stem + ".json");
  atomic_write(result.json_path, sum.doc.dump(2) + "\n");
  result.status = sum.ok ? kStatusOk : kStatusFailed;
  return result;
}

int run_from_file(const fs::path& config_path, const RunOptions& opts) {
  json doc;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config %s\n", config_path.string().c_str());
      return kStatusUsage;
    }
    doc = json::parse(in);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStatusUsage;
  }

  try {
    ExperimentConfig cfg = parse_config(doc);
    if (!cfg.extra.contains("base_dir")) {
      cfg.extra["base_dir"] = config_path.parent_path().string().empty()
                                  ? std::string(".")
                                  : config_path.parent_path().string();
    }
    const RunResult r = run_experiment(cfg, opts);
    return r.status;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStatusUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStatusFailed;
  }
}

}  // namespace lplab::cli
