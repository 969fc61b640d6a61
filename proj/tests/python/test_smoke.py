"""Smoke tests for the python bindings: a thin pass over each operation group."""

import math

import pytest

import lplab


def linspace(lo, hi, n):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def test_special_functions():
    pdf, cdf = lplab.std_normal(0.0)
    assert abs(pdf - 0.3989422804014327) < 1e-15
    assert cdf == 0.5
    assert abs(lplab.dawson(1.0) - 0.5380795069127684) < 1e-13
    assert abs(lplab.erf_complex(1.4506161632 + 1.8809430002j)) <= 1e-8
    assert abs(lplab.inv_lower_gamma(11.0, 0.5) / 2.0 - 5.33426120191816) <= 1e-9
    zeros = lplab.hermite_zeros(3)
    assert [round(z, 10) for z in zeros.roots] == [
        round(-math.sqrt(3.0), 10),
        0.0,
        round(math.sqrt(3.0), 10),
    ]


def test_matched_prior_median_is_linear():
    prior = lplab.Prior.matched_gaussian(0.5)
    noise = lplab.Noise.gaussian()
    ys, values = lplab.estimator_curve(prior, noise, linspace(-4, 4, 17), kind="median")
    assert max(abs(v - 0.5 * y) for y, v in zip(ys, values)) <= 1e-6

    report = lplab.median_linearity_residual(prior, 0.5, linspace(-4, 4, 17))
    assert report.linear
    assert report.sup_norm <= 1e-8


def test_poisson_gamma_near_miss():
    prior = lplab.Prior.gamma(1.0, 1.0)
    noise = lplab.Noise.poisson()
    post = lplab.posterior(prior, noise, 10.0)
    assert abs(post.median() - 5.33426120191816) <= 1e-6
    assert abs(post.mean() - 5.5) <= 1e-6


def test_l4_counterexample():
    prior = lplab.Prior.counterexample(a=0.5, rho=1.0, theta=0.0, omega=math.sqrt(3.0))
    noise = lplab.Noise.gaussian()
    post = lplab.posterior(prior, noise, 1.0)
    assert abs(post.lp_estimator(4.0) - 0.5) <= 2e-4
    # but the median is not linear for this prior
    report = lplab.median_linearity_residual(prior, 0.5, linspace(-3, 3, 13))
    assert not report.linear


def test_fp_roots_and_gabor():
    roots = lplab.fp_roots(4.0, 20.0)
    assert len(roots) == 1
    assert abs(roots.roots[0] - math.sqrt(6.0)) <= 1e-8
    assert len(lplab.fp_roots(1.5, 20.0)) == 0

    params = lplab.gabor_null_member(0.5, 1.4506161632 + 1.8809430002j)
    for y in (-2.0, 0.0, 2.0):
        assert abs(lplab.gabor_closed_form(params, 0.5, y)) <= 1e-7
        assert abs(lplab.apply_ta_gabor(params, 0.5, y)) <= 1e-7


def test_risk_scan_and_mc_determinism():
    prior = lplab.Prior.gaussian(0.0, 1.0)
    a_grid = linspace(-0.5, 1.5, 21)
    a, values, _ = lplab.risk_scan(prior, 2.0, a_grid)
    i_min = values.index(min(values))
    assert abs(a[i_min] - 0.5) <= 0.05 + 1e-12

    v1, se1 = lplab.bayes_risk(prior, 0.4, 1.0, method="monte-carlo", samples=50000, seed=9)
    v2, se2 = lplab.bayes_risk(prior, 0.4, 1.0, method="monte-carlo", samples=50000, seed=9, jobs=4)
    assert v1 == v2 and se1 == se2
    with pytest.raises(ValueError):
        lplab.bayes_risk(prior, 0.4, 1.0, method="monte-carlo")


def test_error_mapping():
    with pytest.raises(ValueError):
        lplab.Prior.matched_gaussian(1.0)
    with pytest.raises(RuntimeError):
        lplab.posterior(lplab.Prior.gaussian(0.0, 1.0), lplab.Noise.poisson(), 1.0)
