import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from geosensor.errors import AllZeroResponse, DesignError, SeparationError, SingularInformation
from geosensor.glm import (
    ConvergenceWarning,
    design_matrix,
    fit_poisson,
    fit_poisson_xy,
    pct_change,
    poisson_loglik,
    poisson_score,
    stars,
    summarize,
    summary_csv,
    summary_rows,
)
from geosensor.linkage import RegionPanel

from glm_oracle import newton_mle


def assert_canonical(fit, y, covariates):
    """Score is zero on the original scale and fitted totals match observed.

    The absolute 1e-6 bound needs covariates below ~1e7: past that, rounding
    in y - mu alone (~1e-15 * mu per row) times the covariate exceeds it.
    """
    y = np.asarray(y, dtype=float)
    X = np.column_stack([np.ones(len(y)), np.asarray(covariates, dtype=float).reshape(len(y), -1)])
    mu = np.exp(X @ fit.beta)
    assert np.max(np.abs(X.T @ (y - mu))) < 1e-6
    assert abs(mu.sum() - y.sum()) <= 1e-6 * y.sum()
    assert_allclose(mu, fit.fitted, rtol=1e-9)


def synthetic(n=500, seed=20240501, beta=(1.0, 0.5, -0.3)):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, 2))
    y = rng.poisson(np.exp(beta[0] + Z @ np.array(beta[1:])))
    return y, Z


def test_intercept_only_is_log_mean():
    fit = fit_poisson_xy([1, 2, 3], np.zeros((3, 0)))
    assert abs(fit.beta[0] - math.log(2)) < 1e-8
    assert fit.converged
    assert_canonical(fit, [1, 2, 3], np.zeros((3, 0)))


def test_saturated_two_point():
    fit = fit_poisson_xy([2, 4], [[0.0], [1.0]])
    assert_allclose(fit.beta, [math.log(2), math.log(2)], atol=1e-8)
    assert fit.deviance < 1e-10
    assert_canonical(fit, [2, 4], [[0.0], [1.0]])


def test_matches_independent_oracle_and_truth():
    y, Z = synthetic()
    fit = fit_poisson_xy(y, Z)
    assert fit.converged
    assert_allclose(fit.beta, newton_mle(y.tolist(), Z.tolist()), atol=1e-6, rtol=0)
    assert np.all(np.abs(fit.beta - np.array([1.0, 0.5, -0.3])) < 3 * fit.se)
    assert_canonical(fit, y, Z)


def test_matches_statsmodels():
    sm = pytest.importorskip("statsmodels.api")
    y, Z = synthetic(n=200, seed=7)
    Z = Z * [1e5, 3.0] + [2e5, 10.0]
    fit = fit_poisson_xy(y, Z)
    ref = sm.GLM(y, sm.add_constant(Z), family=sm.families.Poisson()).fit(tol=1e-14)
    assert_allclose(fit.beta, ref.params, rtol=1e-6)
    assert_allclose(fit.se, ref.bse, rtol=1e-6)
    assert_allclose(fit.deviance, ref.deviance, rtol=1e-8)
    assert_canonical(fit, y, Z)


def test_wald_and_pct_change_consistent():
    y, Z = synthetic(n=120, seed=3)
    fit = fit_poisson_xy(y, Z)
    assert_allclose(fit.z, fit.beta / fit.se)
    assert_allclose(fit.p, [math.erfc(abs(z) / math.sqrt(2)) for z in fit.z])
    assert_allclose(fit.sds, Z.std(axis=0, ddof=1))
    assert_allclose(fit.pct_change, 100 * np.expm1(fit.beta[1:] * fit.sds))
    assert np.all(fit.se > 0)
    assert np.all(np.linalg.eigvalsh(np.linalg.inv(fit.cov)) > 0)
    assert_canonical(fit, y, Z)


def test_rescaling_invariance():
    rng = np.random.default_rng(11)
    # US-state-sized case counts; x1e3 keeps the raw score above its rounding floor (see assert_canonical)
    burden = rng.uniform(10, 5000, 60)
    papers = rng.integers(1, 500, 60).astype(float)
    y = rng.poisson(np.exp(1.5 + 2e-4 * burden + 1e-3 * papers))
    a = fit_poisson_xy(y, np.column_stack([burden, papers]))
    b = fit_poisson_xy(y, np.column_stack([burden * 1e3, papers]))
    assert_allclose(b.beta[1], a.beta[1] * 1e-3, rtol=1e-8)
    assert_allclose(b.se[1], a.se[1] * 1e-3, rtol=1e-8)
    assert_allclose(b.beta[[0, 2]], a.beta[[0, 2]], rtol=1e-8)
    for attr in ("z", "p", "pct_change"):
        assert_allclose(getattr(b, attr), getattr(a, attr), rtol=1e-8)
    assert_allclose(b.deviance, a.deviance, rtol=1e-8)
    assert_canonical(a, y, np.column_stack([burden, papers]))
    assert_canonical(b, y, np.column_stack([burden * 1e3, papers]))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_score_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    y, Z = synthetic(n=50, seed=seed % 1000)
    X = np.column_stack([np.ones(len(y)), Z])
    beta = rng.normal(0, 0.5, 3)
    h = 1e-5
    fd = np.array([
        (poisson_loglik(beta + h * e, X, y) - poisson_loglik(beta - h * e, X, y)) / (2 * h)
        for e in np.eye(3)
    ])
    assert_allclose(poisson_score(beta, X, y), fd, rtol=1e-4, atol=1e-6)


def test_pct_change_values():
    assert pct_change(0.0, 123.0) == 0.0
    assert round(pct_change(math.log(1.079) / 2.5, 2.5), 1) == 7.9
    assert pct_change(0.001, 1000) == pytest.approx(100 * (math.e - 1), rel=1e-12)
    with pytest.raises(ValueError):
        pct_change(1.0, 0.0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 10))
def test_pct_change_monotone_with_sign_of_beta(b1, b2, sd):
    lo, hi = sorted((b1, b2))
    assert pct_change(lo, sd) <= pct_change(hi, sd)
    assert math.copysign(1, pct_change(b1, sd)) == math.copysign(1, b1) or pct_change(b1, sd) == 0


def test_degenerate_inputs():
    with pytest.raises(AllZeroResponse):
        fit_poisson_xy([0, 0, 0], np.zeros((3, 0)))
    assert issubclass(AllZeroResponse, SeparationError)
    with pytest.raises(DesignError):
        fit_poisson_xy([1, 2, 3], [[1.0], [1.0], [1.0]])
    with pytest.raises(DesignError):
        fit_poisson_xy([1, 2], [[1.0, 2.0], [3.0, 5.0]])
    with pytest.raises(DesignError):
        fit_poisson_xy([1, 2, 3], [[1.0], [np.nan], [2.0]])
    x = np.arange(6.0)
    with pytest.raises(SingularInformation):
        fit_poisson_xy([1, 2, 3, 4, 5, 6], np.column_stack([x, 2 * x + 1]))


def test_separation_reported_as_non_convergence():
    with pytest.warns(ConvergenceWarning):
        fit = fit_poisson_xy([0, 0, 0, 5, 6, 7], [[0.0], [0.0], [0.0], [1.0], [1.0], [1.0]])
    assert not fit.converged
    assert "separated" in fit.diagnostic


def test_iteration_cap():
    y, Z = synthetic(n=80, seed=5)
    with pytest.warns(ConvergenceWarning):
        fit = fit_poisson_xy(y, Z, max_iter=1)
    assert not fit.converged and fit.iterations == 1


def test_fit_poisson_on_panel():
    rows = [RegionPanel(c, t, b, p) for c, t, b, p in
            [("A", 3, 10.0, 5), ("B", 9, 40.0, 2), ("C", 4, 15.0, 30), ("D", 20, 90.0, 12), ("E", 1, 5.0, 1)]]
    fit = fit_poisson(rows, labels=("Cases", "Papers"))
    assert fit.n == 5 and fit.labels == ("Cases", "Papers")
    assert_canonical(fit, [r.tweets for r in rows], [[r.burden, r.papers] for r in rows])
    with pytest.raises(DesignError):
        fit_poisson(rows[:3])
    with pytest.raises(DesignError):
        fit_poisson([])


def test_stars():
    assert [stars(p) for p in (0.0005, 0.005, 0.03, 0.2)] == ["***", "**", "*", ""]


def test_summary_table_layout():
    y, Z = synthetic(n=44, seed=1)
    fit = fit_poisson_xy(np.asarray(y), np.abs(Z) * [1e4, 10.0], labels=("Number of HIV cases", "Number of papers"))
    rows = summary_rows(fit)
    assert [r["label"] for r in rows] == ["Number of HIV cases", "Number of papers", "Constant"]
    assert rows[-1]["pct_change"] == ""
    assert rows[0]["coefficient"].rstrip("*") == f"{fit.beta[1]:.2e}"
    assert rows[0]["pct_change"] == f"{fit.pct_change[0]:.1f}"
    text = summarize(fit, region_kind="us-state")
    assert "n=44 US states" in text
    assert "*** p < .001" in text
    lines = summary_csv(fit, region_kind="us-state").splitlines()
    assert lines[0].startswith("label,coefficient,std_error")
    assert len(lines) == 4
