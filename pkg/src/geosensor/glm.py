"""Poisson regression (log link) by iteratively reweighted least squares.

Covariates are centered and scaled by their sample SD before fitting,
because raw burden columns (~1e6 cases) next to coefficients of ~1e-7
make the information matrix badly conditioned. Coefficients, standard
errors and the covariance are mapped back to the original scale, so the
reported inference does not depend on the scaling.

Effects are summarized as percentage changes in the expected count for a
one-SD increase of a covariate, ``100 * (exp(beta * sd) - 1)``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroResponse, DesignError, SeparationError, SingularInformation

MAX_ITER = 50
DEVIANCE_TOL = 1e-10
SCORE_TOL = 1e-8
POLISH_STEPS = 3
SEPARATION_MU = 1e-7
# exp() overflows just above 709
_ETA_MAX = 700.0

DEFAULT_LABELS = ("Number of cases", "Number of papers")


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DesignMatrix:
    """Intercept column plus ``k`` covariates, with their sample moments."""

    X: np.ndarray
    labels: tuple[str, ...]
    means: np.ndarray
    sds: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1] - 1

    def standardized(self) -> np.ndarray:
        Z = self.X.copy()
        Z[:, 1:] = (self.X[:, 1:] - self.means) / self.sds
        return Z


def design_matrix(covariates, labels=None) -> DesignMatrix:
    C = np.asarray(covariates, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if C.ndim != 2:
        raise DesignError("covariates must be a 2-d array")
    n, k = C.shape
    if labels is None:
        labels = tuple(f"x{j + 1}" for j in range(k))
    labels = tuple(labels)
    if len(labels) != k:
        raise DesignError(f"{k} covariate(s) but {len(labels)} label(s)")
    if not np.all(np.isfinite(C)):
        raise DesignError("covariates contain non-finite values")
    if n <= k:
        raise DesignError(f"need more rows than covariates (n={n}, k={k})")
    means = C.mean(axis=0) if k else np.zeros(0)
    sds = C.std(axis=0, ddof=1) if k and n > 1 else np.zeros(k)
    constant = [labels[j] for j in range(k) if not sds[j] > 0]
    if constant:
        raise DesignError(f"constant covariate column(s): {', '.join(constant)}")
    X = np.column_stack([np.ones(n), C]) if k else np.ones((n, 1))
    return DesignMatrix(X, labels, means, sds)


def poisson_loglik(beta, X, y) -> float:
    eta = X @ beta
    y = np.asarray(y, dtype=float)
    return float(np.sum(y * eta - np.exp(eta)) - sum(math.lgamma(v + 1.0) for v in y))


def poisson_score(beta, X, y) -> np.ndarray:
    return X.T @ (np.asarray(y, dtype=float) - np.exp(X @ beta))


def poisson_deviance(y, mu) -> float:
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ylogy = np.where(y > 0, y * np.log(y / mu), 0.0)
    # each term is >= 0; the clamp removes rounding noise at a saturated fit
    return max(float(2.0 * np.sum(ylogy - (y - mu))), 0.0)


def pct_change(beta: float, sd: float) -> float:
    """Percentage change in the expected count per one-SD increase."""
    if not sd > 0:
        raise ValueError("sd must be positive")
    return 100.0 * math.expm1(beta * sd)


@dataclass
class GlmFit:
    labels: tuple[str, ...]
    beta: np.ndarray
    se: np.ndarray
    z: np.ndarray
    p: np.ndarray
    loglik: float
    deviance: float
    iterations: int
    converged: bool
    pct_change: np.ndarray
    sds: np.ndarray
    n: int
    cov: np.ndarray = field(repr=False)
    fitted: np.ndarray = field(repr=False)
    max_score: float = 0.0
    diagnostic: str | None = None

    @property
    def k(self) -> int:
        return len(self.labels)

    def to_dict(self) -> dict:
        names = list(self.labels) + ["Constant"]
        order = list(range(1, self.k + 1)) + [0]
        return {
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
            "loglik": self.loglik,
            "deviance": self.deviance,
            "diagnostic": self.diagnostic,
            "coefficients": [
                {
                    "label": names[i],
                    "beta": float(self.beta[j]),
                    "se": float(self.se[j]),
                    "z": float(self.z[j]),
                    "p": float(self.p[j]),
                    "pct_change": float(self.pct_change[j - 1]) if j else None,
                    "sd": float(self.sds[j - 1]) if j else None,
                }
                for i, j in enumerate(order)
            ],
        }


def _cholesky(info):
    try:
        L = np.linalg.cholesky(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformation("information matrix is not positive definite "
                                  "(collinear covariates?)") from exc
    if np.min(np.diag(L)) ** 2 < 1e-12 * np.max(np.diag(info)):
        raise SingularInformation("information matrix is numerically singular")
    return L


def _chol_solve(L, b):
    return np.linalg.solve(L.T, np.linalg.solve(L, b))


def fit_design(y, design: DesignMatrix, max_iter: int = MAX_ITER) -> GlmFit:
    y = np.asarray(y, dtype=float)
    if y.shape != (design.n,):
        raise DesignError(f"response has shape {y.shape}, expected ({design.n},)")
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise DesignError("response must be finite nonnegative counts")
    if y.sum() <= 0:
        raise AllZeroResponse("all responses are zero; the intercept MLE is at -infinity")

    Z = design.standardized()
    b = np.zeros(Z.shape[1])
    b[0] = math.log(y.mean() + 1e-8)

    def evaluate(beta):
        eta = Z @ beta
        if np.max(eta) > _ETA_MAX:
            raise SeparationError(f"fitted means overflow (max linear predictor {np.max(eta):.1f})")
        mu = np.exp(eta)
        return mu, poisson_deviance(y, mu)

    mu, dev = evaluate(b)
    converged = False
    iterations = 0
    while iterations < max_iter:
        score = Z.T @ (y - mu)
        if np.max(np.abs(score)) < SCORE_TOL:
            converged = True
            break
        L = _cholesky(Z.T @ (mu[:, None] * Z))
        step = _chol_solve(L, score)
        iterations += 1
        # step halving keeps the deviance from increasing
        for _ in range(30):
            cand = b + step
            try:
                mu_new, dev_new = evaluate(cand)
            except SeparationError:
                dev_new = math.inf
            if dev_new <= dev + 1e-12 * max(1.0, abs(dev)):
                break
            step = step / 2.0
        else:
            raise SeparationError("step halving failed to reduce the deviance")
        b, mu, dev_prev, dev = cand, mu_new, dev, dev_new
        if abs(dev_prev - dev) < DEVIANCE_TOL:
            converged = True
            break

    # The deviance test can stop while the score is ~1e-9 on the standardized
    # scale, which is ~1e-4 once multiplied back by covariates of size 1e5.
    # A few full Newton steps near the optimum take it to rounding level.
    score = Z.T @ (y - mu)
    for _ in range(POLISH_STEPS if converged else 0):
        cand = b + _chol_solve(_cholesky(Z.T @ (mu[:, None] * Z)), score)
        mu_new = np.exp(Z @ cand)
        score_new = Z.T @ (y - mu_new)
        if not np.max(np.abs(score_new)) < np.max(np.abs(score)):
            break
        b, mu, score = cand, mu_new, score_new
        dev = poisson_deviance(y, mu)
    L = _cholesky(Z.T @ (mu[:, None] * Z))
    cov_std = _chol_solve(L, np.eye(len(b)))
    cov_std = (cov_std + cov_std.T) / 2.0

    # beta_orig = A @ beta_std
    k = design.k
    A = np.eye(k + 1)
    if k:
        A[1:, 1:] = np.diag(1.0 / design.sds)
        A[0, 1:] = -design.means / design.sds
    beta = A @ b
    cov = A @ cov_std @ A.T
    se = np.sqrt(np.diag(cov))
    z = beta / se
    p = np.array([math.erfc(abs(v) / math.sqrt(2.0)) for v in z])
    pct = np.array([pct_change(beta[j + 1], design.sds[j]) for j in range(k)])

    diagnostic = None
    # a zero cell fitted this close to 0 means the MLE ran off to infinity;
    # the score test stops separated fits with such cells below ~SCORE_TOL
    near_zero = (mu < SEPARATION_MU) & (y == 0)
    if np.any(near_zero):
        converged = False
        diagnostic = (f"{int(near_zero.sum())} fitted mean(s) collapsed to zero; "
                      "the data are (quasi-)separated and the MLE is not finite")
    elif not converged:
        diagnostic = f"no convergence after {max_iter} iterations"
    if diagnostic:
        warnings.warn(diagnostic, ConvergenceWarning, stacklevel=2)

    return GlmFit(
        labels=design.labels,
        beta=beta,
        se=se,
        z=z,
        p=p,
        loglik=poisson_loglik(b, Z, y),
        deviance=dev,
        iterations=iterations,
        converged=converged,
        pct_change=pct,
        sds=design.sds.copy(),
        n=design.n,
        cov=cov,
        fitted=mu,
        max_score=float(np.max(np.abs(score))),
        diagnostic=diagnostic,
    )


def fit_poisson_xy(y, covariates, labels=None, max_iter: int = MAX_ITER) -> GlmFit:
    return fit_design(y, design_matrix(covariates, labels), max_iter=max_iter)


def fit_poisson(panel, labels=DEFAULT_LABELS, max_iter: int = MAX_ITER) -> GlmFit:
    """Regress tweet counts on burden and paper counts for a region panel."""
    panel = list(panel)
    if not panel:
        raise DesignError("panel is empty")
    y = [r.tweets for r in panel]
    covariates = [[r.burden, r.papers] for r in panel]
    if len(panel) < 4:
        raise DesignError(f"need at least 4 regions for 2 covariates, got {len(panel)}")
    return fit_poisson_xy(y, covariates, labels, max_iter=max_iter)


# ---------------------------------------------------------------- reporting

REGION_NOUNS = {"country": "countries", "us-state": "US states"}
NOTE = "Notes. *** p < .001, ** p < .01, * p < .05"


def stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def _sci(x: float) -> str:
    return f"{x:.2e}"


def summary_rows(fit: GlmFit, labels=None):
    """Rows of (label, coefficient, se, pct_change) with the constant last."""
    labels = tuple(labels) if labels is not None else fit.labels
    rows = []
    for j in list(range(1, fit.k + 1)) + [0]:
        label = labels[j - 1] if j else "Constant"
        rows.append({
            "label": label,
            "coefficient": _sci(fit.beta[j]) + stars(fit.p[j]),
            "se": _sci(fit.se[j]),
            "z": f"{fit.z[j]:.3g}",
            "p": _sci(fit.p[j]),
            "pct_change": f"{fit.pct_change[j - 1]:.1f}" if j else "",
            "stars": stars(fit.p[j]),
        })
    return rows


def n_label(n: int, region_kind: str) -> str:
    return f"n={n} {REGION_NOUNS.get(region_kind, region_kind)}"


def summarize(fit: GlmFit, labels=None, region_kind: str = "country") -> str:
    """Aligned text table in the usual regression-table layout."""
    rows = summary_rows(fit, labels)
    head = ("Independent variable", "Coefficient", "Standard error", "Percentage change in expected count")
    body = [(r["label"], r["coefficient"], r["se"], r["pct_change"]) for r in rows]
    widths = [max(len(line[i]) for line in [head] + body) for i in range(3)]

    def fmt(line):
        return "  ".join(c.ljust(w) for c, w in zip(line[:3], widths)) + "  " + line[3]

    out = [
        f"Poisson regression, number of tweets as dependent variable ({n_label(fit.n, region_kind)})",
        fmt(head),
    ]
    out += [fmt(line).rstrip() for line in body]
    out.append(n_label(fit.n, region_kind))
    out.append(NOTE)
    if fit.diagnostic:
        out.append(f"Warning: {fit.diagnostic}")
    return "\n".join(out) + "\n"


def summary_csv(fit: GlmFit, labels=None, region_kind: str = "country") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "coefficient", "std_error", "z", "p", "pct_change", "stars", "n", "region_kind"])
    for r in summary_rows(fit, labels):
        writer.writerow([r["label"], r["coefficient"].rstrip("*"), r["se"], r["z"], r["p"],
                         r["pct_change"], r["stars"], fit.n, region_kind])
    return buf.getvalue()
