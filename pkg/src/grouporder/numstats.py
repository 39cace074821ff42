"""Covariances, standardization and block regressions.

All covariances use the unbiased divisor ``m - 1``. The ridge estimate is

    C = m * cov(Xi, Xj) @ inv(m * cov(Xj, Xj) + lam * I)

with that same covariance, i.e. ``lam`` acts as a diagonal loading of
``lam / m`` on ``cov(Xj, Xj)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DegenerateVariableError, SingularRegressorsError

COND_LIMIT = 1e12
DEGENERATE_SD = 1e-12


@dataclass(frozen=True)
class RegressionFit:
    """Result of regressing one block of rows on another.

    ``residuals == Xi - coefficients @ Xj - intercept[:, None]``; the
    intercept absorbs the means so that residual rows are centred.
    """

    coefficients: np.ndarray
    intercept: np.ndarray
    residuals: np.ndarray
    lam: float = 0.0


def _as_rows(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[None, :] if a.ndim == 1 else a


def sample_cov(a, b=None) -> np.ndarray:
    """Cross-covariance of the rows of ``a`` (p x m) and ``b`` (q x m)."""
    a = _as_rows(a)
    same = b is None or b is a
    b = a if same else _as_rows(b)
    m = a.shape[1]
    if m < 2:
        raise DataError("covariance needs at least two samples")
    if b.shape[1] != m:
        raise DataError(f"sample counts differ: {m} vs {b.shape[1]}")
    ac = a - a.mean(axis=1, keepdims=True)
    bc = ac if same else b - b.mean(axis=1, keepdims=True)
    cov = ac @ bc.T / (m - 1)
    if same:
        cov = (cov + cov.T) / 2
    return cov


def standardize(v) -> np.ndarray:
    """Zero mean, unit sample variance (divisor ``m - 1``)."""
    v = np.asarray(v, dtype=float)
    sd = v.std(ddof=1)
    if not sd > DEGENERATE_SD:
        raise DegenerateVariableError("cannot standardize a (near-)constant variable")
    return (v - v.mean()) / sd


def standardize_rows(a) -> np.ndarray:
    a = _as_rows(a)
    sd = a.std(axis=1, ddof=1, keepdims=True)
    if np.any(~(sd > DEGENERATE_SD)):
        raise DegenerateVariableError("cannot standardize a (near-)constant variable")
    return (a - a.mean(axis=1, keepdims=True)) / sd


def _fit(xi, xj, lam: float) -> RegressionFit:
    xi, xj = _as_rows(xi), _as_rows(xj)
    m = xj.shape[1]
    if xi.shape[1] != m:
        raise DataError(f"sample counts differ: {xi.shape[1]} vs {m}")
    cjj = sample_cov(xj)
    cij = sample_cov(xi, xj)
    if lam == 0.0:
        cond = np.linalg.cond(cjj)
        if not cond <= COND_LIMIT:
            raise SingularRegressorsError(
                f"regressor covariance has condition number {cond:.3g} > {COND_LIMIT:g}; "
                "use a positive ridge parameter"
            )
        coef = np.linalg.solve(cjj, cij.T).T
    else:
        coef = np.linalg.solve(m * cjj + lam * np.eye(cjj.shape[0]), m * cij.T).T
    intercept = xi.mean(axis=1) - coef @ xj.mean(axis=1)
    residuals = xi - coef @ xj - intercept[:, None]
    return RegressionFit(coef, intercept, residuals, float(lam))


def ols_fit(xi, xj) -> RegressionFit:
    """Least-squares regression of the rows of ``xi`` on the rows of ``xj``.

    Raises :class:`SingularRegressorsError` when ``cov(xj, xj)`` has a condition
    number above ``1e12``.
    """
    return _fit(xi, xj, 0.0)


def ridge_fit(xi, xj, lam: float) -> RegressionFit:
    if not lam > 0:
        raise ValueError(f"ridge parameter must be positive, got {lam}; use ols_fit for 0")
    return _fit(xi, xj, float(lam))


def regress(xi, xj, lam: float = 0.0) -> RegressionFit:
    """OLS for ``lam == 0``, ridge otherwise."""
    return ols_fit(xi, xj) if lam == 0 else ridge_fit(xi, xj, lam)


def default_lambda_grid(xj, n_values: int = 10) -> np.ndarray:
    """Log-spaced ridge parameters, scale-aware.

    The diagonal loading ``lam / m`` spans ``[1e-4, 1] * tr(cov) / n``.
    """
    xj = _as_rows(xj)
    n, m = xj.shape
    scale = np.trace(sample_cov(xj)) / n
    if not scale > 0:
        raise DegenerateVariableError("regressors have zero variance")
    return m * scale * np.logspace(-4, 0, n_values)


def _gaussian_loglik(cov: np.ndarray, centred: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        return -np.inf
    quad = np.einsum("ij,ij->", centred, np.linalg.solve(cov, centred))
    n, m = centred.shape
    return -0.5 * (m * (logdet + n * np.log(2 * np.pi)) + quad)


def cv_lambda_scores(xj, grid: Sequence[float], folds: int = 10, seed=0):
    """Per-fold held-out Gaussian log-likelihood (per sample) for each ``lam``.

    For training part ``T`` with ``m_T`` samples the shrunk covariance is
    ``cov_T + (lam / m_T) I``. Returns an array ``(folds, len(grid))``.
    """
    xj = _as_rows(xj)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty lambda grid")
    if np.any(~(grid > 0)):
        raise ValueError("lambda grid values must be positive")
    n, m = xj.shape
    if folds < 2 or m < folds:
        raise ValueError(f"need 2 <= folds <= m, got folds={folds}, m={m}")
    rng = np.random.default_rng(seed)
    parts = np.array_split(rng.permutation(m), folds)
    out = np.empty((folds, grid.size))
    eye = np.eye(n)
    for f, test in enumerate(parts):
        train = np.concatenate([p for i, p in enumerate(parts) if i != f])
        xt = xj[:, train]
        mean = xt.mean(axis=1, keepdims=True)
        cov = sample_cov(xt)
        held = xj[:, test] - mean
        for a, lam in enumerate(grid):
            out[f, a] = _gaussian_loglik(cov + (lam / train.size) * eye, held) / test.size
    return out


def cv_select_lambda(xj, grid: Sequence[float] | None = None, folds: int = 10, seed=0) -> float:
    """Pick a ridge parameter by k-fold cross-validation on ``cov(xj, xj)``.

    The least regularised grid value whose mean held-out log-likelihood is
    within one standard error of the best one is returned.
    """
    grid = default_lambda_grid(xj) if grid is None else np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("empty lambda grid")
    if grid.size == 1:
        return float(grid[0])
    scores = cv_lambda_scores(xj, grid, folds, seed)
    mean = scores.mean(axis=0)
    if not np.any(np.isfinite(mean)):
        return float(grid[-1])
    best = int(np.nanargmax(np.where(np.isfinite(mean), mean, -np.inf)))
    se = scores[:, best].std(ddof=1) / np.sqrt(scores.shape[0])
    ok = np.nonzero(mean >= mean[best] - se)[0]
    return float(grid[ok[0]])
