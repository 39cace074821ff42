"""Exogenous-group scores.

Each scorer returns an :class:`~grouporder.data.ExogeneityScores` whose
``chosen`` group is the candidate with the smallest score:

* ``score_gdl`` regresses every other group on the candidate and tests the
  candidate against each residual block; the p-values are combined as
  ``-sum(log p)``.
* ``score_pairwise`` penalises negative likelihood-ratio direction
  statistics between candidate variables and (leave-one-in) targets.
* ``score_trace`` sums squared ratios of forward to backward trace deltas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data import ExogeneityScores, GroupedDataMatrix, Method
from .errors import NoEffectError
from .independence import LOG_P_FLOOR, TestKind, group_independence_logp
from .numstats import ols_fit, regress, sample_cov, standardize, standardize_rows

RESIDUAL_VAR_RTOL = 1e-12
TRACE_EPS = 1e-12
TRACE_CAP = 1e12
NO_EFFECT_TOL = 1e-20

# maps a regressor block to the ridge parameter to use for it
LambdaRule = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class PairRatio:
    k: int
    i: int
    l: int
    R: float


@dataclass(frozen=True)
class TraceDelta:
    source: int
    target: int
    delta: float


def _lambda_for(lam: float | LambdaRule, xj: np.ndarray) -> float:
    return float(lam(xj)) if callable(lam) else float(lam)


# -- GroupDirectLiNGAM ------------------------------------------------------

def _mode(method: Method | str) -> TestKind:
    method = Method.parse(method) if not isinstance(method, TestKind) else method
    if method in (TestKind.HSIC_GAMMA, Method.GDL_HSIC):
        return TestKind.HSIC_GAMMA
    if method in (TestKind.NLCORR, Method.GDL_NLCORR):
        return TestKind.NLCORR
    raise ValueError(f"{method} is not a GroupDirectLiNGAM mode")


def gdl_log_pvalues(data: GroupedDataMatrix, j: int, mode, lam: float | LambdaRule = 0.0) -> dict:
    """Log p-values of ``x_j`` against the residuals of each other group on it."""
    mode = _mode(mode)
    xj = data.group(j)
    lam_j = _lambda_for(lam, xj)
    out = {}
    for i in data.group_ids:
        if i == j:
            continue
        xi = data.group(i)
        res = regress(xi, xj, lam_j).residuals
        scale = np.maximum(xi.var(axis=1, ddof=1), 1.0)
        live = res.var(axis=1, ddof=1) >= RESIDUAL_VAR_RTOL * scale
        if not live.any():
            # a zero residual is independent of anything
            out[i] = 0.0
            continue
        out[i] = group_independence_logp(xj, res[live], mode)
    return out


def score_gdl(data: GroupedDataMatrix, mode=Method.GDL_NLCORR, lam: float | LambdaRule = 0.0) -> ExogeneityScores:
    """``mu_j = -sum_i log p_ji`` for independence of ``x_j`` and ``r_i^(j)``."""
    mode = _mode(mode)
    scores = {}
    for j in data.group_ids:
        logs = np.array(list(gdl_log_pvalues(data, j, mode, lam).values()))
        logs = np.where(np.isfinite(logs), logs, LOG_P_FLOOR)
        scores[j] = float(-logs.sum())
    method = Method.GDL_HSIC if mode is TestKind.HSIC_GAMMA else Method.GDL_NLCORR
    return ExogeneityScores(method, scores)


# -- Pairwise measure -------------------------------------------------------

def _ratio_std(x: np.ndarray, y: np.ndarray, kurtosis_sign: bool = True) -> np.ndarray:
    """Direction statistic for already standardized rows, broadcasting."""
    m = x.shape[-1]
    rho = np.sum(x * y, axis=-1) / (m - 1)
    r = rho * np.mean(x * np.tanh(y) - np.tanh(x) * y, axis=-1)
    if kurtosis_sign:
        # symmetric in x and y, so antisymmetry of r is kept exactly
        excess = np.mean(x**4, axis=-1) + np.mean(y**4, axis=-1) - 6.0
        r = np.where(excess < 0, -r, r)
    return r


def pairwise_ratio(x, y, kurtosis_sign: bool = True) -> float:
    """Normalised log-likelihood ratio ``R(x, y)``; positive suggests x -> y.

    Uses the nonlinear-correlation approximation
    ``rho * mean(x * tanh(y) - tanh(x) * y)`` on standardized inputs. The
    tanh contrast suits super-Gaussian variables; with ``kurtosis_sign`` the
    result is negated when the summed excess kurtosis of x and y is negative.
    """
    xs, ys = standardize(x), standardize(y)
    return float(_ratio_std(xs, ys, kurtosis_sign))


def leave_one_in_target(data: GroupedDataMatrix, j: int, i: int, k: int, l: int) -> np.ndarray:
    """``x_l^(i)`` minus the OLS contribution of every group-``j`` variable except ``k``."""
    xj = data.group(j)
    xl = data.group(i)[l]
    b = ols_fit(xl, xj).coefficients[0]
    others = np.arange(xj.shape[0]) != k
    return xl - b[others] @ xj[others]


def pairwise_ratios(
    data: GroupedDataMatrix,
    j: int,
    naive: bool = False,
    lam: float | LambdaRule = 0.0,
    kurtosis_sign: bool = True,
) -> list[PairRatio]:
    """All ``R(x_k^(j), z_{k,l}^(i))`` (or ``R(x_k^(j), x_l^(i))`` if naive) for candidate ``j``."""
    xj = data.group(j)
    xs = standardize_rows(xj)
    lam_j = 0.0 if naive else _lambda_for(lam, xj)
    out = []
    for i in data.group_ids:
        if i == j:
            continue
        xi = data.group(i)
        if naive:
            ys = standardize_rows(xi)
            r = _ratio_std(xs[:, None, :], ys[None, :, :], kurtosis_sign)
        else:
            fit = regress(xi, xj, lam_j)
            # z[k, l] = b_lk x_k + residual_l, differing from the literal
            # definition only by a constant that standardization removes
            z = fit.residuals[None, :, :] + fit.coefficients.T[:, :, None] * xj[:, None, :]
            zc = z - z.mean(axis=-1, keepdims=True)
            sd = zc.std(axis=-1, ddof=1, keepdims=True)
            zs = np.divide(zc, sd, out=np.zeros_like(zc), where=sd > 1e-12)
            r = _ratio_std(xs[:, None, :], zs, kurtosis_sign)
        out.extend(
            PairRatio(k, i, l, float(r[k, l]))
            for k in range(r.shape[0])
            for l in range(r.shape[1])
        )
    return out


def pairwise_measure(ratios: list[PairRatio], n_j: int, n_others: int) -> float:
    """Mean squared negative part of the ratios, normalised by ``n_j * sum n_i``."""
    neg = np.minimum(0.0, np.array([p.R for p in ratios], dtype=float))
    return float(np.sum(neg**2) / (n_j * n_others))


def score_pairwise(
    data: GroupedDataMatrix,
    naive: bool = False,
    lam: float | LambdaRule = 0.0,
    kurtosis_sign: bool = True,
) -> ExogeneityScores:
    scores = {}
    total = data.layout.total
    for j in data.group_ids:
        n_j = data.layout.size(j)
        ratios = pairwise_ratios(data, j, naive, lam, kurtosis_sign)
        scores[j] = pairwise_measure(ratios, n_j, total - n_j)
    return ExogeneityScores(Method.NAIVE_PAIRWISE if naive else Method.PAIRWISE, scores)


# -- Trace method -----------------------------------------------------------

def trace_delta_from_estimates(b: np.ndarray, sigma: np.ndarray) -> float:
    """``log(tr(B S B') / n_y) - log(tr(S) / n_x) - log(tr(B B') / n_y)``."""
    b = np.atleast_2d(np.asarray(b, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    n_y, n_x = b.shape
    tbb = np.trace(b @ b.T)
    if not tbb >= NO_EFFECT_TOL:
        raise NoEffectError("estimated connection matrix is numerically zero")
    return float(
        np.log(np.trace(b @ sigma @ b.T) / n_y)
        - np.log(np.trace(sigma) / n_x)
        - np.log(tbb / n_y)
    )


def trace_delta(x, y, lam: float = 0.0) -> float:
    """Trace-condition delta for the hypothesis ``X -> Y``."""
    b = regress(y, x, lam).coefficients
    return trace_delta_from_estimates(b, sample_cov(x))


def trace_ratio_term(forward: float, backward: float) -> float:
    if abs(backward) < TRACE_EPS:
        return min((forward / TRACE_EPS) ** 2, TRACE_CAP)
    return (forward / backward) ** 2


def trace_deltas(data: GroupedDataMatrix, lam: float | LambdaRule = 0.0) -> list[TraceDelta]:
    out = []
    ids = data.group_ids
    for a in ids:
        xa = data.group(a)
        lam_a = _lambda_for(lam, xa)
        for c in ids:
            if c == a:
                continue
            try:
                d = trace_delta(xa, data.group(c), lam_a)
            except NoEffectError as exc:
                raise NoEffectError(f"no effect between groups {a} and {c}: {exc}") from exc
            out.append(TraceDelta(a, c, d))
    return out


def score_trace(data: GroupedDataMatrix, lam: float | LambdaRule = 0.0) -> ExogeneityScores:
    """``mu_j = sum_i (delta_{j->i} / delta_{i->j})^2``."""
    deltas = {(t.source, t.target): t.delta for t in trace_deltas(data, lam)}
    scores = {
        j: float(sum(trace_ratio_term(deltas[j, i], deltas[i, j]) for i in data.group_ids if i != j))
        for j in data.group_ids
    }
    return ExogeneityScores(Method.TRACE, scores)


def score(data: GroupedDataMatrix, method: Method | str, lam: float | LambdaRule = 0.0) -> ExogeneityScores:
    """Dispatch to the scorer for ``method``."""
    method = Method.parse(method)
    if method in (Method.GDL_HSIC, Method.GDL_NLCORR):
        return score_gdl(data, method, lam)
    if method is Method.PAIRWISE:
        return score_pairwise(data, naive=False, lam=lam)
    if method is Method.NAIVE_PAIRWISE:
        return score_pairwise(data, naive=True)
    return score_trace(data, lam)
