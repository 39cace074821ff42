"""Independence tests between random vectors and p-value pooling.

Two tests are available:

* HSIC with Gaussian kernels (median-heuristic widths) and the
  moment-matched gamma approximation of its null distribution, or a
  permutation null for validation.
* A pairwise nonlinear-correlation test, ``corr(tanh(u), v)`` and
  ``corr(u, tanh(v))`` combined into one chi-square statistic per pair,
  pooled over all variable pairs with Fisher's chi-square statistic.

p-values are also carried as natural logs so that extremely small values
keep their ranking instead of underflowing to zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, SampleTooSmallError
from .numstats import DEGENERATE_SD, standardize_rows

P_FLOOR = 1e-300
LOG_P_FLOOR = np.log(P_FLOOR)
HSIC_MIN_SAMPLES = 20
MEDIAN_MAX_POINTS = 1000


class TestKind(str, enum.Enum):
    HSIC_GAMMA = "HSIC-GAMMA"
    HSIC_PERM = "HSIC-PERM"
    NLCORR = "NLCORR"


@dataclass(frozen=True)
class IndependenceResult:
    statistic: float
    p_value: float
    test_kind: TestKind
    log_p: float = 0.0


def _rows(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[None, :] if a.ndim == 1 else a


def _scale_rows(a: np.ndarray) -> np.ndarray:
    # constant rows become zero rows instead of raising
    a = a - a.mean(axis=1, keepdims=True)
    sd = a.std(axis=1, ddof=1, keepdims=True)
    return np.divide(a, sd, out=np.zeros_like(a), where=sd > DEGENERATE_SD)


def _sq_dists(x: np.ndarray) -> np.ndarray:
    # x: samples x dims
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    return d


def median_bandwidth(x: np.ndarray) -> float:
    """Kernel width ``sqrt(median(d^2) / 2)`` over distinct point pairs.

    ``x`` is samples x dims; at most 1000 evenly spaced points are used.
    """
    m = x.shape[0]
    if m > MEDIAN_MAX_POINTS:
        x = x[np.linspace(0, m - 1, MEDIAN_MAX_POINTS).astype(int)]
    d = _sq_dists(x)[np.triu_indices(x.shape[0], k=1)]
    d = d[d > 0]
    med = np.median(d) if d.size else 0.0
    if not med > 0:
        raise DataError("zero median distance: input is constant")
    return float(np.sqrt(0.5 * med))


def _centred_gram(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian Gram matrix and its doubly centred version."""
    k = _sq_dists(x)
    k /= -2.0 * median_bandwidth(x) ** 2
    np.exp(k, out=k)
    kc = k - k.mean(axis=0, keepdims=True)
    kc -= kc.mean(axis=1, keepdims=True)
    return k, kc


def hsic_gamma_null(k: np.ndarray, l: np.ndarray, kc: np.ndarray, lc: np.ndarray):
    """Shape and scale of the gamma fit to ``m * HSIC_b`` under independence."""
    m = k.shape[0]
    v = (kc * lc / 6.0) ** 2
    var = (v.sum() - np.trace(v)) / m / (m - 1)
    var *= 72.0 * (m - 4) * (m - 5) / m / (m - 1) / (m - 2) / (m - 3)
    mu_x = (k.sum() - np.trace(k)) / m / (m - 1)
    mu_y = (l.sum() - np.trace(l)) / m / (m - 1)
    mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / m
    return mean**2 / var, var * m / mean


def hsic_test(u, v, n_permutations: int | None = None, seed=None) -> IndependenceResult:
    """HSIC test of ``u`` (p x m) against ``v`` (q x m).

    ``statistic`` is the biased HSIC estimate ``tr(K H L H) / m^2``. With
    ``n_permutations`` set, the p-value comes from a permutation null
    instead of the gamma approximation.
    """
    u, v = _rows(u), _rows(v)
    m = u.shape[1]
    if v.shape[1] != m:
        raise DataError(f"sample counts differ: {m} vs {v.shape[1]}")
    if m < HSIC_MIN_SAMPLES:
        raise SampleTooSmallError(f"HSIC needs at least {HSIC_MIN_SAMPLES} samples, got {m}")
    x, y = _scale_rows(u).T, _scale_rows(v).T
    k, kc = _centred_gram(x)
    l, lc = _centred_gram(y)
    stat_m = float(np.einsum("ij,ij->", kc, lc)) / m
    if n_permutations:
        rng = np.random.default_rng(seed)
        count = 0
        for _ in range(int(n_permutations)):
            p = rng.permutation(m)
            count += np.einsum("ij,ij->", kc, lc[np.ix_(p, p)]) / m >= stat_m
        p_value = (1.0 + count) / (1.0 + n_permutations)
        return IndependenceResult(stat_m / m, p_value, TestKind.HSIC_PERM, float(np.log(p_value)))
    shape, scale = hsic_gamma_null(k, l, kc, lc)
    log_p = float(stats.gamma.logsf(stat_m, shape, scale=scale))
    log_p = min(log_p, 0.0) if np.isfinite(log_p) else LOG_P_FLOOR
    return IndependenceResult(stat_m / m, float(np.exp(log_p)), TestKind.HSIC_GAMMA, log_p)


def _corr_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Correlation between every row of ``a`` and every row of ``b``."""
    a = a - a.mean(axis=1, keepdims=True)
    b = b - b.mean(axis=1, keepdims=True)
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    return np.clip(a @ b.T, -1.0, 1.0)


def _fisher_z(c: np.ndarray, m: int) -> np.ndarray:
    return np.arctanh(np.clip(c, -1 + 1e-16, 1 - 1e-16)) * np.sqrt(m - 3)


def _self_tanh_corr(a: np.ndarray) -> np.ndarray:
    return np.diagonal(_corr_rows(a, np.tanh(a))).copy()


def nlcorr_pair_logp(u, v) -> tuple[np.ndarray, np.ndarray]:
    """Nonlinear-correlation test for every (row of u, row of v) pair.

    Both ``corr(tanh(u), v)`` and ``corr(u, tanh(v))`` are Fisher-z
    transformed and combined into one Wald statistic. Under independence the
    two z values are asymptotically standard normal with correlation
    ``corr(u, tanh u) * corr(v, tanh v)``, so the statistic is chi-square
    with two degrees of freedom and ``log p = -T / 2``.

    Returns ``(statistic, log_p)`` arrays of shape ``(p, q)``.
    """
    u, v = standardize_rows(u), standardize_rows(v)
    m = u.shape[1]
    if v.shape[1] != m:
        raise DataError(f"sample counts differ: {m} vs {v.shape[1]}")
    if m < 4:
        raise SampleTooSmallError("nonlinear correlation test needs at least 4 samples")
    z1 = _fisher_z(_corr_rows(np.tanh(u), v), m)
    z2 = _fisher_z(_corr_rows(u, np.tanh(v)), m)
    rho = np.clip(np.outer(_self_tanh_corr(u), _self_tanh_corr(v)), -0.999, 0.999)
    t = (z1**2 - 2 * rho * z1 * z2 + z2**2) / (1 - rho**2)
    return t, -0.5 * t


def nlcorr_test(u, v) -> IndependenceResult:
    stat, lp = nlcorr_pair_logp(u, v)
    lp = float(lp[0, 0])
    return IndependenceResult(float(stat[0, 0]), float(np.exp(lp)), TestKind.NLCORR, lp)


def fisher_combine(p_values) -> float:
    """``-sum(log p)``; zeros are clamped to ``1e-300``."""
    p = np.asarray(p_values, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("no p-values to combine")
    if np.any(~((p >= 0) & (p <= 1))):
        raise ValueError("p-values must lie in [0, 1]")
    return float(-np.log(np.maximum(p, P_FLOOR)).sum())


def fisher_pool_logp(log_p) -> float:
    """Log p-value of Fisher's chi-square test over independent p-values."""
    log_p = np.asarray(log_p, dtype=float).ravel()
    if log_p.size == 1:
        return float(log_p[0])
    stat = -2.0 * log_p.sum()
    return float(min(stats.chi2.logsf(stat, 2 * log_p.size), 0.0))


def group_independence_logp(xj, rij, mode, **kwargs) -> float:
    """Log p-value for independence of group ``xj`` and residual block ``rij``."""
    mode = TestKind(mode) if not isinstance(mode, TestKind) else mode
    if mode is TestKind.NLCORR:
        _, lp = nlcorr_pair_logp(xj, rij)
        return fisher_pool_logp(lp)
    perms = kwargs.get("n_permutations") if mode is TestKind.HSIC_PERM else None
    return hsic_test(xj, rij, n_permutations=perms, seed=kwargs.get("seed")).log_p


def group_independence(xj, rij, mode, **kwargs) -> float:
    """p-value for independence of group ``xj`` and residual block ``rij``.

    ``HSIC-GAMMA`` runs one joint HSIC test; ``NLCORR`` pools all pairwise
    nonlinear-correlation p-values with Fisher's method against a
    chi-square with ``2 * n_j * n_i`` degrees of freedom (pairs are treated
    as independent, which they are not in general).
    """
    return float(np.exp(group_independence_logp(xj, rij, mode, **kwargs)))
