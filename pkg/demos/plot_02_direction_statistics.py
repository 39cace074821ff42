"""
The building blocks: direction statistics and independence tests
=================================================================

The scorers rest on three small tools: a likelihood-ratio direction
statistic for scalar pairs, independence tests between vectors, and a
trace criterion for pairs of groups.
"""

import numpy as np

from grouporder.independence import fisher_combine, hsic_test, nlcorr_test
from grouporder.scoring import pairwise_ratio, trace_delta

rng = np.random.default_rng(0)

###############################################################################
# For ``y = 0.8 x + 0.6 e`` with Laplace ``x`` and ``e``, ``R(x, y)`` is
# positive and swapping the arguments flips its sign exactly.

x = rng.laplace(size=5000)
y = 0.8 * x + 0.6 * rng.laplace(size=5000)
print(f"R(x, y) = {pairwise_ratio(x, y):+.4f}, R(y, x) = {pairwise_ratio(y, x):+.4f}")

###############################################################################
# Regression residuals are independent of the true cause but not of the
# effect. Both tests see it.

res_fwd = y - np.polyval(np.polyfit(x, y, 1), x)
res_bwd = x - np.polyval(np.polyfit(y, x, 1), y)
for name, a, b in (("x vs y-residual", x, res_fwd), ("y vs x-residual", y, res_bwd)):
    h = hsic_test(a[:1000], b[:1000])
    n = nlcorr_test(a, b)
    print(f"{name:<16} HSIC p={h.p_value:.3g}   nlcorr p={n.p_value:.3g}")

print("Fisher's statistic for p = (0.1, 0.2, 0.3):", round(fisher_combine([0.1, 0.2, 0.3]), 4))

###############################################################################
# The trace criterion works on second-order statistics only. With an
# anisotropic cause covariance the forward delta is near zero.

xs = rng.normal(size=(20, 2000)) * np.linspace(0.2, 3, 20)[:, None]
ys = rng.normal(size=(20, 20)) @ xs / 5 + 0.1 * rng.normal(size=(20, 2000))
print(f"delta X->Y = {trace_delta(xs, ys):+.4f}, delta Y->X = {trace_delta(ys, xs):+.4f}")
