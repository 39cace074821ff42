"""Regenerate the CSV fixtures: ``python make_fixtures.py``."""

import numpy as np

from grouporder.cli import write_csv

rng = np.random.default_rng(20240101)
m = 400

# y = 0.7 x1 - 0.5 x2 exactly; the y group is listed first
x = np.vstack([rng.laplace(size=m), rng.uniform(-1, 1, size=m)])
y = 0.7 * x[0] - 0.5 * x[1]
write_csv("noise_free.csv", ["y", "x1", "x2"], np.vstack([y, x]))
with open("noise_free.groups", "w") as fh:
    fh.write("# effect group first, cause group second\neffect: y\ncause: x1 x2\n")

# two groups with exactly zero in-sample cross-covariance
a = rng.laplace(size=(2, m))
b = rng.laplace(size=(2, m))
basis = np.vstack([np.ones(m), a])
q, _ = np.linalg.qr(basis.T)
b = b - (b @ q) @ q.T
write_csv("no_effect.csv", ["a1", "a2", "b1", "b2"], np.vstack([a, b]))
with open("no_effect.groups", "w") as fh:
    fh.write("A: a1 a2\nB: b1 b2\n")
