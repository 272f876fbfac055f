"""
Why every update lowers stress two
==================================

Stress two is a ratio, so the iteration works with the difference
``omega(X, Y) = raw(X) - sigma2(Y) * eta2(X)``: if it is negative then
``sigma2(X) < sigma2(Y)``.  A quadratic ``xi(X, Y)`` lies above ``omega``
and touches it at ``X = Y``; the update minimizes that quadratic.
"""

import numpy as np

from smacof2 import initial_scale, normalize_weights, omega, stress2_update, stress_report, torgerson_init, xi
from smacof2.model import DissimilarityMatrix

rng = np.random.default_rng(3)
n, p = 8, 2
u = np.triu(rng.uniform(0.1, 1.0, (n, n)), 1)
delta = DissimilarityMatrix(u + u.T)
raw = np.triu(rng.uniform(0.2, 1.0, (n, n)), 1)
w = normalize_weights(raw + raw.T)

###############################################################################
# The quadratic bound on random pairs of configurations.
gaps = []
for _ in range(200):
    x, y = rng.normal(size=(n, p)), rng.normal(size=(n, p))
    gaps.append(xi(delta, w, x, y) - omega(delta, w, x, y))
print(f"min xi - omega over 200 pairs: {min(gaps):.3e}")

y = rng.normal(size=(n, p))
print(f"touching at X = Y: omega {omega(delta, w, y, y):.1e}, xi {xi(delta, w, y, y):.1e}")

###############################################################################
# Follow the updates from the scaled classical-scaling start.
x = initial_scale(delta, w, torgerson_init(delta, p))
s = stress_report(delta, w, x).sigma2
print(f"\nstart: stress two {s:.6f}")
for it in range(1, 11):
    x_new = stress2_update(delta, w, x, s)
    s_new = stress_report(delta, w, x_new).sigma2
    print(f"{it:2d}  omega(X+, X) = {omega(delta, w, x_new, x):+.3e}   stress two {s_new:.8f}")
    x, s = x_new, s_new
