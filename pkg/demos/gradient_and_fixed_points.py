"""
Gradient, fixed points and the stress-one ratio
===============================================

The gradient of stress two is a multiple of ``U X - B(X) X``, so a point is
stationary exactly when the update leaves it in place.  This script checks
the gradient against finite differences, follows both quantities down a
run, and looks at the ratio of the two stress formulas in one dimension.
"""

import numpy as np

from smacof2 import (
    gradient_sigma2,
    initial_scale,
    load_dataset,
    ratio_diagnostics,
    stationarity_residual,
    stress2_update,
    torgerson_init,
    uniform_weights,
)

delta = load_dataset("ekman")
w = uniform_weights(delta.n)
x = initial_scale(delta, w, torgerson_init(delta, 2))

rep = gradient_sigma2(delta, w, x, verify=True, h=1e-5)
print(f"gradient norm {rep.norm:.4e}, finite-difference relative error {rep.fd_rel_error:.1e}")

###############################################################################
# Residual of the fixed-point equation and gradient norm shrink together.
print("\n it   residual    gradient")
for it in range(41):
    if it % 5 == 0:
        print(f"{it:3d}  {stationarity_residual(delta, w, x):.3e}  {gradient_sigma2(delta, w, x).norm:.3e}")
    x = stress2_update(delta, w, x)

###############################################################################
# For one-dimensional configurations with equal weights the ratio
# sigma1 / sigma2 cannot drop below (n - 2) / (3n).  Equality needs n = 3
# and equally spaced points.
rng = np.random.default_rng(0)
for n in (3, 5, 10):
    d = np.ones((n, n)) - np.eye(n)
    ratios = [ratio_diagnostics(d, uniform_weights(n), rng.normal(size=(n, 1))).ratio for _ in range(2000)]
    print(f"n={n:2d}: bound {(n - 2) / (3 * n):.4f}, smallest sampled ratio {min(ratios):.4f}")
eq = ratio_diagnostics(np.ones((3, 3)) - np.eye(3), uniform_weights(3), [[0.0], [1.0], [2.0]])
print(f"n=3 equally spaced: ratio {eq.ratio:.12f}")
