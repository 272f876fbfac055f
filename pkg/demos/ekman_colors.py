"""
Ekman color similarities in two dimensions
==========================================

Fits the 14 color stimuli with stress formula two, then with raw stress,
and checks that the two maps agree up to rotation, reflection and scale.
"""

import tempfile
from pathlib import Path

import numpy as np

from smacof2 import load_dataset, procrustes_align, run_raw_smacof, run_stress2
from smacof2.io import RunConfig, emit_results

# Similarities run from 0 to 1; dissimilarities are 1 - s.
delta = load_dataset("ekman")
print("colors (nm):", " ".join(delta.labels))

###############################################################################
# Stress two from the classical scaling start.  ``verbose`` prints one log
# line per iteration: the loss before and after each update.
res = run_stress2(delta, verbose=True)
print(f"\nstress two {res.s:.10f} after {res.itel} iterations")

###############################################################################
# The raw-stress Guttman iteration on the same data.  Its loss is on a
# different scale (half the sum of squared residuals).
raw = run_raw_smacof(delta)
print(f"raw stress {raw.s:.7f} after {raw.itel} iterations")

###############################################################################
# Same picture?  Align raw onto stress two with a similarity transform.
fit = procrustes_align(raw.x, res.x, dilation=True)
print(f"Procrustes scale {fit.scale:.4f}, relative residual {fit.relative_residual:.4f}")

# The colors lie on the familiar circle: angles increase with wavelength.
xc = res.x - res.x.mean(axis=0)
angles = np.unwrap(np.arctan2(xc[:, 1], xc[:, 0]))
print("angle steps monotone:", bool(np.all(np.diff(angles) > 0) or np.all(np.diff(angles) < 0)))

###############################################################################
# Write the log, JSON, CSV and a scatter plot.
out = Path(tempfile.mkdtemp(prefix="ekman_"))
paths = emit_results(res, RunConfig(input="ekman", out_dir=str(out)), labels=delta.labels)
for kind, path in paths.items():
    print(f"{kind:>4}: {path}")
