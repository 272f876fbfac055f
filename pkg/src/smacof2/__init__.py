"""Metric multidimensional scaling by majorization of stress formula two.

Also provides the classical raw-stress (Guttman transform) solver for
comparison, Torgerson initialization, and derivative diagnostics.
"""

from .analysis import GradientReport, RatioDiagnostics, gradient_sigma2, ratio_diagnostics, stationarity_residual
from .errors import *  # noqa: F401,F403
from .io import format_iteration_log, load_dataset, parse_matrix
from .linalg import EigenPair, centered_solve, double_center, procrustes_align, sym_eigen
from .model import (
    DissimilarityMatrix,
    StressReport,
    WeightMatrix,
    compute_B,
    compute_distances,
    compute_M,
    compute_V,
    normalize_weights,
    omega,
    stress_report,
    uniform_weights,
    xi,
)
from .solver import (
    IterationRecord,
    SolverOptions,
    SolverResult,
    emergency_step,
    initial_scale,
    run_raw_smacof,
    run_stress2,
    stress2_update,
    torgerson_init,
)

__version__ = "0.1.0"
