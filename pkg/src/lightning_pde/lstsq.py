"""Dense overdetermined least squares for ill-conditioned collocation matrices.

Columns are scaled to unit 2-norm, the scaled matrix is factored by
column-pivoted Householder QR (LAPACK ``geqp3`` through scipy), and trailing
columns whose pivot falls below ``rank_tol`` times the leading pivot get a
zero coefficient.  Normal equations are never formed.

The default cutoff is machine epsilon.  Corner-clustered bases are
numerically rank deficient by design, and truncating at 1e-14 throws away
columns that still carry resolution near the corners; anything below epsilon,
on the other hand, is rounding noise, and solving with it can make the
residual worse than the true minimum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

RANK_TOL = float(np.finfo(float).eps)


@dataclass
class LsProblem:
    matrix: np.ndarray
    rhs: np.ndarray
    column_scales: Optional[np.ndarray] = field(default=None)
    rank: Optional[int] = field(default=None)
    dropped_columns: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix)
        self.rhs = np.asarray(self.rhs)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if self.rhs.shape != (self.matrix.shape[0],):
            raise ValueError(f"rhs has shape {self.rhs.shape}, expected ({self.matrix.shape[0]},)")


def solve_ls(prob: LsProblem, rank_tol: float = RANK_TOL) -> tuple[np.ndarray, float]:
    """Minimize ``||A x - b||_2``.

    Returns the coefficient vector in the original (unscaled) column units and
    the 2-norm of the residual.  ``prob.column_scales``, ``prob.rank`` and
    ``prob.dropped_columns`` are filled in as a side record of the solve.
    """
    a, b = prob.matrix, prob.rhs
    m, n = a.shape
    if m < n:
        raise ValueError(f"underdetermined system: {m} rows < {n} columns")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("matrix or right-hand side has non-finite entries")

    dtype = np.result_type(a, b, float)
    norms = np.linalg.norm(a, axis=0)
    live = norms > 0
    if not live.all():
        log.info("dropping %d all-zero columns", int((~live).sum()))
    scales = np.where(live, norms, 1.0)
    prob.column_scales = scales
    prob.dropped_columns = np.flatnonzero(~live)

    x = np.zeros(n, dtype=dtype)
    if live.any():
        scaled = a[:, live] / scales[live]
        qtb, r, perm = scipy.linalg.qr_multiply(
            scaled, b.astype(dtype), mode="right", pivoting=True, conjugate=True)
        diag = np.abs(np.diag(r))
        rank = int((diag >= rank_tol * diag[0]).sum()) if diag[0] > 0 else 0
        prob.rank = rank
        y = np.zeros(scaled.shape[1], dtype=dtype)
        if rank:
            y[perm[:rank]] = scipy.linalg.solve_triangular(r[:rank, :rank], qtb[:rank])
        x[live] = y / scales[live]
    else:
        prob.rank = 0
    residual = float(np.linalg.norm(a @ x - b))
    return x, residual


def residual_sup(prob: LsProblem, x: np.ndarray, weights: np.ndarray) -> float:
    """Largest unweighted residual ``max |(A x - b)_i / w_i|``."""
    w = np.asarray(weights, dtype=float)
    if w.shape != prob.rhs.shape:
        raise ValueError("weights must have one entry per row")
    if np.any(w == 0):
        raise ValueError("zero weight")
    r = prob.matrix @ x - prob.rhs
    return float(np.max(np.abs(r / w))) if r.size else 0.0
