"""Dense tableau simplex for ``max c@x  s.t.  A@x <= b, x >= 0`` with ``b >= 0``.

The slack basis is feasible from the start, so a single phase suffices.
Bland's smallest-index rule guards against cycling on the heavily degenerate
LPs produced by the prefix constraints.
"""

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


class LPError(RuntimeError):
    """The simplex could not produce an optimum (unbounded or numerical trouble)."""


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


def solve_lp(c, A, b, tol=TOL, max_iter=None):
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return LPResult(np.zeros(0), 0.0, 0)
    A = np.asarray(A, dtype=float).reshape(-1, c.size)
    b = np.asarray(b, dtype=float)
    n_rows, n_vars = A.shape
    if b.shape != (n_rows,):
        raise ValueError("b must have one entry per row of A")
    if np.any(b < 0):
        raise ValueError("right-hand side must be non-negative (slack basis must be feasible)")
    width = n_vars + n_rows
    T = np.zeros((n_rows + 1, width + 1))
    T[:n_rows, :n_vars] = A
    T[:n_rows, n_vars:width] = np.eye(n_rows)
    T[:n_rows, -1] = b
    T[-1, :n_vars] = -c  # reduced costs; optimal when none is negative
    basis = list(range(n_vars, width))

    if max_iter is None:
        max_iter = 50 * (width + 1)
    for it in range(max_iter):
        candidates = np.flatnonzero(T[-1, :width] < -tol)
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:n_rows, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise LPError("LP is unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol]
        row = int(min(tied, key=lambda r: basis[r]))

        T[row] /= T[row, col]
        others = np.arange(n_rows + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
    else:
        raise LPError(f"simplex did not converge in {max_iter} pivots")

    if not np.all(np.isfinite(T)):
        raise LPError("non-finite values in simplex tableau")
    x = np.zeros(width)
    x[basis] = T[:n_rows, -1]
    x = x[:n_vars]
    x[np.abs(x) < tol] = 0.0
    if np.any(x < -tol) or np.any(A @ x > b + 1e-7):
        raise LPError("simplex returned an infeasible point")
    return LPResult(x, float(c @ x), it)
