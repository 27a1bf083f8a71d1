"""
Dense symmetric eigenvalues: Householder reduction to tridiagonal form,
then implicit-shift QL sweeps on the tridiagonal matrix.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from app.config import get_settings
from app.errors import ConfigurationError, ConvergenceError

logger = logging.getLogger(__name__)


# columns per panel; the panel's rank-2 updates are applied as one matrix product
PANEL_WIDTH = 32


def tridiagonalize(matrix: np.ndarray, panel: int = PANEL_WIDTH) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthogonally similar tridiagonal form of a symmetric matrix.

    Returns (diagonal, off_diagonal) with off_diagonal[k] coupling rows k and k + 1.

    Column k uses the reflector H = I - 2 v v^T / (v^T v) on rows k+1.., which
    turns the trailing block into A - v w^T - w v^T. Within a panel of columns
    these rank-2 terms are only accumulated in V and W; the current column and
    the product A v are corrected from them, and the trailing block is updated
    once per panel.
    """
    a = np.array(matrix, dtype=np.float64, copy=True, order="C")
    n = a.shape[0]
    diagonal = np.zeros(n, dtype=np.float64)
    off = np.zeros(max(n - 1, 0), dtype=np.float64)
    k = 0
    while k < n - 2:
        width = min(panel, n - 2 - k)
        s = k + 1
        V = np.zeros((n - s, width), dtype=np.float64)
        W = np.zeros((n - s, width), dtype=np.float64)
        for j in range(width):
            c = k + j
            x = a[c + 1:, c].copy()
            diagonal[c] = a[c, c]
            if j:
                # pending updates of this panel; row c is row j - 1 of V and W
                x -= V[j:, :j] @ W[j - 1, :j] + W[j:, :j] @ V[j - 1, :j]
                diagonal[c] -= 2.0 * float(V[j - 1, :j] @ W[j - 1, :j])
            alpha = math.sqrt(float(x @ x))
            if alpha == 0.0:
                continue
            if x[0] > 0:
                alpha = -alpha
            v = x
            v[0] -= alpha
            vv = float(v @ v)
            off[c] = alpha
            if vv == 0.0:
                continue
            p = a[c + 1:, c + 1:] @ v
            if j:
                p -= V[j:, :j] @ (W[j:, :j].T @ v) + W[j:, :j] @ (V[j:, :j].T @ v)
            p *= 2.0 / vv
            V[j:, j] = v
            W[j:, j] = p - (float(v @ p) / vv) * v
        # rows and columns from k + width on are read by the next panel
        t = width - 1
        Vt, Wt = V[t:], W[t:]
        a[k + width:, k + width:] -= Vt @ Wt.T + Wt @ Vt.T
        k += width
    if n >= 2:
        off[n - 2] = a[n - 1, n - 2]
        diagonal[n - 2] = a[n - 2, n - 2]
    if n >= 1:
        diagonal[n - 1] = a[n - 1, n - 1]
    return diagonal, off


def ql_implicit(diagonal: np.ndarray, off_diagonal: np.ndarray, tol: float, max_sweeps: int) -> List[float]:
    """
    Eigenvalues of a symmetric tridiagonal matrix by QL with implicit Wilkinson
    shifts. An off-diagonal entry counts as zero once |e_m| <= tol * (|d_m| + |d_m+1|).
    """
    d = [float(x) for x in diagonal]
    n = len(d)
    e = [float(x) for x in off_diagonal] + [0.0]
    tol = max(tol, np.finfo(np.float64).eps)
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= tol * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                raise ConvergenceError(f"eigenvalue {l} did not converge within {max_sweeps} QL sweeps")
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
        logger.debug(f"eigenvalue {l} converged after {sweeps} sweeps")
    return d


def symmetric_eigenvalues(
    matrix: np.ndarray,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
    backend: Optional[str] = None,
) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, descending"""
    settings = get_settings()
    backend = backend or settings.eigen_backend
    if backend == "lapack":
        values = np.linalg.eigvalsh(matrix)
    elif backend == "householder_ql":
        diagonal, off = tridiagonalize(matrix)
        values = np.asarray(
            ql_implicit(
                diagonal,
                off,
                settings.eigen_tol if tol is None else tol,
                settings.eigen_max_sweeps if max_sweeps is None else max_sweeps,
            ),
            dtype=np.float64,
        )
    else:
        raise ConfigurationError(f"unknown eigen backend {backend!r}")
    return np.sort(values)[::-1]
