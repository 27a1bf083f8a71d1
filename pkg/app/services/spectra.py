"""
SRW spectra, spectral measures, Wasserstein and trace-gap functionals,
Lipschitz staircase approximation, and the sorted mean-square statistic.
"""
import logging
import math
from typing import Callable, Optional, Tuple, Union

import numpy as np

from app.errors import DegenerateGridError, DimensionMismatchError, DomainError, SizeError
from app.models import GeometricGraph, RowStochasticMatrix, Spectrum, StaircaseApprox, SymmetricMatrix
from app.services.eigen import symmetric_eigenvalues
from app.services.graph import is_connected, symmetrize

logger = logging.getLogger(__name__)

SpectrumLike = Union[Spectrum, np.ndarray, list, tuple]


def eigenvalues_symmetric(
    M: Union[SymmetricMatrix, np.ndarray],
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
    backend: Optional[str] = None,
    source: str = "",
) -> Spectrum:
    """All eigenvalues of a symmetric matrix, sorted descending"""
    if not isinstance(M, SymmetricMatrix):
        M = SymmetricMatrix(M)
    if tol is not None and tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    values = symmetric_eigenvalues(M.entries, tol=tol, max_sweeps=max_sweeps, backend=backend)
    return Spectrum(values=values, source=source)


def walk_spectrum(g: GeometricGraph, **solver) -> Spectrum:
    """Spectrum of P(g), computed on the similar matrix D^(-1/2) A D^(-1/2)"""
    spectrum = eigenvalues_symmetric(symmetrize(g), source=g.label, **solver)
    connected = is_connected(g) if g.n else False
    if not connected:
        logger.warning(f"spectrum of disconnected graph {g.label!r}; eigenvalue 1 is repeated")
    return Spectrum(values=spectrum.values, source=g.label, connected=connected)


def _values(S: SpectrumLike) -> np.ndarray:
    if isinstance(S, Spectrum):
        return S.values
    return np.sort(np.asarray(S, dtype=np.float64))[::-1]


def _paired(S1: SpectrumLike, S2: SpectrumLike) -> Tuple[np.ndarray, np.ndarray]:
    a, b = _values(S1), _values(S2)
    if a.shape != b.shape:
        raise SizeError(f"spectra differ in size: {a.size} vs {b.size}")
    return a, b


def wasserstein_distance(S1: SpectrumLike, S2: SpectrumLike) -> float:
    """(1/n) * sum_i |lambda_(i) - kappa_(i)| over descending-sorted values"""
    a, b = _paired(S1, S2)
    if a.size == 0:
        return 0.0
    return float(np.mean(np.abs(a - b)))


def wasserstein_cdf_form(S1: SpectrumLike, S2: SpectrumLike) -> float:
    """Integral of |F1 - F2| over the merged step breakpoints"""
    a, b = _paired(S1, S2)
    if a.size == 0:
        return 0.0
    a, b = np.sort(a), np.sort(b)
    breaks = np.sort(np.concatenate((a, b)))
    widths = np.diff(breaks)
    cdf_a = np.searchsorted(a, breaks[:-1], side="right") / a.size
    cdf_b = np.searchsorted(b, breaks[:-1], side="right") / b.size
    return float(np.sum(np.abs(cdf_a - cdf_b) * widths))


def _matrix(m) -> np.ndarray:
    if isinstance(m, (RowStochasticMatrix, SymmetricMatrix)):
        return m.entries
    return np.asarray(m, dtype=np.float64)


def mean_spectral_gap(A, B) -> float:
    """|(1/n) sum lambda_i(A) - (1/n) sum lambda_i(B)| = |trace(A - B)| / n"""
    a, b = _matrix(A), _matrix(B)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"matrix orders differ: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n == 0:
        return 0.0
    return abs(float(np.trace(a - b))) / n


def spectral_mean_gap(S1: SpectrumLike, S2: SpectrumLike) -> float:
    """The same gap evaluated from eigenvalue sums"""
    a, b = _paired(S1, S2)
    if a.size == 0:
        return 0.0
    return abs(float(np.sum(a) - np.sum(b))) / a.size


def _apply(f: Callable, values: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(values), dtype=np.float64)
    except (TypeError, ValueError):
        out = None
    if out is None or out.shape != values.shape:
        out = np.asarray([f(float(x)) for x in values], dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise DomainError("test function is not finite on the spectrum")
    return out


def conjecture_statistic(S1: SpectrumLike, S2: SpectrumLike, f: Callable) -> float:
    """(1/n) * sum_i |f(lambda_(i)) - f(kappa_(i))|^2, i-th largest paired with i-th largest"""
    a, b = _paired(S1, S2)
    if a.size == 0:
        return 0.0
    diff = _apply(f, a) - _apply(f, b)
    return float(np.mean(diff * diff))


def equidistribution_gap(S1: SpectrumLike, S2: SpectrumLike, f: Callable) -> float:
    """|(1/n) sum f(lambda_i) - (1/n) sum f(kappa_i)|"""
    a, b = _paired(S1, S2)
    if a.size == 0:
        return 0.0
    return abs(float(np.mean(_apply(f, a)) - np.mean(_apply(f, b))))


def _staircase_nodes(eps: float, domain: Tuple[float, float]) -> np.ndarray:
    lo, hi = float(domain[0]), float(domain[1])
    if hi <= lo:
        raise DomainError(f"empty domain [{lo}, {hi}]")
    if eps <= 0:
        raise DomainError(f"step width must be positive, got {eps}")
    if eps >= hi - lo:
        raise DegenerateGridError(f"step width {eps} is not smaller than the domain length {hi - lo}")
    steps = math.ceil((hi - lo) / eps)
    nodes = lo + eps * np.arange(steps, dtype=np.float64)
    return np.append(nodes[nodes < hi], hi)


def lipschitz_staircase(f: Callable, L: float, eps: float, domain: Tuple[float, float] = (-1.0, 1.0)) -> StaircaseApprox:
    """
    Piecewise-linear interpolant of f at lo + i*eps (and hi). For L-Lipschitz f
    the sup error is at most L*eps/2 and every ramp coefficient lies in [-1, 1].
    """
    if L <= 0:
        raise DomainError(f"Lipschitz constant must be positive, got {L}")
    nodes = _staircase_nodes(eps, domain)
    values = np.asarray([f(x) for x in nodes], dtype=np.float64)
    return StaircaseApprox(epsilon=eps, lipschitz=L, domain=(float(domain[0]), float(domain[1])), nodes=nodes, node_values=values)


def sign_staircase(f: Callable, eps: float, domain: Tuple[float, float] = (-1.0, 1.0)) -> StaircaseApprox:
    """
    Ramp sum with weights 2[f(x_i+1) > f(x_i)] - 1 and no constant term. Kept as
    a reference: flat stretches of f force -1 weights, so the sum drifts.
    """
    nodes = _staircase_nodes(eps, domain)
    fx = np.asarray([f(x) for x in nodes], dtype=np.float64)
    signs = np.where(fx[1:] > fx[:-1], 1.0, -1.0)
    values = np.concatenate(([0.0], np.cumsum(signs * np.diff(nodes))))
    return StaircaseApprox(epsilon=eps, lipschitz=1.0, domain=(float(domain[0]), float(domain[1])), nodes=nodes, node_values=values)
