"""
Closed-form tail bounds: reciprocal Chernoff, Hilbert-Schmidt and Wasserstein
concentration, the c_d feasibility condition and the threshold conversions
between them.
"""
import logging
import math
from typing import Tuple

from app.errors import DomainError
from app.schemas import BoundParams
from app.services.geometry import unit_ball_volume

logger = logging.getLogger(__name__)


def a_of_n(n: float, d: int, r: float) -> float:
    """a(n) = n * pi_d * r^d"""
    if n < 1:
        raise DomainError(f"a(n) needs n >= 1, got {n}")
    if r <= 0:
        raise DomainError(f"a(n) needs r > 0, got {r}")
    return n * unit_ball_volume(d) * r ** d


def _a(p: BoundParams) -> float:
    return a_of_n(p.n, p.d, p.r)


def reciprocal_tail_bound(t: float, mean: float) -> float:
    """Pr{|1/X - 1/EX| > t/EX} <= 2 exp(-(t/(1+t))^2 EX / 2), clamped to [0, 2]"""
    if t < 0:
        raise DomainError(f"deviation must be >= 0, got {t}")
    if mean <= 0:
        raise DomainError(f"mean must be positive, got {mean}")
    value = 2.0 * math.exp(-0.5 * (t / (1.0 + t)) ** 2 * mean)
    return min(max(value, 0.0), 2.0)


def hs_tail_bound(p: BoundParams) -> float:
    """2n [2 exp(-(t/(8t+16))^2 a / 2) + exp(-c_d t^2 a / 2)]"""
    a = _a(p)
    t = p.t
    return 2.0 * p.n * (2.0 * math.exp(-0.5 * (t / (8.0 * t + 16.0)) ** 2 * a) + math.exp(-p.c_d * t * t * a / 2.0))


def hs_tail_bound_terms(p: BoundParams) -> Tuple[float, float, float]:
    """
    The three exponential terms the packaged bound is assembled from, each
    already multiplied by 2n:

        2n exp(-(t/(t+8))^2 a / 2), 2n exp(-(t/(8t+16))^2 a / 2), 2n exp(-c_d t^2 a / 2)

    The first is never larger than the second, which is how hs_tail_bound
    absorbs it.
    """
    a = _a(p)
    t = p.t
    scale = 2.0 * p.n
    return (
        scale * math.exp(-0.5 * (t / (t + 8.0)) ** 2 * a),
        scale * math.exp(-0.5 * (t / (8.0 * t + 16.0)) ** 2 * a),
        scale * math.exp(-p.c_d * t * t * a / 2.0),
    )


def ws_tail_bound(p: BoundParams) -> float:
    """(16 n a^(1/4) / t) [2 exp(-(t^4/(8t^4+4096))^2 a / 2) + exp(-c_d t^8 a / 512)]"""
    if p.t == 0:
        raise DomainError("the Wasserstein bound is undefined at t = 0")
    a = _a(p)
    t4 = p.t ** 4
    prefactor = 16.0 * p.n * a ** 0.25 / p.t
    bracket = 2.0 * math.exp(-0.5 * (t4 / (8.0 * t4 + 4096.0)) ** 2 * a) + math.exp(-p.c_d * t4 * t4 * a / 512.0)
    return prefactor * bracket


def c_d_feasible(t: float, q: float, d: int) -> float:
    """
    Largest c_d with c_d t/8 <= min((1+t/8)/(1-2q)^d - 1, |(1-t/8)/(1-2q)^d - 1|),
    q being M_n+/r(n).
    """
    if t <= 0:
        raise DomainError(f"deviation must be positive, got {t}")
    if not 0 <= q < 0.5:
        raise DomainError(f"M+/r must lie in [0, 1/2), got {q}")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    shrink = (1.0 - 2.0 * q) ** d
    upper = (1.0 + t / 8.0) / shrink - 1.0
    lower = abs((1.0 - t / 8.0) / shrink - 1.0)
    return 8.0 / t * min(upper, lower)


def hs_threshold(t: float, a: float) -> float:
    """Deviation of HS^2 matching the event {HS^2 > t/a}"""
    return t / a


def ws_threshold(t: float, a: float) -> float:
    """Deviation of W1 matching the event {W1 > t/a^(1/4)}"""
    return t / a ** 0.25


def ws_to_hs_threshold(t: float, a: float) -> float:
    """HS deviation t^4/(16 sqrt(a)) that controls the W1 event at t/a^(1/4)"""
    return t ** 4 / (16.0 * math.sqrt(a))


def lipschitz_union_bound(eps: float, p_hs: float) -> float:
    """Union over the (2/eps) ramp functions of a staircase: (2/eps) * Pr{HS > eps^2}"""
    if eps <= 0:
        raise DomainError(f"step width must be positive, got {eps}")
    if p_hs < 0:
        raise DomainError(f"probability bound must be >= 0, got {p_hs}")
    return 2.0 / eps * p_hs


def is_informative(value: float) -> bool:
    return value < 1.0
