import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.errors import DomainError
from app.schemas import BoundParams
from app.services.bounds import (
    a_of_n,
    c_d_feasible,
    hs_tail_bound,
    hs_tail_bound_terms,
    hs_threshold,
    is_informative,
    lipschitz_union_bound,
    reciprocal_tail_bound,
    ws_threshold,
    ws_tail_bound,
    ws_to_hs_threshold,
)

mpmath.mp.dps = 50


def oracle_a(n, d, r):
    return mpmath.mpf(n) * mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1) * mpmath.mpf(r) ** d


def oracle_hs(n, d, r, t, c_d):
    a, t = oracle_a(n, d, r), mpmath.mpf(t)
    return 2 * n * (2 * mpmath.exp(-(t / (8 * t + 16)) ** 2 * a / 2) + mpmath.exp(-c_d * t ** 2 * a / 2))


def oracle_ws(n, d, r, t, c_d):
    a, t = oracle_a(n, d, r), mpmath.mpf(t)
    bracket = 2 * mpmath.exp(-(t ** 4 / (8 * t ** 4 + 4096)) ** 2 * a / 2) + mpmath.exp(-c_d * t ** 8 * a / 512)
    return 16 * n * a ** mpmath.mpf(0.25) / t * bracket


def oracle_c_d(t, q, d):
    t, q = mpmath.mpf(t), mpmath.mpf(q)
    shrink = (1 - 2 * q) ** d
    return 8 / t * min((1 + t / 8) / shrink - 1, abs((1 - t / 8) / shrink - 1))


def test_a_of_n_examples():
    assert a_of_n(100, 2, 0.1) == pytest.approx(math.pi)
    assert a_of_n(10, 1, 0.5) == pytest.approx(10.0)
    assert a_of_n(10 ** 6, 3, 1e-12) < 1e-10


def test_reciprocal_bound_examples():
    assert reciprocal_tail_bound(0.0, 5.0) == 2.0
    assert reciprocal_tail_bound(1.0, 8.0) == pytest.approx(2 * math.exp(-1), rel=1e-12)
    values = [reciprocal_tail_bound(0.5, m) for m in (1, 5, 20, 100)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_hs_bound_example():
    p = BoundParams(n=1000, d=2, r=0.2, t=4, c_d=1)
    assert hs_tail_bound(p) == pytest.approx(2585.6, rel=1e-3)
    assert not is_informative(hs_tail_bound(p))


def test_hs_bound_vacuous_limit():
    p = BoundParams(n=50, d=2, r=0.2, t=1e-9, c_d=1)
    assert hs_tail_bound(p) == pytest.approx(6 * 50, rel=1e-6)


@pytest.mark.parametrize(
    "n, d, r, t, c_d",
    [(1000, 2, 0.2, 4, 1), (4096, 2, 0.05, 0.5, 2.0), (10 ** 5, 3, 0.1, 10, 0.3), (256, 1, 0.4, 1.5, 1)],
)
def test_bounds_match_high_precision_oracle(n, d, r, t, c_d):
    p = BoundParams(n=n, d=d, r=r, t=t, c_d=c_d)
    assert hs_tail_bound(p) == pytest.approx(float(oracle_hs(n, d, r, t, c_d)), rel=1e-12)
    assert ws_tail_bound(p) == pytest.approx(float(oracle_ws(n, d, r, t, c_d)), rel=1e-12)


def test_ws_bound_regression_value():
    p = BoundParams(n=1000, d=2, r=0.2, t=4, c_d=1)
    assert ws_tail_bound(p) == pytest.approx(float(oracle_ws(1000, 2, 0.2, 4, 1)), rel=1e-12)
    assert ws_tail_bound(p) > 2 * 13397 * 0.89


def test_ws_bound_undefined_at_zero():
    with pytest.raises(DomainError):
        ws_tail_bound(BoundParams(n=10, d=2, r=0.3, t=0, c_d=1))


def test_hs_bound_decreasing_in_t():
    ts = np.linspace(0.05, 20, 400)
    values = [hs_tail_bound(BoundParams(n=500, d=2, r=0.3, t=t, c_d=1)) for t in ts]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_bounds_decreasing_in_a():
    rs = np.linspace(0.1, 0.9, 50)
    hs = [hs_tail_bound(BoundParams(n=5000, d=2, r=r, t=2, c_d=1)) for r in rs]
    assert all(b < a for a, b in zip(hs, hs[1:]))
    # a^(1/4) in the prefactor only loses to the exponentials once a is large
    ws = [ws_tail_bound(BoundParams(n=10 ** 6, d=2, r=r, t=4, c_d=1)) for r in np.linspace(0.1, 0.45, 50)]
    assert all(b < a for a, b in zip(ws, ws[1:]))


@given(
    st.integers(min_value=1, max_value=10 ** 6),
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=1e-3, max_value=1.0),
    st.floats(min_value=1e-3, max_value=50.0),
    st.floats(min_value=1e-3, max_value=10.0),
)
def test_packaged_bound_dominates_every_term(n, d, r, t, c_d):
    p = BoundParams(n=n, d=d, r=r, t=t, c_d=c_d)
    packaged = hs_tail_bound(p)
    terms = hs_tail_bound_terms(p)
    assert all(term <= packaged for term in terms)
    assert terms[0] <= terms[1]
    assert packaged >= 0 and ws_tail_bound(p) >= 0


@pytest.mark.parametrize("t", [0.5, 1.0, 4.0, 7.9])
def test_c_d_feasible_at_zero_matching_distance(t):
    assert c_d_feasible(t, 0.0, 2) == pytest.approx(1.0, rel=1e-12)


def test_c_d_feasible_at_t_eight():
    assert c_d_feasible(8.0, 0.0, 3) == 1.0


@pytest.mark.parametrize("t, q, d", [(1.0, 0.1, 2), (2.0, 0.3, 1), (0.5, 0.45, 3), (6.0, 0.01, 2)])
def test_c_d_feasible_matches_oracle(t, q, d):
    assert c_d_feasible(t, q, d) == pytest.approx(float(oracle_c_d(t, q, d)), rel=1e-12)


def test_c_d_feasible_tracks_second_branch_near_half():
    t, d = 1.0, 2
    for q in (0.4, 0.45, 0.49):
        shrink = (1 - 2 * q) ** d
        assert c_d_feasible(t, q, d) == pytest.approx(8 / t * abs((1 - t / 8) / shrink - 1))


def test_c_d_feasible_domain():
    with pytest.raises(DomainError):
        c_d_feasible(1.0, 0.5, 2)
    with pytest.raises(DomainError):
        c_d_feasible(0.0, 0.1, 2)


def test_thresholds():
    assert hs_threshold(2.0, 16.0) == 0.125
    assert ws_threshold(2.0, 16.0) == 1.0
    assert ws_to_hs_threshold(2.0, 16.0) == 0.25


def test_lipschitz_union_bound():
    assert lipschitz_union_bound(0.1, 0.001) == pytest.approx(0.02)
    with pytest.raises(DomainError):
        lipschitz_union_bound(0.0, 0.1)
    assert is_informative(0.5) and not is_informative(1.0)
