from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capde.errors import ResonantTailError, SpaceError
from capde.sequences import Weight
from capde.symbols import RationalSymbol, Symbol, index_grids, tail_sup

KS = Symbol((0, 0, 2, 0, -1))          # l(k) = 2 k^2 - k^4


def brute_sup(num, den, kinds, box, kmax=3000, jmax=60, mmax=60, parity=0):
    """Direct maximum over a large finite part of the complement of the box."""
    roles = {"x": 0}
    for ax, kd in enumerate(kinds[1:], start=1):
        roles["theta" if kd == "fourier" else "s"] = ax
    ks = np.arange(-kmax, kmax + 1)
    js = np.arange(-jmax, jmax + 1) if "theta" in roles else np.array([0])
    ms = np.arange(0, mmax + 1) if "s" in roles else np.array([0])
    K, J, M = np.meshgrid(ks, js, ms, indexing="ij")
    inside = np.abs(K) <= box[0]
    if "theta" in roles:
        inside &= np.abs(J) <= box[roles["theta"]]
    if "s" in roles:
        inside &= M <= box[roles["s"]]
    keep = ~inside
    if parity == -1:
        keep &= K != 0
    K, J, M = K[keep], J[keep], M[keep]
    n = num.mid_symbol()
    d = den.mid_symbol()

    def ev(s):
        p = sum(complex(c.mid()) * K.astype(float) ** i for i, c in enumerate(s.kpoly))
        return p + complex(s.cj.mid()) * J + complex(s.cm.mid()) * M

    return float(np.max(np.abs(ev(n) / ev(d))))


def test_symbol_arithmetic_matches_polynomials():
    s = Symbol.dx(4) + Symbol.dx(2) * 2
    for k in range(-5, 6):
        assert k**4 - 2 * k**2 in s.eval_point(k).re


def test_ks_tail_entry_at_three():
    r = RationalSymbol(Symbol.identity(), KS).eval(np.array([3]))
    assert Fraction(r.re.lo[0]) <= Fraction(-1, 63) <= Fraction(r.re.hi[0])
    assert r.re.hi[0] - r.re.lo[0] < 1e-16
    assert r.im.lo[0] == r.im.hi[0] == 0.0


def test_orbit_tail_entry():
    den = Symbol((0, 0, -2, 0, 1), cj=1j)   # i a j - l(k) with a = 1
    v = den.eval_point(1, 5)
    assert -1 in v.re and 5 in v.im
    inv = RationalSymbol(Symbol.identity(), den).eval(np.array([1]), np.array([5]))
    mag = float(inv.mag()[0])
    assert abs(mag - 1 / np.sqrt(26)) < 1e-15


def test_index_grids_shapes():
    k, j, m = index_grids(("fourier", "fourier", "taylor"), (2, 1, 3))
    assert k.shape == j.shape == m.shape == (5, 3, 4)
    assert m.min() == 0 and j.max() == 1


@pytest.mark.parametrize("num,den,kinds,box,parity", [
    (Symbol.identity(), KS, ("fourier",), (4,), -1),
    (Symbol.dx(), KS, ("fourier",), (3,), -1),
    (Symbol.dx(2), Symbol((1, 0, 0, 0, 1)), ("fourier",), (0,), 0),
    (Symbol.identity(), Symbol((0, 0, -2, 0, 1), cj=1j), ("fourier", "fourier"), (3, 2), -1),
    (Symbol.identity(), Symbol((-1.0, 0, -2, 0, 1), cm=3.0), ("fourier", "taylor"), (2, 2), 0),
    (Symbol.dx(), Symbol((0, 0, -2, 0, 1), cj=1j), ("fourier", "fourier"), (2, 3), -1),
])
def test_tail_sup_dominates_brute_force(num, den, kinds, box, parity):
    bound = tail_sup(num, den, kinds, box, parity=parity)
    exact = brute_sup(num, den, kinds, box, parity=parity)
    assert bound >= exact
    assert bound <= 4 * exact + 1e-12


def test_tail_sup_is_attained_at_box_edge():
    b = tail_sup(Symbol.identity(), KS, ("fourier",), (5,), parity=-1)
    assert abs(b - 1 / (6**4 - 2 * 36)) < 1e-15


def test_weight_ratio_two_spaces():
    # d_x from the (mu = 4) space into the (mu = 3) space is bounded
    b = tail_sup(Symbol.dx(), Symbol.identity(), ("fourier",), (6,), weight_ratio=(Weight(3), Weight(4)))
    ks = np.arange(7, 100000)
    exact = np.max(ks * (1 + ks) ** 3.0 / (1 + ks) ** 4.0)
    assert exact <= b <= 1.0 + 1e-12


def test_resonant_tail_detected():
    den = Symbol((-4, 0, 1))                 # k^2 - 4 vanishes at k = 2
    with pytest.raises(ResonantTailError):
        tail_sup(Symbol.identity(), den, ("fourier",), (1,))
    assert tail_sup(Symbol.identity(), den, ("fourier",), (2,)) > 0
    with pytest.raises(ResonantTailError):
        RationalSymbol(Symbol.identity(), den).eval(np.array([2]))


def test_resonant_fixed_point_tail():
    den = Symbol((-1.0, 0, -2, 0, 1), cm=1.0)   # m - 1 - l(k) vanishes at k = 0, m = 1
    with pytest.raises(ResonantTailError):
        tail_sup(Symbol.identity(), den, ("fourier", "taylor"), (2, 0))


def test_unsupported_growth_rejected():
    with pytest.raises(SpaceError):
        tail_sup(Symbol((0,), cj=1j), Symbol.identity(), ("fourier", "fourier"), (2, 2))
    with pytest.raises(SpaceError):
        tail_sup(Symbol.identity(), Symbol((1,), cj=1j), ("fourier",), (2,))


def test_symbol_text_roundtrip():
    s = Symbol((0.5, 1j, -2), cj=3j, cm=0.25)
    assert Symbol.from_text(s.to_text()) == s
    r = RationalSymbol(Symbol.identity(), s)
    assert RationalSymbol.from_text(r.to_text()) == r


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(0, 40),
       st.lists(st.integers(-9, 9), min_size=1, max_size=5), st.integers(-5, 5), st.integers(-5, 5))
def test_eval_point_exact_integer_symbols(k, j, m, coeffs, cj, cm):
    s = Symbol(tuple(coeffs), cj=1j * cj, cm=cm)
    v = s.eval_point(k, j, m)
    expect = sum(c * k**i for i, c in enumerate(coeffs)) + cm * m
    assert Fraction(expect) == Fraction(v.re.lo) == Fraction(v.re.hi)
    assert Fraction(cj * j) == Fraction(v.im.lo)
