import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capde.errors import DomainError, SpaceError
from capde.interval import CIArray, Interval
from capde.sequences import (
    DecaySeq,
    FourierSeq,
    SeqSpace,
    Weight,
    algebra_const,
    apply_symbol,
    conv,
    decay_bound,
    dual_norm,
    inner_l2,
    norm_l1w,
    pair,
)
from capde.symbols import Symbol
from oracles import mp_in, weight_mp


def space1(n=4, mu1=0.0, mu2=0.0, **kw):
    return SeqSpace(("fourier",), (n,), (Weight(mu1, mu2),), **kw)


def mode(space, k, c=1.0):
    a = np.zeros(space.shape, dtype=complex)
    a[space.box[0] + k] = c
    return FourierSeq(space, a)


def random_seq(rng, space, scale=1.0):
    a = rng.normal(size=space.shape) + 1j * rng.normal(size=space.shape)
    return FourierSeq(space, scale * a)


# -- weights ----------------------------------------------------------------------


def test_weight_values_enclose(mp50):
    w = Weight(2.0, 0.05)
    vals = w.values(np.arange(0, 40))
    for n in range(40):
        assert mpmath.mpf(vals.lo[n]) <= weight_mp(n, 2, 0.05) <= mpmath.mpf(vals.hi[n])


def test_weight_rejects_negative_exponents():
    with pytest.raises(DomainError):
        Weight(-1.0, 0.0)


@given(st.floats(0, 3), st.floats(0, 0.5), st.integers(-60, 60), st.integers(-60, 60))
def test_weight_submultiplicative(mu1, mu2, n, m):
    w = Weight(mu1, mu2)
    assert w.at(n + m).lo <= (w.at(n) * w.at(m)).hi
    assert w.at(n).lo >= 1.0 - 1e-15
    assert w.at(n) == w.at(-n)


# -- norms ------------------------------------------------------------------------


def test_norm_single_mode_polynomial_weight():
    assert 2 in norm_l1w(mode(space1(mu1=1), 1))


def test_norm_single_mode_exponential_weight():
    n = norm_l1w(mode(space1(mu2=math.log(2)), 1))
    assert abs(n.mid - 2.0) < 1e-14


def test_norm_matches_direct_summation(mp50):
    rng = np.random.default_rng(11)
    sp = space1(10, 1.5, 0.1)
    u = random_seq(rng, sp)
    c = u.coeffs.mid()
    exact = sum(abs(mpmath.mpc(complex(c[i]))) * weight_mp(i - 10, 1.5, 0.1) for i in range(21))
    assert mp_in(norm_l1w(u), exact)
    assert norm_l1w(u).width < 1e-12 * exact


def test_norm_includes_tail():
    u = mode(space1(), 1).with_tail(0.5)
    assert norm_l1w(u).hi >= 1.5


@given(st.integers(0, 10**6))
def test_exponential_weight_dominates(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=9) + 1j * rng.normal(size=9)
    u0 = FourierSeq(space1(4, 1.0, 0.0), a)
    u1 = FourierSeq(space1(4, 1.0, 0.2), a)
    assert norm_l1w(u0).hi <= norm_l1w(u1).hi


# -- convolution -------------------------------------------------------------------


def test_conv_identity():
    rng = np.random.default_rng(1)
    sp = space1(5, 1, 0)
    u = random_seq(rng, sp)
    r = conv(mode(sp, 0), u)
    assert np.all(r.coeffs.contains(u.coeffs.mid()))
    assert r.coeffs.rad().max() < 1e-14


def test_conv_mode_squared():
    sp = space1(3)
    r = conv(mode(sp, 1), mode(sp, 1))
    expected = np.zeros(sp.shape, dtype=complex)
    expected[3 + 2] = 1
    assert np.all(r.coeffs.contains(expected))
    assert r.tail.hi < 1e-150  # rounding radii only


def test_conv_rational_oracle():
    rng = np.random.default_rng(2)
    sp = space1(8, 1, 0)
    a = rng.integers(-9, 10, 17) / 8 + 1j * rng.integers(-9, 10, 17) / 16
    b = rng.integers(-9, 10, 17) / 4 + 1j * rng.integers(-9, 10, 17) / 32
    r = conv(FourierSeq(sp, a), FourierSeq(sp, b), box="full")
    for n in range(-16, 17):
        re = Fraction(0)
        im = Fraction(0)
        for k in range(-8, 9):
            if abs(n - k) <= 8:
                x, y = a[k + 8], b[n - k + 8]
                re += Fraction(x.real) * Fraction(y.real) - Fraction(x.imag) * Fraction(y.imag)
                im += Fraction(x.real) * Fraction(y.imag) + Fraction(x.imag) * Fraction(y.real)
        i = n + 16
        assert Fraction(r.coeffs.re.lo[i]) <= re <= Fraction(r.coeffs.re.hi[i])
        assert Fraction(r.coeffs.im.lo[i]) <= im <= Fraction(r.coeffs.im.hi[i])


def test_conv_spill_goes_to_tail():
    sp = space1(3, 1, 0)
    r = conv(mode(sp, 3), mode(sp, 2))
    assert r.box == (3,)
    assert r.tail.hi >= 6.0  # mode 5 carries weight 6


def test_conv_mismatched_weights():
    with pytest.raises(SpaceError):
        conv(mode(space1(3, 1, 0), 1), mode(space1(3, 2, 0), 1))


@given(st.integers(0, 10**6), st.sampled_from([(0, 0), (2, 0), (0, 0.1), (2, 0.1)]), st.floats(0, 0.3))
def test_banach_algebra(seed, mu, tail):
    rng = np.random.default_rng(seed)
    sp = space1(6, *mu)
    u = random_seq(rng, sp).with_tail(tail)
    v = random_seq(rng, sp)
    assert norm_l1w(conv(u, v)).hi <= (norm_l1w(u) * norm_l1w(v)).hi


@given(st.integers(0, 10**6))
def test_conv_refinement_containment(seed):
    rng = np.random.default_rng(seed)
    sp = space1(4, 1, 0)
    u, v = random_seq(rng, sp), random_seq(rng, sp)
    coarse = conv(u, v)
    fine = conv(u, v, box="full")
    # the fine result lies in the coarse ball: in-box coefficients agree and the rest fits the tail
    diff = fine.with_box((4,)).coeffs.mid() - coarse.coeffs.mid()
    assert np.max(np.abs(diff)) < 1e-12
    outside = fine.coeffs.mag() * fine.space.full_weights().hi
    outside[4:13] = 0.0
    assert outside.sum() <= coarse.tail.hi * (1 + 1e-12)


def test_odd_times_odd_is_even():
    sp = space1(4, 1, 0, parity=-1, real=True)
    a = np.zeros(9, dtype=complex)
    a[5], a[3] = -0.5j, 0.5j
    a[6], a[2] = -0.25j, 0.25j
    u = FourierSeq(sp, a)
    r = conv(u, u)
    assert r.space.parity == 1 and r.space.real
    c = r.coeffs.mid()
    assert np.allclose(c, c[::-1]) and np.allclose(c.imag, 0)
    d = apply_symbol(r, Symbol.dx(), target=(Weight(),))
    assert d.space.parity == -1 and d.space.real


# -- symbols ----------------------------------------------------------------------


def test_dx_on_first_mode():
    r = apply_symbol(mode(space1(), 1), Symbol.dx())
    assert r.coeffs.contains(np.array([0, 0, 0, 0, 0, 1j, 0, 0, 0])).all()


def test_s_ds_on_taylor_index():
    sp = SeqSpace(("fourier", "taylor"), (2, 4), (Weight(), Weight()))
    a = np.zeros(sp.shape, dtype=complex)
    a[2 + 1, 3] = 1.0
    r = apply_symbol(FourierSeq(sp, a), Symbol.s_ds())
    assert r.coeffs.contains(3 * a).all()


def test_ks_fourth_order_symbol():
    # d^4 + 2 d^2 acts by k^4 - 2 k^2
    sym = Symbol((0, 0, -2, 0, 1))
    sp = space1(5)
    for k in range(-5, 6):
        r = apply_symbol(mode(sp, k), sym)
        assert (k**4 - 2 * k**2) in r.coeffs[5 + k].re


def test_unbounded_symbol_on_tail_needs_target():
    u = mode(space1(4, 2, 0), 1).with_tail(0.1)
    with pytest.raises(SpaceError):
        apply_symbol(u, Symbol.dx())
    r = apply_symbol(u, Symbol.dx(), target=(Weight(1, 0),))
    assert r.tail.hi > 0 and r.space.weights == (Weight(1, 0),)


# -- pairings ---------------------------------------------------------------------


def test_inner_orthonormal():
    sp = space1()
    assert 1 in inner_l2(mode(sp, 1), mode(sp, 1)).re
    z = inner_l2(mode(sp, 1), mode(sp, 2))
    assert z.re == Interval(0) and z.im == Interval(0)


def test_inner_rational_oracle():
    rng = np.random.default_rng(7)
    sp = space1(6)
    a = rng.integers(-5, 6, 13) / 4 + 1j * rng.integers(-5, 6, 13) / 8
    b = rng.integers(-5, 6, 13) / 2 + 1j * rng.integers(-5, 6, 13) / 16
    z = inner_l2(FourierSeq(sp, a), FourierSeq(sp, b))
    re = sum(Fraction(x.real) * Fraction(y.real) + Fraction(x.imag) * Fraction(y.imag) for x, y in zip(a, b))
    assert Fraction(z.re.lo) <= re <= Fraction(z.re.hi)


def test_pair_equals_inner_for_real_functions():
    rng = np.random.default_rng(8)
    sp = space1(5, real=True)
    a = rng.normal(size=11) + 1j * rng.normal(size=11)
    a = (a + np.conj(a[::-1])) / 2
    b = rng.normal(size=11) + 1j * rng.normal(size=11)
    b = (b + np.conj(b[::-1])) / 2
    u, v = FourierSeq(sp, a), FourierSeq(sp, b)
    assert abs(pair(u, v).mid() - inner_l2(u, v).mid()) < 1e-12


def test_dual_norm():
    assert abs(dual_norm(mode(space1(mu1=1), 1)).hi - 0.5) < 1e-15
    assert dual_norm(FourierSeq.zeros(space1())).hi == 0.0
    rng = np.random.default_rng(9)
    u = random_seq(rng, space1(7, 1, 0.1))
    c = u.coeffs.mid()
    brute = max(abs(c[i]) / float(Weight(1, 0.1).at(i - 7).mid) for i in range(15))
    assert abs(dual_norm(u).hi - brute) < 1e-12 * brute


@given(st.integers(0, 10**6), st.floats(0, 0.1))
def test_dual_pairing_bound(seed, tail):
    rng = np.random.default_rng(seed)
    sp = space1(5, 1, 0.05)
    u, v = random_seq(rng, sp).with_tail(tail), random_seq(rng, sp)
    assert inner_l2(u, v).mag() <= (norm_l1w(u) * dual_norm(v)).hi * (1 + 1e-12)


# -- algebraic decay ----------------------------------------------------------------


def _brute_algebra(s, nmax):
    def w(n):
        return 1.0 if n == 0 else abs(n) ** s
    best = 0.0
    for n in range(0, nmax + 1):
        tot = sum(w(n) / (w(k) * w(n - k)) for k in range(-2000, n + 2001))
        best = max(best, tot)
    return best


def test_algebra_const_dominates_partial_sup():
    c2 = algebra_const(2.0)
    assert c2.lo >= 1.0
    assert c2.hi >= _brute_algebra(2.0, 60)


def test_algebra_const_growth_with_s():
    # with w_n = |n| the n = 2 sum alone exceeds 2 + 2^s, so C(s) grows with s
    c2, c4 = algebra_const(2.0), algebra_const(4.0)
    assert c4.hi >= _brute_algebra(4.0, 30)
    assert c4.hi > c2.hi


def test_algebra_const_domain():
    with pytest.raises(DomainError):
        algebra_const(1.0)


def test_decay_seq_product_bound():
    rng = np.random.default_rng(10)
    n = np.arange(-8, 9)
    w = np.maximum(np.abs(n), 1.0) ** 2
    a = DecaySeq(rng.normal(size=17) / w, 2.0)
    b = DecaySeq(rng.normal(size=17) / w, 2.0)
    prod = np.convolve(a.coeffs.mid(), b.coeffs.mid())
    m = np.arange(-16, 17)
    direct = np.max(np.abs(prod) * np.maximum(np.abs(m), 1.0) ** 2)
    assert direct <= a.conv_bound(b).hi


def test_decay_bound_of_ball():
    sp = space1(4, 0, 0.5)
    u = mode(sp, 2, 0.25).with_tail(1e-3)
    d = decay_bound(u, 3.0)
    assert d.hi >= 0.25 * 8
    with pytest.raises(SpaceError):
        decay_bound(mode(space1(4, 1, 0), 1).with_tail(0.1), 3.0)


# -- files ------------------------------------------------------------------------


def test_text_roundtrip_is_bit_exact():
    rng = np.random.default_rng(12)
    sp = SeqSpace(("fourier", "taylor"), (3, 2), (Weight(2, 0.05), Weight()))
    u = random_seq(rng, sp).with_tail(1.25e-9)
    v = FourierSeq.from_text(u.to_text())
    assert v.space == u.space
    assert np.array_equal(v.coeffs.re.lo, u.coeffs.re.lo) and np.array_equal(v.coeffs.im.hi, u.coeffs.im.hi)
    assert v.tail == u.tail


def test_coefficients_are_immutable():
    u = mode(space1(), 1)
    with pytest.raises(AttributeError):
        u.tail = Interval(1)
    assert isinstance(u.coeffs, CIArray)
