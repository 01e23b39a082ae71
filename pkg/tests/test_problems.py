import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capde.contraction import check_thm22
from capde.errors import ConfigError, PreconditionError, ResonantTailError, SymmetryError
from capde.interval import CInterval, Interval
from capde.numeric import galerkin_newton
from capde.problems.kinds import (
    bounds_equilibrium,
    equilibrium_system,
    jet_forcing,
    manifold_jets,
    manifold_system,
    phase_rows,
    residual_eigenpair,
    residual_equilibrium,
    residual_manifold,
    residual_orbit,
    residual_wave,
)
from capde.problems.spec import NonlinearTerm, ProblemSpec, ks_spec, parse_config
from capde.sequences import FourierSeq, SeqSpace, Weight, conv, pair
from capde.symbols import Symbol
from oracles import ks_galerkin_residual_mp

MANUFACTURED = """
[problem]
kind = orbit
linear = -2, 0, 2, 0, -1
symmetry = none

[nonlinearity]
term1 = coef=1 power=2 dpoly=4/3, 4/3, 1/3, 1/3

[space]
weights = 0, 0
theta_weights = 0, 0
box = 4, 4
"""


def sine_seq(space, b):
    """Odd real sequence sum_k b_k sin(k x) on a one-dimensional space."""
    n = space.box[0]
    a = np.zeros(2 * n + 1, dtype=complex)
    for k, v in enumerate(b, start=1):
        a[n + k] += -0.5j * v
        a[n - k] += 0.5j * v
    return FourierSeq.from_full(space, a)


def contains_zero(ci, slack=0.0):
    return bool(np.all(ci.re.lo <= slack) and np.all(ci.re.hi >= -slack)
                and np.all(ci.im.lo <= slack) and np.all(ci.im.hi >= -slack))


# -- configuration ------------------------------------------------------------------


def test_parse_ks_config():
    cfg = parse_config("[problem]\nkind = equilibrium\nalpha = 2\n[space]\nweights = 2, 0.05\nbox = 10\n"
                       "[seed]\nsin 1 = 0.3\nc = -1\n")
    sp = cfg.spec
    assert cfg.kind == "equilibrium" and sp.box == (10,) and sp.weights[0] == Weight(2, 0.05)
    assert 2 in sp.alpha_ks and sp.symmetry == "odd"
    assert cfg.seed[(1,)] == pytest.approx(-0.15j) and cfg.seed[(-1,)] == pytest.approx(0.15j)
    assert cfg.seed_scalars["c"] == -1
    assert 1 in sp.linear.eval_point(1).re


def test_parse_overrides_and_custom_terms():
    cfg = parse_config(MANUFACTURED, {"box": "3,2", "alpha": "3"})
    assert cfg.spec.box == (3, 2)
    assert len(cfg.spec.terms) == 1 and cfg.spec.terms[0].power == 2
    assert cfg.spec.weights[1] == Weight(0, 0)


@pytest.mark.parametrize("text", [
    "[space]\nbox = 4\n",
    "[problem]\nkind = cycle\nalpha = 2\n",
    "[problem]\nalpha = 2\nfoo = 1\n",
    "[problem]\nkind = equilibrium\n",
    "[problem]\nalpha = 2\n[space]\nweights = 1, 2, 3\n",
    "[problem]\nalpha = 2\n[space]\nbox = four\n",
    "[problem]\nalpha = 2\nsymmetry = sideways\n",
    "[problem]\nalpha = 2\n[nonlinearity]\nt = coef=1 deriv=1\n",
    "[problem]\nalpha = 2\n[seed]\nsine 1 = 0.3\n",
    "[problem\nalpha = 2\n",
])
def test_malformed_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_nonlinearity_must_start_at_quadratic_order():
    with pytest.raises((ConfigError, ValueError)):
        NonlinearTerm.derivative(CInterval(Interval(1.0)), 1, 0)


def test_wave_needs_no_symmetry_class():
    with pytest.raises(SymmetryError):
        ks_spec(box=(6,)).space("wave")


def test_resonant_linear_part_detected():
    # alpha = 4 makes l(2) = 0 in the odd class
    with pytest.raises(PreconditionError):
        equilibrium_system(ks_spec(alpha=4, box=(6,)))
    equilibrium_system(ks_spec(alpha=4, box=(6,), lambda_reg=1))


# -- residuals ----------------------------------------------------------------------


def test_zero_is_an_equilibrium():
    sp = ks_spec(box=(6,))
    r = residual_equilibrium(sp, FourierSeq.zeros(sp.space("equilibrium")))
    assert np.all(r.coeffs.mag() == 0.0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_single_mode_residual(k):
    sp = ks_spec(box=(8,))
    u = sine_seq(sp.space("equilibrium"), [0.0] * (k - 1) + [1.0])
    r = residual_equilibrium(sp, u)
    n = r.box[0]
    mag = r.coeffs.mag()
    lk = -k**4 + 2 * k**2
    nz = {n + k, n - k, n + 2 * k, n - 2 * k}
    assert all(mag[i] < 1e-150 for i in range(2 * n + 1) if i not in nz)
    assert abs(r.coeffs.im.mid()[n + k] - (-0.5 * lk)) < 1e-14
    # sin^2 = (1 - cos 2kx) / 2, so (1/2) d_x sin^2 has coefficient (2k i / 2)(-1/4) at 2k
    assert abs(r.coeffs.mid()[n + 2 * k] - 1j * 2 * k / 2 * (-0.25)) < 1e-14


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_equilibrium_residual_matches_high_precision(seed):
    rng = np.random.default_rng(seed)
    sp = ks_spec(alpha=2.5, box=(8,))
    b = rng.normal(size=8) / np.arange(1, 9) ** 2
    u = sine_seq(sp.space("equilibrium"), b)
    r = residual_equilibrium(sp, u)
    n = r.box[0]
    with mpmath.workdps(50):
        ref = ks_galerkin_residual_mp(list(u.mid()), mpmath.mpf(2.5), n_out=n)
        for i, v in enumerate(ref):
            z = r.coeffs[i]
            assert mpmath.mpf(z.re.lo) <= v.real <= mpmath.mpf(z.re.hi)
            assert mpmath.mpf(z.im.lo) <= v.imag <= mpmath.mpf(z.im.hi)


def test_odd_class_is_preserved():
    rng = np.random.default_rng(3)
    sp = ks_spec(box=(8,))
    r = residual_equilibrium(sp, sine_seq(sp.space("equilibrium"), rng.normal(size=8)))
    assert r.space.parity == -1
    assert np.all(r.coeffs.re.lo <= 0.0) and np.all(r.coeffs.re.hi >= 0.0)
    n = r.box[0]
    assert np.all(r.coeffs.mag()[n] == 0.0)


def test_wave_residual_examples():
    sp = ks_spec(box=(4,), symmetry="none")
    space = sp.space("wave")
    seq, row = residual_wave(sp, FourierSeq.zeros(space), 0.7)
    assert np.all(seq.coeffs.mag() == 0.0) and -1 in row.re
    a = np.zeros(9, dtype=complex)
    a[3] = a[5] = 1 / np.sqrt(2)
    _, row = residual_wave(sp, FourierSeq.from_full(space, a), 0.7)
    assert abs(row.re.mid) < 1e-15


def test_manufactured_wave_is_exact():
    cfg = parse_config(MANUFACTURED.replace("kind = orbit", "kind = wave").replace("box = 4, 4", "box = 4"))
    space = cfg.spec.space("wave")
    a = np.zeros(9, dtype=complex)
    a[4], a[3], a[5] = 0.5, 0.5, 0.5
    seq, _ = residual_wave(cfg.spec, FourierSeq.from_full(space, a), -1.0)
    assert contains_zero(seq.coeffs)


def test_transport_orbit_cancels():
    # l(k) = i k, so cos(x + theta) solves a v_theta = l v with a = 1
    sp = ProblemSpec(linear=Symbol((0, 1j)), terms=(), symmetry="none", weights=(Weight(), Weight()), box=(2, 2))
    space = sp.space("orbit")
    a = np.zeros(space.shape, dtype=complex)
    a[3, 3] = a[1, 1] = 0.5
    v = FourierSeq.from_full(space, a)
    seq, row = residual_orbit(sp, v, 1.0)
    assert np.all(seq.coeffs.mag() == 0.0)
    assert row.re.lo <= 0 <= row.re.hi


def test_manufactured_orbit_is_exact():
    cfg = parse_config(MANUFACTURED)
    space = cfg.spec.space("orbit")
    a = np.zeros(space.shape, dtype=complex)
    c = np.array(space.offsets)
    a[tuple(c)] = 0.5
    a[c[0] + 1, c[1] + 1] = a[c[0] - 1, c[1] - 1] = 0.5
    seq, row = residual_orbit(cfg.spec, FourierSeq.from_full(space, a), 1.0)
    assert contains_zero(seq.coeffs)
    assert row.re.lo <= 0 <= row.re.hi
    seq, _ = residual_orbit(cfg.spec, FourierSeq.from_full(space, a), 1.1)
    assert not contains_zero(seq.coeffs)


def test_orbit_phase_row_orthogonal_correction():
    cfg = parse_config(MANUFACTURED)
    space = cfg.spec.space("orbit")
    c = np.array(space.offsets)
    a = np.zeros(space.shape, dtype=complex)
    a[c[0] + 1, c[1] + 1] = a[c[0] - 1, c[1] - 1] = 0.5
    w = np.zeros(space.shape, dtype=complex)
    w[c[0] + 2, c[1]] = w[c[0] - 2, c[1]] = 0.3     # no theta dependence, so orthogonal to v_theta
    _, row = residual_orbit(cfg.spec, FourierSeq.from_full(space, a), 1.0, FourierSeq.from_full(space, w))
    assert row.re.lo <= 0 <= row.re.hi and row.im.lo <= 0 <= row.im.hi


@pytest.mark.parametrize("k", [1, 2, 3])
def test_diagonal_eigenpair(k):
    sp = ks_spec(box=(6,))
    space = sp.space("eigenpair")
    v = sine_seq(space, [0.0] * (k - 1) + [np.sqrt(2.0)])
    seq, row = residual_eigenpair(sp, FourierSeq.zeros(space), -(k**4) + 2 * k**2, v)
    assert np.all(seq.coeffs.mag() <= 1e-13)
    assert abs(row.re.mid) < 1e-15


def test_phase_rows():
    rng = np.random.default_rng(5)
    space = SeqSpace(("fourier",), (4,), (Weight(),), parity=0, real=True)
    a = rng.normal(size=9) + 1j * rng.normal(size=9)
    a = (a + np.conj(a[::-1])) / 2
    u = FourierSeq.from_full(space, a)
    r = phase_rows("fixed", u)
    assert 0 in r.const + pair(u, r.vref)
    b = np.zeros(9, dtype=complex)
    b[4 + 1] = b[4 - 1] = 1.0
    c = np.zeros(9, dtype=complex)
    c[4 + 2] = c[4 - 2] = 2.0
    sec = phase_rows("section", None, FourierSeq.from_full(space, b))
    assert pair(FourierSeq.from_full(space, c), sec.vref) == CInterval(0.0)
    # rational dot product oracle
    from fractions import Fraction
    exact = sum(Fraction(a[i].real) * Fraction(a[8 - i].real) - Fraction(a[i].imag) * Fraction(a[8 - i].imag)
                for i in range(9))
    p = pair(u, u)
    assert Fraction(p.re.lo) <= exact <= Fraction(p.re.hi)
    with pytest.raises(ValueError):
        phase_rows("pinned", u)


# -- bounds -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def ks10():
    sp = ks_spec(box=(10,), weights=(Weight(2, 0.05),))
    system = equilibrium_system(sp)
    guess = sine_seq(system.space, [0.3])
    deflate = [system.pack(np.zeros(0), FourierSeq.zeros(system.space))]
    cand = galerkin_newton(system, np.zeros(0), guess, deflate=deflate)
    return sp, system, cand


def test_ten_mode_defect_below_one(ks10):
    sp, system, cand = ks10
    b = system.bounds(np.zeros(0), cand.u)
    assert b.kappas[0].hi < 1.0
    assert all(k.lo >= 0.0 for k in b.kappas)
    assert b.B is not None


def test_ten_mode_radii_polynomial(ks10):
    sp, system, cand = ks10
    p = bounds_equilibrium(sp, cand.u)
    assert p.degree == 2
    # ten modes leave a truncation error of a few 1e-7
    assert p.eps.hi < 1e-6
    check_thm22(p.eps, p, 1e-6)


def test_trivial_equilibrium_bounds_are_exact():
    sp = ks_spec(box=(6,))
    p = bounds_equilibrium(sp, FourierSeq.zeros(sp.space("equilibrium")))
    assert p.eps == Interval(0.0)
    assert p.kappas[0].hi < 1e-12


# -- manifolds ----------------------------------------------------------------------


def test_linear_problem_has_trivial_jets():
    sp = ProblemSpec(linear=Symbol((0, 0, 2, 0, -1)), terms=(), symmetry="odd", weights=(Weight(1, 0),), box=(6,))
    space = sp.space("jets")
    u1 = sine_seq(space, [0.5])
    jr = manifold_jets(sp, FourierSeq.zeros(space), 1.0, u1, 5)
    for u in jr.jets[2:]:
        assert np.all(u.coeffs.mag() == 0.0) and u.tail.hi == 0.0
    assert all(m.lo > 0 for m in jr.margins)


def test_second_order_forcing_is_the_square():
    sp = ks_spec(box=(6,))
    space = sp.space("jets")
    u1 = sine_seq(space, [0.5, 0.1])
    (_, _, w), = jet_forcing(sp, [FourierSeq.zeros(space), u1], 2)
    sq = conv(u1, u1, box="full")
    assert np.allclose(w.coeffs.mid(), sq.with_box(w.box).coeffs.mid())


def test_jets_solve_the_invariance_equation():
    sp = ks_spec(box=(8,), weights=(Weight(1, 0),))
    space = sp.space("jets")
    u1 = sine_seq(space, [0.25])
    jr = manifold_jets(sp, FourierSeq.zeros(space), 1.0, u1, 4)
    # n lambda u_n = l u_n + (1/2) d_x [U^2]_n, checked in 50 digits from the midpoints
    with mpmath.workdps(50):
        jets = [j.with_box((12,)).mid() for j in jr.jets]
        for n in range(2, 5):
            sq = [mpmath.mpc(0)] * 25
            for i in range(n + 1):
                prod = np.convolve(jets[i], jets[n - i])[12:37]
                for t in range(25):
                    sq[t] += mpmath.mpc(prod[t])
            rad = max(j.tail.hi for j in jr.jets[2:]) + 1e-12
            for t in range(25):
                k = t - 12
                lk = -mpmath.mpf(k) ** 4 + 2 * k**2
                res = (n - lk) * mpmath.mpc(jets[n][t]) - mpmath.mpc(0, k) / 2 * sq[t]
                assert abs(res) <= rad * (abs(n - lk) + 4 * abs(k) + 1)


def test_manifold_residual_vanishes_for_linear_problem():
    sp = ProblemSpec(linear=Symbol((0, 0, 2, 0, -1)), terms=(), symmetry="odd",
                     weights=(Weight(1, 0), Weight()), box=(6, 4))
    jspace = sp.space("jets")
    u1 = sine_seq(jspace, [0.5])
    g = FourierSeq.zeros(sp.space("manifold_fp"))
    r = residual_manifold(sp, FourierSeq.zeros(jspace), u1, 1.0, g)
    assert np.all(r.coeffs.mag() == 0.0)


def test_manifold_needs_positive_rate():
    sp = ks_spec(box=(6, 4), weights=(Weight(1, 0), Weight()))
    jspace = sp.space("jets")
    with pytest.raises(ResonantTailError):
        manifold_system(sp, FourierSeq.zeros(jspace), sine_seq(jspace, [0.5]), -1.0)
