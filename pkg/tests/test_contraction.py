import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capde.contraction import (
    Certificate,
    KantorovichData,
    RadiiPolynomial,
    check_thm21,
    check_thm22,
    choose_rho,
    nonexistence_annulus,
    prove_radii,
    radii_find,
)
from capde.errors import DomainError, EmptyIntervalError, VerificationFailed
from capde.interval import Interval
from oracles import mp_in

P = RadiiPolynomial(Interval(0.01), (Interval(0.5), Interval(0.1)))


def mp_roots():
    with mpmath.workdps(50):
        # the binary inputs, not the decimal ones
        a, b, c = mpmath.mpf(0.1), mpmath.mpf(-0.5), mpmath.mpf(0.01)
        r1 = mpmath.findroot(lambda x: a * x**2 + b * x + c, 0.02)
        r2 = mpmath.findroot(lambda x: a * x**2 + b * x + c, 5.0)
        d = mpmath.sqrt(b * b - 4 * a * c)
        assert abs(r1 - (-b - d) / (2 * a)) < mpmath.mpf(10) ** -40
        assert abs(r2 - (-b + d) / (2 * a)) < mpmath.mpf(10) ** -40
        return r1, r2


# -- Lipschitz form ---------------------------------------------------------------


def test_thm21_example():
    du = check_thm21(KantorovichData(0.1, 0.5, 0.2, 1.0, 0.5))
    assert du.hi >= 0.5 / 0.7 and du.hi - 0.5 / 0.7 < 1e-15


def test_thm21_exact_solution():
    assert check_thm21(KantorovichData(0, 0, 0, 0.3, 0)).hi == 0.0


@pytest.mark.parametrize("data,label", [
    ((1.0, 0.1, 0.0, 1.0, 0.1), "a"),
    ((0.1, 0.1, 0.0, 1.0, 0.2), "b"),
    ((0.5, 0.6, 0.1, 1.0, 0.5), "d"),
    ((0.6, 0.1, 0.5, 1.0, 0.1), "e"),
])
def test_thm21_reports_first_failed_condition(data, label):
    with pytest.raises(VerificationFailed) as err:
        check_thm21(KantorovichData(*data))
    assert err.value.label == label


def test_negative_inputs_rejected():
    with pytest.raises(DomainError):
        KantorovichData(-0.1, 0, 0, 1, 0)
    with pytest.raises(DomainError):
        RadiiPolynomial(Interval(-1.0), (Interval(0.5),))
    with pytest.raises(DomainError):
        RadiiPolynomial(Interval(0.0), tuple(Interval(0.1) for _ in range(7)))


# -- radii polynomial ---------------------------------------------------------------


def test_radii_roots_match_high_precision(mp50):
    r1, r2 = mp_roots()
    lo, hi = radii_find(P)
    assert mp_in(lo, r1) and mp_in(hi, r2)
    assert lo.width < 1e-10 and hi.width < 1e-10
    # decimal values of the two zeros
    assert abs(float(r1) - 0.0200806) < 1e-7 and abs(float(r2) - 4.9799194) < 1e-7


def test_radii_linear_exact_case():
    lo, hi = radii_find(RadiiPolynomial(Interval(0.0), (Interval(0.5),)))
    assert lo == Interval(0.0) and hi is None
    assert check_thm22(0.0, RadiiPolynomial(0.0, (0.5,)), 1e-3).rho.lo == 1e-3


def test_radii_kappa1_at_least_one_fails():
    with pytest.raises(EmptyIntervalError):
        radii_find(RadiiPolynomial(Interval(1.0), (Interval(1.5),)))


def test_radii_no_negative_interval():
    with pytest.raises(EmptyIntervalError):
        radii_find(RadiiPolynomial(Interval(1.0), (Interval(0.5), Interval(1.0))))


def test_radii_higher_degree_bisection(mp50):
    p = RadiiPolynomial(Interval(1e-4), (Interval(0.3), Interval(0.2), Interval(0.05)))
    lo, hi = radii_find(p)
    f = lambda x: mpmath.mpf(0.05) * x**3 + mpmath.mpf(0.2) * x**2 + (mpmath.mpf(0.3) - 1) * x + mpmath.mpf(1e-4)  # noqa: E731
    assert mp_in(lo, mpmath.findroot(f, 1.4e-4)) and mp_in(hi, mpmath.findroot(f, 2.0))


def test_thm22_examples():
    check_thm22(0.01, P, 0.1)
    check_thm22(0.01, P, 3.0)
    lo, hi = radii_find(P)
    for r in (lo, hi):
        with pytest.raises(VerificationFailed):
            check_thm22(0.01, P, r)
    with pytest.raises(VerificationFailed):
        check_thm22(0.01, P, 0.0)


def test_choose_rho_policies():
    lo, hi = radii_find(P)
    for pol in ("min", "max", "geo", 1.0):
        r = choose_rho(lo, hi, pol)
        assert lo.hi < r < hi.lo
        check_thm22(0.01, P, r)
    with pytest.raises(ValueError):
        choose_rho(lo, hi, "mid")


# -- annulus ------------------------------------------------------------------------


def test_annulus_verified():
    assert nonexistence_annulus(P, 0.1, 4.0)


def test_annulus_near_upper_root_fails():
    with pytest.raises(VerificationFailed):
        nonexistence_annulus(P, 4.9, 5.0)


def test_degenerate_annulus():
    assert nonexistence_annulus(P, 2.0, 2.0)


# -- properties ---------------------------------------------------------------------


@given(st.floats(0, 1e-3), st.floats(0, 0.9), st.floats(0, 2.0), st.floats(0, 1), st.floats(0, 1))
def test_soundness_under_tighter_bounds(eps, k1, k2, s1, s2):
    p = RadiiPolynomial(Interval(eps), (Interval(k1), Interval(k2)))
    try:
        lo, hi = radii_find(p)
    except EmptyIntervalError:
        return
    rho = choose_rho(lo, hi, "geo")
    check_thm22(eps, p, rho)
    q = RadiiPolynomial(Interval(eps * s1), (Interval(k1 * s2), Interval(k2 * s1)))
    check_thm22(eps * s1, q, rho)


@given(st.floats(1e-8, 1e-2), st.floats(0, 0.9), st.floats(1e-3, 2.0), st.floats(0.001, 0.999))
def test_interior_radii_pass(eps, k1, k2, t):
    p = RadiiPolynomial(Interval(eps), (Interval(k1), Interval(k2)))
    try:
        lo, hi = radii_find(p)
    except EmptyIntervalError:
        return
    r = lo.hi + t * (hi.lo - lo.hi)
    if lo.hi < r < hi.lo:
        check_thm22(eps, p, r)


@given(st.floats(1e-8, 1e-3), st.floats(0, 0.5), st.floats(1e-3, 1.0))
def test_lipschitz_form_agrees_with_radii(eps, k1, k2):
    p = RadiiPolynomial(Interval(eps), (Interval(k1), Interval(k2)))
    lo, hi = radii_find(p)
    rho = choose_rho(lo, hi, "geo")
    # alpha = kappa_1, K = kappa_2 rho, b = eps + K rho covers the whole ball
    K = (Interval(k2) * rho).hi
    b = (Interval(eps) + Interval(K) * rho).hi
    du = check_thm21(KantorovichData(k1, b, K, rho, eps))
    assert du.hi >= lo.lo


# -- certificates -------------------------------------------------------------------


def test_certificate_roundtrip_and_replay():
    c = prove_radii(P, digest="abc", header={"kind": "test"})
    text = c.to_text()
    d = Certificate.from_text(text)
    assert d == c and d.replay() and d.to_text() == text


def test_thm21_certificate_roundtrip():
    data = KantorovichData(0.1, 0.5, 0.2, 1.0, 0.5)
    du = check_thm21(data)
    c = Certificate("thm21", {"alpha": data.alpha, "b": data.b, "K": data.K, "rho": data.rho, "bf": data.bf},
                    data.rho, None, None, du)
    assert Certificate.from_text(c.to_text()).replay()


def test_certificate_tamper_detected():
    text = prove_radii(P).to_text()
    bad = text.replace("bound eps [", "bound eps [1", 1)
    with pytest.raises(ValueError):
        Certificate.from_text(bad)


def test_certificate_hex_mismatch_detected():
    c = prove_radii(P)
    text = c.to_text()
    eps_hex = Interval(0.01).to_hex()
    other = Interval(0.02).to_hex()
    bad = text.replace(eps_hex, other, 1)
    with pytest.raises(ValueError):
        Certificate.from_text(bad, verify_checksum=False)


def test_replay_rejects_inconsistent_bounds():
    c = prove_radii(P)
    forged = Certificate(c.method, {"eps": Interval(1.0), "kappa1": Interval(0.5), "kappa2": Interval(0.1)},
                         c.rho, c.rho_minus, c.rho_plus, c.delta_u)
    text = forged.to_text()
    with pytest.raises(VerificationFailed):
        Certificate.from_text(text).replay()


def test_upper_root_beyond_float_range():
    p = RadiiPolynomial(Interval(0.0), (Interval(0.0), Interval(2.225073858507e-311)))
    lo, hi = radii_find(p)
    assert lo == Interval(0.0) and hi.lo > 1e300
    check_thm22(0.0, p, choose_rho(lo, hi, "geo"))
