import numpy as np
import pytest

from capde.errors import ApproximationFailed
from capde.numeric import galerkin_eigs, galerkin_newton, solve_linear
from capde.problems.kinds import equilibrium_system, eigen_system, jet_system
from capde.problems.spec import ks_spec
from capde.sequences import FourierSeq, Weight


def sine_seq(space, b):
    n = space.box[0]
    a = np.zeros(2 * n + 1, dtype=complex)
    for k, v in enumerate(b, start=1):
        a[n + k] += -0.5j * v
        a[n - k] += 0.5j * v
    return FourierSeq.from_full(space, a)


@pytest.fixture(scope="module")
def ks24():
    sp = ks_spec(box=(24,), weights=(Weight(2, 0.05),))
    system = equilibrium_system(sp)
    guess = sine_seq(system.space, [0.3])
    deflate = [system.pack(np.zeros(0), FourierSeq.zeros(system.space))]
    return sp, system, galerkin_newton(system, np.zeros(0), guess, deflate=deflate)


def test_exact_guess_takes_no_steps(caplog):
    sp = ks_spec(box=(8,))
    system = equilibrium_system(sp)
    zero = FourierSeq.zeros(system.space)
    with caplog.at_level("DEBUG", logger="capde.numeric"):
        cand = galerkin_newton(system, np.zeros(0), zero)
    assert not [r for r in caplog.records if "newton step" in r.getMessage()]
    assert np.all(cand.u.mid() == 0)


def test_ks_equilibrium_residual(ks24):
    _, system, cand = ks24
    f = system.galerkin_residual(system.pack(cand.z, cand.u))
    assert np.max(np.abs(f)) < 1e-12
    assert np.max(np.abs(cand.u.mid())) > 0.1


def test_refinement_agrees(ks24):
    sp, _, cand = ks24
    system48 = equilibrium_system(sp.with_box((48,)))
    guess = cand.u.with_box((48,))
    fine = galerkin_newton(system48, np.zeros(0), FourierSeq(system48.space, guess.coeffs))
    diff = np.max(np.abs(fine.u.with_box((24,)).mid() - cand.u.mid()))
    assert diff < 1e-10


def test_far_guess_fails():
    sp = ks_spec(box=(8,))
    system = equilibrium_system(sp)
    guess = sine_seq(system.space, [1e6, -1e6, 1e6])
    with pytest.raises(ApproximationFailed):
        galerkin_newton(system, np.zeros(0), guess, max_iter=5)


def test_eigenvalues_at_zero_are_the_symbol():
    sp = ks_spec(box=(6,))
    system = equilibrium_system(sp)
    pairs = galerkin_eigs(system, FourierSeq.zeros(system.space))
    lam = sorted((p[0].real for p in pairs), reverse=True)
    expect = sorted((-(k**4) + 2 * k**2 for k in range(1, 7)), reverse=True)
    assert np.allclose(lam, expect)
    assert abs(pairs[0][0] - 1.0) < 1e-12
    v = pairs[0][1]
    assert np.count_nonzero(np.abs(v) > 1e-12) == 1


def test_eigen_self_residual(ks24):
    sp, system, cand = ks24
    pairs = galerkin_eigs(system, cand.u)
    lam, v = pairs[0]
    es = eigen_system(sp, cand.u)
    vs = FourierSeq.from_coords(es.space, v)
    J = es.galerkin_jacobian(es.pack(np.zeros(1), FourierSeq.zeros(es.space)))[1:, 1:]
    r = J @ vs.mid_coords() - lam * vs.mid_coords()
    assert np.linalg.norm(r) < 1e-8 * max(1.0, abs(lam))


def test_solve_linear_matches_dense_solve():
    sp = ks_spec(box=(6,))
    space = sp.space("jets")
    forcing = [(sp.terms[0].coef, sp.terms[0].symbol(), sine_seq(space, [0.2, 0.1]))]
    system = jet_system(sp, FourierSeq.zeros(space), 1.0, 2, forcing)
    cand = solve_linear(system)
    f = system.galerkin_residual(system.pack(cand.z, cand.u))
    assert np.max(np.abs(f)) < 1e-14
