import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capde.errors import NotContractingError, SpaceError
from capde.interval import CIArray, IArray
from capde.operators import BlockTailOperator, TailSpec, compose_bound, defect, neumann_bound, op_norm
from capde.sequences import FourierSeq, SeqSpace, Weight, norm_l1w
from capde.symbols import RationalSymbol, Symbol


def brute_column_sup(T, rw, cw):
    return max(sum(abs(T[i, j]) * rw[i] for i in range(T.shape[0])) / cw[j] for j in range(T.shape[1]))


def test_identity_norm_is_one():
    sp = SeqSpace(("fourier",), (5,), (Weight(2, 0.05),))
    for T in (BlockTailOperator.identity(sp), BlockTailOperator.identity(size=3)):
        n = op_norm(T)
        assert 1.0 in n and n.width < 1e-14


def test_diagonal_sup():
    assert 3 in op_norm(BlockTailOperator.diagonal([2, 3]))


def test_random_block_matches_brute_force():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(4, 4))
    rw, cw = rng.uniform(1, 3, 4), rng.uniform(1, 3, 4)
    T = BlockTailOperator(CIArray.point(M), IArray.point(rw), IArray.point(cw))
    n = op_norm(T)
    exact = brute_column_sup(M, rw, cw)
    assert n.lo <= exact <= n.hi
    assert n.hi - exact <= 1e-12 * exact


def test_tail_contributes_to_norm():
    sp = SeqSpace(("fourier",), (2,), (Weight(),))
    tail = RationalSymbol(Symbol.const(7))
    T = BlockTailOperator.diagonal(np.ones(sp.ncoords), sp, tail=tail)
    assert op_norm(T).hi >= 7


def test_missing_tail_bound_is_an_error():
    sp = SeqSpace(("fourier",), (2,), (Weight(),))
    T = BlockTailOperator.on_space(CIArray.point(np.eye(sp.ncoords)), sp)
    with pytest.raises(SpaceError):
        op_norm(T)


def test_compose_identity():
    I = BlockTailOperator.identity(size=4)
    b = compose_bound(I, I)
    assert 1.0 in b and b.width < 1e-14


def test_compose_scalars():
    A = BlockTailOperator.diagonal([2.0])
    B = BlockTailOperator.diagonal([0.5])
    b = compose_bound(A, B)
    assert 1.0 in b and b.width < 1e-14


def test_two_spaces_composition():
    # B = d_x from a strong weight into the intermediate one, A = (1 + k^4)^-1 back
    src, via = Weight(4.0), Weight(3.0)
    N = 6
    s_src = SeqSpace(("fourier",), (N,), (src,))
    s_via = SeqSpace(("fourier",), (N,), (via,))
    k = s_src.coord_indices()[:, 0]
    B = BlockTailOperator.diagonal(1j * k, s_src, tail=RationalSymbol(Symbol.dx()))
    B = BlockTailOperator.on_space(B.block, s_src, s_via, tail=RationalSymbol(Symbol.dx()))
    den = Symbol((1, 0, 0, 0, 1))
    A = BlockTailOperator.on_space(BlockTailOperator.diagonal(1.0 / (1.0 + k**4)).block, s_via,
                                   tail=RationalSymbol(Symbol.identity(), den))
    bound = compose_bound(A, B, via=via)
    assert np.isfinite(bound.hi)
    with mpmath.workdps(30):
        # sup of the true composed symbol |n| / (1 + n^4) over the weights' ratio
        best = max(mpmath.mpf(n) / (1 + mpmath.mpf(n) ** 4) * ((1 + mpmath.mpf(n)) ** 3 / (1 + mpmath.mpf(n)) ** 4)
                   for n in list(range(0, 2000)) + [10**6])
    assert bound.hi >= float(best)
    with pytest.raises(SpaceError):
        compose_bound(A, B, via=Weight(1.0))


def test_neumann_trivial():
    I = BlockTailOperator.identity(size=3)
    b = neumann_bound(I, I)
    assert 1.0 in b and b.width < 1e-14


def test_neumann_scalar():
    A = BlockTailOperator.diagonal([2.0])
    B = BlockTailOperator.diagonal([0.6])
    b = neumann_bound(B, A)
    assert 1.25 in b and b.width < 1e-14


def test_neumann_not_contracting():
    A = BlockTailOperator.diagonal([2.0])
    B = BlockTailOperator.diagonal([1.2])
    with pytest.raises(NotContractingError):
        neumann_bound(B, A)


def test_neumann_dense_oracle():
    rng = np.random.default_rng(1)
    M = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    Binv = np.linalg.inv(M) + 1e-3 * rng.normal(size=(6, 6))
    A, B = BlockTailOperator(CIArray.point(M)), BlockTailOperator(CIArray.point(Binv))
    bound = neumann_bound(B, A)
    with mpmath.workdps(50):
        BA = mpmath.matrix(Binv.tolist()) * mpmath.matrix(M.tolist())
        inv = BA ** -1
        true = max(sum(abs(inv[i, j]) for i in range(6)) for j in range(6))
    assert bound.hi >= float(true)


def test_diagonal_norm_is_tight():
    d = np.array([0.3, -1.7, 2.5, 1e-3])
    n = op_norm(BlockTailOperator.diagonal(d))
    assert 2.5 in n and n.width <= 16 * np.spacing(2.5)


@given(st.integers(0, 10**6), st.integers(1, 32), st.integers(1, 32))
def test_op_norm_dominates_images(seed, r, c):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))
    rw, cw = rng.uniform(1, 4, r), rng.uniform(1, 4, c)
    T = BlockTailOperator(CIArray.point(M), IArray.point(rw), IArray.point(cw))
    x = rng.normal(size=c) + 1j * rng.normal(size=c)
    y, _ = T.apply(CIArray.point(x))
    lhs = float(np.sum(y.mag() * rw))
    rhs = float(np.sum(np.abs(x) * cw))
    assert lhs <= op_norm(T).hi * rhs * (1 + 1e-12)


@given(st.integers(0, 10**6))
def test_triangle_and_submultiplicativity(seed):
    rng = np.random.default_rng(seed)
    n = 5
    w = IArray.point(rng.uniform(1, 3, n))
    mk = lambda: BlockTailOperator(CIArray.point(rng.normal(size=(n, n))), w, w)  # noqa: E731
    A, B = mk(), mk()
    lhs, rhs = op_norm(A + B), op_norm(A) + op_norm(B)
    assert lhs.lo <= rhs.hi and lhs.hi <= rhs.hi * (1 + 1e-12)
    assert op_norm(A @ B).hi <= compose_bound(A, B).hi * (1 + 1e-12)


def test_defect_with_tails():
    sp = SeqSpace(("fourier",), (4,), (Weight(1, 0.1),), parity=-1, real=True)
    k = sp.coord_indices()[:, 0]
    lk = -(k.astype(float) ** 4) + 2 * k**2
    lin = Symbol((0, 0, 2, 0, -1))
    A = BlockTailOperator.diagonal(lk, sp, tail=RationalSymbol(lin))
    B = BlockTailOperator.diagonal(1.0 / lk, sp, tail=RationalSymbol(Symbol.identity(), lin))
    assert defect(B, A).hi < 1e-12


def test_apply_seq_tail_radius():
    sp = SeqSpace(("fourier",), (3,), (Weight(1, 0),))
    T = BlockTailOperator.diagonal(2 * np.ones(sp.ncoords), sp, tail=RationalSymbol(Symbol.const(0.5)))
    a = np.zeros(sp.shape, dtype=complex)
    a[4] = 1
    _, img = T.apply_seq(FourierSeq(sp, a, 0.25))
    assert norm_l1w(img).hi >= 2 * 2
    assert img.tail.hi >= 0.25 * 2  # op norm is 2


def test_operator_text_roundtrip():
    sp = SeqSpace(("fourier",), (3,), (Weight(2, 0.05),), parity=-1, real=True)
    rng = np.random.default_rng(2)
    M = rng.normal(size=(sp.ncoords + 1, sp.ncoords + 1))
    lin = Symbol((0, 0, 2, 0, -1))
    T = BlockTailOperator.on_space(CIArray.point(M), sp, tail=RationalSymbol(Symbol.identity(), lin), nscalars=1)
    U = BlockTailOperator.from_text(T.to_text())
    assert np.array_equal(U.block.re.hi, T.block.re.hi)
    assert U.tail == T.tail
    assert op_norm(U) == op_norm(T)


def test_tailspec_text_roundtrip():
    t = TailSpec(RationalSymbol(Symbol.const(1), Symbol((1, 0, -1))), ("fourier",), (5,), -1,
                 (Weight(2, 0.05),), (Weight(1, 0),))
    assert TailSpec.from_text(t.to_text()) == t
