"""Bordered polynomial systems on sequence spaces and their contraction bounds.

Every problem in :mod:`capde.problems` is an instance of

    F(z, u) = ( r_i(z, u) )_{i < q}  (+)  Lambda u + sum_t c_t z_{s_t} sigma_t( D_t * u^{p_t} )

with ``z`` a vector of ``q`` scalar unknowns, ``u`` a sequence in a space
``X`` truncated to a box ``N``, ``sigma_t`` diagonal symbols, ``D_t`` fixed
data sequences (possibly with tails) and scalar rows

    r_i(z, u) = const_i + pair(u, v_i) + quad_i pair(u, u).

The product space carries the norm ``sum |z_i| + ||u||``.

The approximate inverse ``B`` is the floating-point inverse of the Galerkin
derivative on ``C^q x X_N`` plus the diagonal ``1 / Lambda_B`` outside the
box, where ``Lambda_B`` is the frozen diagonal of ``DF``. The bounds are

* ``eps >= ||B F(xbar)||`` (finite computation plus data tails),
* ``kappa_1 >= ||I - B DF(xbar)||``: exact interval columns for every
  coordinate in the padded box ``P = N + spread`` (``spread`` is the reach of
  the multiplication operators in ``DF``) and, beyond ``P``, a tail bound
  ``sup |sigma_t / Lambda_B| * ||G_t||`` over indices outside ``N``;
* ``kappa_{j+1}``: coefficients of a polynomial majorant of
  ``||B (DF(xbar + h) - DF(xbar))||`` for ``||h|| <= rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import PreconditionError, ResonantTailError, SpaceError, SymmetryError
from ..interval import CIArray, CInterval, IArray, Interval, _as_cscalar
from ..operators import BlockTailOperator, op_norm
from ..sequences import FourierSeq, SeqSpace, conv, pair
from ..symbols import RationalSymbol, Symbol, tail_sup
from ..contraction import RadiiPolynomial

__all__ = ["Term", "ScalarRow", "BorderedSystem", "Bounds", "seq_power", "lift", "cat"]

_ZERO = CInterval(0.0)


# ---------------------------------------------------------------------------
# small sequence helpers
# ---------------------------------------------------------------------------


def cat(a: CIArray, b: CIArray) -> CIArray:
    """Concatenate two one-dimensional complex interval arrays."""
    return CIArray(IArray._raw(np.concatenate([a.re.lo, b.re.lo]), np.concatenate([a.re.hi, b.re.hi])),
                   IArray._raw(np.concatenate([a.im.lo, b.im.lo]), np.concatenate([a.im.hi, b.im.hi])))


def _one(space: SeqSpace) -> FourierSeq:
    sp = replace(space, box=(0,) * space.dims, parity=1 if space.parity else 0, zero_mean=False,
                 real=True, _cache={})
    return FourierSeq(sp, CIArray.point(np.ones(sp.shape)))


def seq_power(u: FourierSeq, p: int) -> FourierSeq:
    """``u^p`` (convolution power) on the full product box; ``u^0`` is the unit."""
    if p == 0:
        return _one(u.space)
    out = u
    for _ in range(p - 1):
        out = conv(out, u, box="full")
    return out


def lift(u: FourierSeq, kinds: tuple, weights: tuple) -> FourierSeq:
    """Embed ``u`` as the Taylor order-0 (or theta-constant) part of a bigger space.

    Axes of ``kinds`` that ``u`` lacks get box 0.
    """
    src = u.space
    if tuple(kinds[: src.dims]) == src.kinds and len(kinds) >= src.dims:
        extra = len(kinds) - src.dims
        box = src.box + (0,) * extra
        shape = src.shape + (1,) * extra
    elif len(kinds) == 3 and src.kinds == ("fourier", "taylor"):
        box = (src.box[0], 0, src.box[1])
        shape = (src.shape[0], 1, src.shape[1])
    else:
        raise SpaceError(f"cannot lift {src.kinds} into {kinds}")
    for ax, (ws, wd) in enumerate(zip(src.weights, weights)):
        if ws != wd:
            raise SpaceError("lifted sequence must keep its weights")
    sp = SeqSpace(tuple(kinds), box, tuple(weights), parity=src.parity, real=src.real,
                  zero_mean=src.zero_mean)
    c = u.coeffs.reshape(shape)
    return FourierSeq(sp, c, u.tail)


def _zci(z) -> CIArray:
    if isinstance(z, CIArray):
        return z
    return CIArray.point(np.asarray(z, dtype=complex).reshape(-1))


def _ci_scalar_array(c: CInterval, n: int) -> CIArray:
    return CIArray(IArray.full((n,), c.re), IArray.full((n,), c.im))


# ---------------------------------------------------------------------------
# system description
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """``coef * z[scalar] * sym( data * u^power )`` (``data=None`` means 1)."""

    coef: CInterval
    sym: Symbol
    power: int
    data: FourierSeq | None = None
    scalar: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "coef", _as_cscalar(self.coef))
        if self.power < 0:
            raise SpaceError("powers must be nonnegative")


@dataclass(frozen=True)
class ScalarRow:
    """``const + pair(u, vref) + quad * pair(u, u)``."""

    const: CInterval = _ZERO
    vref: FourierSeq | None = None
    quad: CInterval = _ZERO

    def __post_init__(self):
        object.__setattr__(self, "const", _as_cscalar(self.const))
        object.__setattr__(self, "quad", _as_cscalar(self.quad))


@dataclass
class Bounds:
    """Assembled contraction bounds with diagnostics."""

    eps: Interval
    kappas: tuple
    z1_columns: float
    z1_far: float
    z1_data: float
    eps_data: float
    B: BlockTailOperator | None = None
    extra: dict = field(default_factory=dict)

    def polynomial(self) -> RadiiPolynomial:
        return RadiiPolynomial(self.eps, self.kappas)


class BorderedSystem:
    """Polynomial system ``F(z, u)`` on ``C^q x X`` (see module docstring)."""

    def __init__(self, space: SeqSpace, linear: Symbol, terms=(), rows=(), precond_linear: Symbol | None = None,
                 scalar_names=()):
        self.space = space
        self.linear = linear
        self.terms = tuple(terms)
        self.rows = tuple(rows)
        self.q = len(self.rows)
        self.precond_linear = precond_linear
        self.scalar_names = tuple(scalar_names) or tuple(f"z{i}" for i in range(self.q))
        for t in self.terms:
            if t.data is not None:
                space.check_compatible(t.data.space)
            if t.scalar is not None and not (0 <= t.scalar < self.q):
                raise SpaceError("term refers to a missing scalar unknown")
        for r in self.rows:
            if r.vref is not None:
                space.check_compatible(r.vref.space)

    # -- bookkeeping -----------------------------------------------------------------
    @property
    def dims(self) -> int:
        return self.space.dims

    @property
    def ncoords(self) -> int:
        return self.space.ncoords

    @property
    def size(self) -> int:
        return self.q + self.space.ncoords

    def _zfactor(self, z: CIArray, t: Term) -> CInterval:
        return t.coef * z[t.scalar] if t.scalar is not None else t.coef

    def diagonal(self, z: CIArray) -> Symbol:
        """``Lambda_F``: the exact diagonal of ``DF`` far from the box."""
        lam = self.linear
        for t in self.terms:
            if t.power == 1 and t.data is None:
                lam = lam + t.sym * self._zfactor(z, t)
        return lam

    def precond_diagonal(self, z: CIArray) -> Symbol:
        if self.precond_linear is not None:
            return self.precond_linear
        lam = self.diagonal(CIArray.point(z.mid())).mid_symbol()
        # theta coefficient purely imaginary and s coefficient real, as the tail bounds expect
        cj, cm = lam.cj.mid(), lam.cm.mid()
        return Symbol(lam.kpoly, CInterval.point(1j * cj.imag), CInterval.point(cm.real))

    def _check_parity(self, u: FourierSeq):
        par = self.space.parity
        if par == 0:
            return
        upar = u.space.parity
        if upar != par:
            raise SymmetryError("unknown does not lie in the declared symmetry class")
        for t in self.terms:
            dp = t.data.space.parity if t.data is not None else 1
            inner = dp * (par ** t.power)
            sp = t.sym.k_parity()
            if inner == 0 or sp == 0 or inner * sp != par:
                raise SymmetryError("a nonlinear term leaves the symmetry class of the unknown")
            if inner == 1 and par == -1:
                # the symbol must kill the k = 0 mode of the even inner product
                if t.sym.is_k_only() and t.sym.kpoly[0] != _ZERO:
                    raise SymmetryError("symbol does not vanish at k = 0 for an odd target")
        for r in self.rows:
            if r.vref is not None and r.vref.space.parity not in (0, par):
                raise SymmetryError("reference vector has the wrong parity")

    def unknown(self, c) -> FourierSeq:
        """Sequence built from a coordinate vector of ``X``."""
        return FourierSeq.from_coords(self.space, c)

    def pack(self, z, u: FourierSeq) -> np.ndarray:
        return np.concatenate([np.asarray(z, dtype=complex).ravel(), u.with_box(self.space.box).mid_coords()])

    def unpack(self, x: np.ndarray):
        x = np.asarray(x, dtype=complex)
        return x[: self.q], FourierSeq.from_coords(self.space, x[self.q:])

    # -- residual --------------------------------------------------------------------
    def _term_value(self, t: Term, z: CIArray, u: FourierSeq, strip_tails: bool) -> FourierSeq:
        d = t.data
        if d is not None and strip_tails:
            d = d.with_tail(0.0)
        w = seq_power(u, t.power)
        if d is not None:
            w = conv(d, w, box="full")
        from ..sequences import apply_symbol
        if w.tail.hi > 0.0:
            raise SpaceError("tails of data must be stripped before applying an unbounded symbol")
        w = apply_symbol(w, t.sym)
        return w.scale(self._zfactor(z, t))

    def residual(self, z: CIArray, u: FourierSeq, strip_tails: bool = True):
        """Rigorous enclosure of ``F(z, u)`` for finite ``u``.

        Returns the scalar rows (CIArray) and the sequence part on the full
        product box. Tails of the data sequences are dropped when
        ``strip_tails`` is true; :meth:`bounds` accounts for them separately.
        """
        z = _zci(z)
        if u.tail.hi > 0.0:
            raise SpaceError("residual evaluation needs a finite candidate")
        from ..sequences import apply_symbol
        out = apply_symbol(u, self.linear)
        for t in self.terms:
            out = out + self._term_value(t, z, u, strip_tails)
        vals = []
        for r in self.rows:
            v = r.const
            if r.vref is not None:
                v = v + pair(u, r.vref)
            if r.quad != _ZERO:
                v = v + r.quad * pair(u, u)
            vals.append(v)
        rows = CIArray(IArray.from_intervals([v.re for v in vals]) if vals else IArray.zeros((0,)),
                       IArray.from_intervals([v.im for v in vals]) if vals else IArray.zeros((0,)))
        return rows, out

    def galerkin_residual(self, x: np.ndarray) -> np.ndarray:
        """Floating-point Galerkin residual on ``C^q x X_N`` at a packed point."""
        z, u = self.unpack(x)
        rows, seq = self.residual(CIArray.point(z), u)
        seq = _extend(seq, self.space.box).with_box(self.space.box)
        _, rep_flat, _, _ = self.space.orbits()
        return np.concatenate([rows.mid(), seq.coeffs.mid().ravel()[rep_flat]])

    # -- linearization ---------------------------------------------------------------
    def _spread(self, u: FourierSeq) -> tuple:
        """Per-axis reach of the multiplication operators of ``DF``."""
        sp = [0] * self.dims
        for t in self.terms:
            if t.power == 0:
                continue
            db = t.data.box if t.data is not None else (0,) * self.dims
            for ax in range(self.dims):
                sp[ax] = max(sp[ax], db[ax] + (t.power - 1) * u.box[ax])
        return tuple(sp)

    def linearization(self, z: CIArray, u: FourierSeq, col_box=None) -> "_Linearization":
        return _Linearization(self, z, u, col_box)

    def galerkin_jacobian(self, x: np.ndarray) -> np.ndarray:
        z, u = self.unpack(x)
        lin = self.linearization(CIArray.point(z), u, self.space.box)
        cols = lin.all_columns()
        return lin.inbox_rows(cols).mid()

    # -- preconditioner ----------------------------------------------------------------
    def build_B(self, z: CIArray, u: FourierSeq, J: np.ndarray | None = None) -> BlockTailOperator:
        """Approximate inverse: float inverse of the Galerkin derivative plus ``1/Lambda_B``."""
        z = _zci(z)
        if J is None:
            lin = self.linearization(z, u, self.space.box)
            J = lin.inbox_rows(lin.all_columns()).mid()
        if not np.all(np.isfinite(J)):
            raise PreconditionError("Galerkin derivative is not finite")
        cond = np.linalg.cond(J) if J.size else 1.0
        if not np.isfinite(cond) or cond > 1e14:
            raise PreconditionError(f"Galerkin derivative is numerically singular (cond ~ {cond:.3g})")
        Binv = np.linalg.inv(J)
        lam_b = self.precond_diagonal(z)
        tail = RationalSymbol(Symbol.identity(), lam_b)
        return BlockTailOperator.on_space(CIArray.point(Binv), self.space, tail=tail, nscalars=self.q)

    # -- bounds --------------------------------------------------------------------------
    def bounds(self, z, u: FourierSeq, B: BlockTailOperator | None = None, chunk: int | None = None) -> Bounds:
        """Y and Z bounds for the Newton-like map ``x - B F(x)`` at ``(z, u)``."""
        z = _zci(z)
        u = u.with_box(self.space.box)
        if u.tail.hi > 0.0:
            raise SpaceError("candidate must be finite")
        u = FourierSeq(self.space, u.coeffs)
        self._check_parity(u)
        if B is None:
            B = self.build_B(z, u)
        spread = self._spread(u)
        pbox = tuple(n + s for n, s in zip(self.space.box, spread))
        for r in self.rows:
            if r.vref is not None and any(b > p for b, p in zip(r.vref.box, pbox)):
                pbox = tuple(max(b, p) for b, p in zip(r.vref.box, pbox))
        lin = self.linearization(z, u, pbox)
        lam_b = self.precond_diagonal(z)
        lam_f = self.diagonal(z)
        lin.set_preconditioner(B, lam_b)

        # Y bound
        rows, seq = self.residual(z, u)
        eps = lin.apply_B_norm(rows, seq)

        # Z1 bound: explicit columns
        col_norms = lin.defect_column_norms(chunk)
        z1_cols = float(np.max(col_norms)) if col_norms.size else 0.0

        # Z1 bound: columns outside the padded box
        nbox = self.space.box
        kinds, par = self.space.kinds, self.space.parity
        far = Interval(0.0)
        dsym = lam_b - lam_f
        if not all(c == _ZERO for c in dsym.kpoly) or dsym.cj != _ZERO or dsym.cm != _ZERO:
            far = far + Interval(tail_sup(dsym, lam_b, kinds, nbox, parity=par))
        for t, G in lin.G.items():
            if G is None:
                continue
            s = tail_sup(self.terms[t].sym, lam_b, kinds, nbox, parity=par)
            far = far + Interval(s) * G.norm()
        z1_far = far.hi

        # data tails
        ubar_norm = u.norm()
        bsym_cache = {}

        def bsym(sym: Symbol) -> Interval:
            if sym not in bsym_cache:
                bsym_cache[sym] = op_norm(B.right_symbol(sym, self.space))
            return bsym_cache[sym]

        z_abs = [z[i].mag() for i in range(self.q)]
        z1_data = Interval(0.0)
        eps_data = Interval(0.0)
        for t in self.terms:
            if t.data is None or t.data.tail.hi == 0.0:
                continue
            tau = Interval(t.data.tail.hi)
            zf = Interval(t.coef.mag()) * (Interval(z_abs[t.scalar]) if t.scalar is not None else 1.0)
            f = bsym(t.sym) * tau
            eps_data = eps_data + f * zf * ubar_norm.pow_int(t.power) if t.power else eps_data + f * zf
            if t.power >= 1:
                z1_data = z1_data + f * zf * Interval(t.power) * (ubar_norm.pow_int(t.power - 1))
            if t.scalar is not None:
                z1_data = z1_data + f * Interval(t.coef.mag()) * ubar_norm.pow_int(t.power)
        eps = eps + eps_data
        kappa1 = Interval(0.0, (Interval(max(z1_cols, z1_far)) + z1_data).hi)

        # Z2: polynomial majorant of the derivative variation
        deg = 1
        for t in self.terms:
            deg = max(deg, t.power + (1 if t.scalar is not None else 0))
        for r in self.rows:
            if r.quad != _ZERO:
                deg = max(deg, 2)
        coeffs = [Interval(0.0)] * (deg + 1)  # coefficient of rho^i
        un = Interval(ubar_norm.hi)
        for t in self.terms:
            p = t.power
            if p == 0 and t.scalar is None:
                continue
            dn = t.data.norm() if t.data is not None else Interval(1.0)
            fac = Interval(t.coef.mag()) * bsym(t.sym) * Interval(dn.hi)
            cu = [Interval(0.0)] * (deg + 1)
            cz = [Interval(0.0)] * (deg + 1)
            if t.scalar is None:
                for i in range(1, p):
                    cu[i] = Interval(p) * Interval(math.comb(p - 1, i)) * un.pow_int(p - 1 - i)
            else:
                zb = Interval(z_abs[t.scalar])
                for i in range(1, p + 1):
                    cz[i] = Interval(math.comb(p, i)) * un.pow_int(p - i)
                    a = Interval(math.comb(p - 1, i)) * un.pow_int(p - 1 - i) * zb if i <= p - 1 else Interval(0.0)
                    b = Interval(math.comb(p - 1, i - 1)) * un.pow_int(p - i)
                    cu[i] = Interval(p) * (a + b)
            for i in range(1, deg + 1):
                m = max(cu[i].hi, cz[i].hi)
                if m > 0.0:
                    coeffs[i] = coeffs[i] + fac * float(m)
        bcols = B.column_norms()
        for i, r in enumerate(self.rows):
            if r.quad != _ZERO:
                coeffs[1] = coeffs[1] + Interval(2.0) * Interval(r.quad.mag()) * Interval(bcols.hi[i])
        kappas = [kappa1] + [Interval(0.0, c.hi) for c in coeffs[1:]]
        while len(kappas) > 1 and kappas[-1].hi == 0.0:
            kappas.pop()
        return Bounds(eps=Interval(0.0, eps.hi), kappas=tuple(kappas), z1_columns=z1_cols, z1_far=z1_far,
                      z1_data=z1_data.hi, eps_data=eps_data.hi, B=B,
                      extra={"pbox": pbox, "ubar_norm": ubar_norm.hi})


def _extend(seq: FourierSeq, box) -> FourierSeq:
    """Pad ``seq`` to contain ``box`` (never truncates)."""
    nb = tuple(max(a, b) for a, b in zip(seq.box, box))
    return seq.with_box(nb)


class _Linearization:
    """Interval columns of ``DF(z, u)`` for coordinates inside ``col_box``.

    Rows are the ``q`` scalar rows followed by every full index of the row
    box ``R = col_box + spread``.
    """

    def __init__(self, system: BorderedSystem, z: CIArray, u: FourierSeq, col_box=None):
        self.sys = system
        self.z = z
        self.u = u
        sp = system.space
        col_box = tuple(col_box) if col_box is not None else sp.box
        self.col_space = sp.with_box(col_box)
        spread = system._spread(u)
        rbox = [c + s for c, s in zip(col_box, spread)]
        # scalar columns and residual need the boxes of D * u^p
        self.G = {}
        self.S = {}
        for i, t in enumerate(system.terms):
            d = t.data.with_tail(0.0) if t.data is not None else None
            if t.power >= 1:
                if t.power == 1 and d is None:
                    self.G[i] = None
                else:
                    w = seq_power(u, t.power - 1)
                    if d is not None:
                        w = conv(d, w, box="full")
                    self.G[i] = w.scale(system._zfactor(z, t) * Interval(t.power))
            if t.scalar is not None:
                w = seq_power(u, t.power)
                if d is not None:
                    w = conv(d, w, box="full")
                self.S[i] = w.scale(t.coef)
                rbox = [max(r, b) for r, b in zip(rbox, w.box)]
        for t in system.terms:
            db = t.data.box if t.data is not None else (0,) * sp.dims
            rbox = [max(r, d + t.power * n) for r, d, n in zip(rbox, db, u.box)]
        for r in system.rows:
            if r.vref is not None:
                rbox = [max(a, b) for a, b in zip(rbox, r.vref.box)]
        rbox = [max(a, b) for a, b in zip(rbox, col_box)]
        self.row_space = sp.with_box(tuple(rbox))
        self.rshape = self.row_space.shape
        self.rsize = int(np.prod(self.rshape))
        k, j, m = self.row_space.grids()
        self.row_k = k.ravel()
        self.symvals = {}
        for i, t in enumerate(system.terms):
            if t.power >= 1 or t.scalar is not None:
                self.symvals[i] = t.sym.eval(k, j, m).reshape(-1)
        self.linvals = system.linear.eval(k, j, m).reshape(-1)
        # scalar-row functionals W_i = vref_i + 2 quad_i u
        self.W = []
        for r in system.rows:
            w = None
            if r.vref is not None:
                w = r.vref.with_tail(0.0)
            if r.quad != _ZERO:
                t2 = u.scale(r.quad * Interval(2.0))
                w = t2 if w is None else w + t2
            self.W.append(w)
        self.B = None

    # -- columns ---------------------------------------------------------------------------
    def _row_flat(self, idx: np.ndarray) -> np.ndarray:
        return self.row_space.flat_of(idx)

    def _passes(self, G: FourierSeq | None, cols: np.ndarray, mirror: np.ndarray, sign: float):
        """Sparse entries of ``G * o_c`` for orbit vectors ``o_c`` at ``cols``.

        Yields ``(flat rows, column ids, values)`` per pass (direct and
        mirrored); inside one pass every (row, column) pair occurs once.
        ``G=None`` stands for the unit sequence.
        """
        ncol = cols.shape[0]
        if G is None:
            d = np.zeros((1, self.sys.dims), dtype=int)
            g = CIArray.point(np.ones(1))
        else:
            d = G.space.full_index()
            g = G.coeffs.flatten()
            keep = (g.re.lo != 0.0) | (g.re.hi != 0.0) | (g.im.lo != 0.0) | (g.im.hi != 0.0)
            d, g = d[keep], g[keep]
        for which in (0, 1):
            if which == 1:
                if not np.any(mirror):
                    break
                base = cols[mirror].copy()
                base[:, 0] = -base[:, 0]
                colid = np.nonzero(mirror)[0]
                fac = sign
            else:
                base, colid, fac = cols, np.arange(ncol), 1.0
            rows = (base[:, None, :] + d[None, :, :]).reshape(-1, self.sys.dims)
            flat = self._row_flat(rows)
            if np.any(flat < 0):
                raise SpaceError("row box too small for the linearization")
            cid = np.repeat(colid, d.shape[0])
            vals = CIArray(IArray._raw(np.tile(g.re.lo, len(colid)), np.tile(g.re.hi, len(colid))),
                           IArray._raw(np.tile(g.im.lo, len(colid)), np.tile(g.im.hi, len(colid))))
            if fac < 0:
                vals = -vals
            yield flat, cid, vals

    def _dense(self, flat, cid, vals: CIArray, ncol: int) -> CIArray:
        parts = []
        for part in (vals.re, vals.im):
            lo = np.zeros((self.rsize, ncol))
            hi = np.zeros((self.rsize, ncol))
            lo[flat, cid] = part.lo
            hi[flat, cid] = part.hi
            parts.append(IArray._raw(lo, hi))
        return CIArray(*parts)

    def columns(self, sel: np.ndarray, scaled: bool = False):
        """Columns for the selected coordinates of the column space.

        ``sel`` indexes the stacked list ``[scalars..., coordinates...]``.
        Returns (scalar rows (q, n), sequence rows (rsize, n), scaled rows)
        where the scaled rows hold ``DF / Lambda_B`` on rows outside the box
        (zero inside) when ``scaled`` is true, else ``None``.
        """
        q = self.sys.q
        sel = np.asarray(sel)
        n = len(sel)
        reps, _, mir_flat, sign = self.col_space.orbits()
        coords = sel[sel >= q] - q
        pos = np.nonzero(sel >= q)[0]
        seq = CIArray.zeros((self.rsize, n))
        out = CIArray.zeros((self.rsize, n)) if scaled else None
        srows = CIArray.zeros((q, n))
        if len(coords):
            cidx = reps[coords]
            mirror = mir_flat[coords] >= 0
            contributions = [(None, self.linvals)]
            for i, G in self.G.items():
                if G is None:
                    t = self.sys.terms[i]
                    contributions.append((None, self.symvals[i] * _cscal(self.sys._zfactor(self.z, t))))
                else:
                    contributions.append((G, self.symvals[i]))
            for G, rowvals in contributions:
                for flat, cid, vals in self._passes(G, cidx, mirror, sign):
                    v = vals * rowvals[flat]
                    seq = seq + self._dense(flat, pos[cid], v, n)
                    if scaled:
                        out = out + self._dense(flat, pos[cid], v * self.inv_lam[flat], n)
            vals = []
            for W in self.W:
                if W is None:
                    vals.append(CIArray.zeros((len(coords),)))
                    continue
                vals.append(_pair_orbit(W, cidx, mirror, sign))
            if q:
                srows = _put_cols(srows, pos, _stack_rows(vals, len(coords)))
        for jcol, s_ in enumerate(sel):
            if s_ >= q:
                continue
            vec = CIArray.zeros((self.rsize,))
            for i, w in self.S.items():
                if self.sys.terms[i].scalar != s_:
                    continue
                full = w.with_box(self.row_space.box).coeffs.reshape(-1)
                vec = vec + full * self.symvals[i]
            seq = _put_cols(seq, np.array([jcol]), vec.reshape(-1, 1))
            if scaled:
                out = _put_cols(out, np.array([jcol]), (vec * self.inv_lam).reshape(-1, 1))
        return srows, seq, out

    def all_columns(self):
        return self.columns(np.arange(self.sys.q + self.col_space.ncoords))[:2]

    def inbox_rows(self, cols) -> CIArray:
        """Rows of the columns restricted to ``C^q x X_N`` coordinates."""
        srows, seq = cols
        _, rep_flat, _, _ = self.sys.space.orbits()
        flat = self._inbox_flat()
        body = seq[flat] if len(flat) else CIArray.zeros((0, seq.shape[1]))
        return _vstack(srows, body)

    def _inbox_flat(self) -> np.ndarray:
        reps = self.sys.space.coord_indices()
        return self._row_flat(reps)

    # -- preconditioned quantities -----------------------------------------------------
    def set_preconditioner(self, B: BlockTailOperator, lam_b: Symbol):
        self.B = B
        k, j, m = self.row_space.grids()
        lam = lam_b.eval(k, j, m).reshape(-1)
        nb = self.sys.space.box
        full = self.row_space.full_index()
        inside = np.ones(self.rsize, bool)
        for ax, (kind, n) in enumerate(zip(self.sys.space.kinds, nb)):
            inside &= np.abs(full[:, ax]) <= n
        self.outside = ~inside
        if self.sys.space.zero_mean or self.sys.space.parity != 0:
            pass
        if np.any(lam.mig()[self.outside] == 0.0):
            raise ResonantTailError("preconditioner diagonal encloses zero outside the box")
        ones = CIArray.point(np.ones(self.rsize))
        safe = CIArray(IArray._raw(np.where(self.outside, lam.re.lo, 1.0), np.where(self.outside, lam.re.hi, 1.0)),
                       IArray._raw(np.where(self.outside, lam.im.lo, 0.0), np.where(self.outside, lam.im.hi, 0.0)))
        inv = ones / safe
        z = np.zeros(self.rsize)
        o = self.outside
        self.inv_lam = CIArray(IArray._raw(np.where(o, inv.re.lo, z), np.where(o, inv.re.hi, z)),
                               IArray._raw(np.where(o, inv.im.lo, z), np.where(o, inv.im.hi, z)))
        self.row_w = self.row_space.full_weights().reshape(-1)
        self.red_w = self.sys.space.reduced_weights()

    def _out_norm(self, vec: CIArray) -> IArray:
        """Weighted l1 norms over rows outside the box, per column."""
        o = self.outside
        if not np.any(o):
            return IArray.zeros(vec.shape[1:])
        a = vec[o].abs()
        w = self.row_w[o]
        return (a * IArray._raw(w.lo[:, None], w.hi[:, None])).sum(axis=0)

    def _in_norm(self, mat: CIArray) -> IArray:
        q = self.sys.q
        w = IArray._raw(np.concatenate([np.ones(q), self.red_w.lo]), np.concatenate([np.ones(q), self.red_w.hi]))
        return (mat.abs() * IArray._raw(w.lo[:, None], w.hi[:, None])).sum(axis=0)

    def apply_B_norm(self, rows: CIArray, seq: FourierSeq) -> Interval:
        """``||B (rows, seq)||`` for a finite residual."""
        seq = _extend(seq, self.row_space.box)
        if any(a > b for a, b in zip(seq.box, self.row_space.box)):
            raise SpaceError("residual exceeds the row box")
        full = seq.coeffs.reshape(-1)
        flat = self._inbox_flat()
        vin = _vstack(rows.reshape(-1, 1), full[flat].reshape(-1, 1))
        y = self.B.block @ vin
        nin = self._in_norm(y)
        vout = (full * self.inv_lam).reshape(-1, 1)
        nout = self._out_norm(vout)
        return Interval(0.0, (nin + nout).sum().hi)

    def defect_column_norms(self, chunk: int | None = None) -> np.ndarray:
        """Upper bounds of the weighted column norms of ``I - B DF`` on the column box."""
        q = self.sys.q
        if chunk is None:
            chunk = int(max(16, min(512, 2_000_000 // max(self.rsize, 1))))
        ntot = q + self.col_space.ncoords
        reps, _, mir_flat, sign = self.col_space.orbits()
        cw = self.col_space.reduced_weights()
        in_reps = self.sys.space.coord_indices()
        # map column coordinates inside the box to their row position in the in-box vector
        in_pos = {tuple(r): q + i for i, r in enumerate(in_reps)}
        out = np.zeros(ntot)
        for start in range(0, ntot, chunk):
            sel = np.arange(start, min(ntot, start + chunk))
            srows, seq, scaled = self.columns(sel, scaled=True)
            flat = self._inbox_flat()
            vin = _vstack(srows, seq[flat] if len(flat) else CIArray.zeros((0, len(sel))))
            y = self.B.block @ vin
            # identity part
            ident_in = np.zeros(y.shape)
            ident_out = np.zeros((self.rsize, len(sel)))
            ident_out_m = np.zeros((self.rsize, len(sel)))
            for jj, s in enumerate(sel):
                if s < q:
                    ident_in[s, jj] = 1.0
                    continue
                r = reps[s - q]
                key = tuple(r)
                if key in in_pos:
                    ident_in[in_pos[key], jj] = 1.0
                else:
                    f = self._row_flat(r[None, :])[0]
                    ident_out[f, jj] = 1.0
                    if mir_flat[s - q] >= 0:
                        rm = r.copy()
                        rm[0] = -rm[0]
                        ident_out_m[self._row_flat(rm[None, :])[0], jj] = sign
            e_in = CIArray.point(ident_in) - y
            vout = CIArray.point(ident_out + ident_out_m) - scaled
            norms = self._in_norm(e_in) + self._out_norm(vout)
            w = IArray._raw(np.where(sel < q, 1.0, cw.lo[np.maximum(sel - q, 0)]),
                            np.where(sel < q, 1.0, cw.hi[np.maximum(sel - q, 0)]))
            out[sel] = (norms / w).hi
        return out


def _col(v: CIArray) -> CIArray:
    return CIArray(IArray._raw(v.re.lo[:, None], v.re.hi[:, None]), IArray._raw(v.im.lo[:, None], v.im.hi[:, None]))


def _cscal(c: CInterval) -> CIArray:
    return CIArray(IArray.full((), c.re), IArray.full((), c.im))


def _put_cols(mat: CIArray, pos: np.ndarray, block: CIArray) -> CIArray:
    parts = []
    for dst, src in ((mat.re, block.re), (mat.im, block.im)):
        lo, hi = dst.lo.copy(), dst.hi.copy()
        lo[:, pos], hi[:, pos] = src.lo, src.hi
        parts.append(IArray._raw(lo, hi))
    return CIArray(*parts)


def _vstack(a: CIArray, b: CIArray) -> CIArray:
    return CIArray(IArray._raw(np.vstack([a.re.lo, b.re.lo]), np.vstack([a.re.hi, b.re.hi])),
                   IArray._raw(np.vstack([a.im.lo, b.im.lo]), np.vstack([a.im.hi, b.im.hi])))


def _stack_rows(vals, n) -> CIArray:
    if not vals:
        return CIArray.zeros((0, n))
    return CIArray(IArray._raw(np.vstack([v.re.lo for v in vals]), np.vstack([v.re.hi for v in vals])),
                   IArray._raw(np.vstack([v.im.lo for v in vals]), np.vstack([v.im.hi for v in vals])))


def _pair_orbit(W: FourierSeq, cidx: np.ndarray, mirror: np.ndarray, sign: float) -> CIArray:
    """``pair(o_c, W)`` for orbit vectors ``o_c`` at multi-indices ``cidx``."""
    sp = W.space
    fourier = np.array([k == "fourier" for k in sp.kinds])
    refl = np.where(fourier, -cidx, cidx)
    full = W.coeffs.reshape(-1)

    def look(idx):
        f = sp.flat_of(idx)
        ok = f >= 0
        fz = np.where(ok, f, 0)
        v = full[fz]
        z = np.zeros(len(f))
        return CIArray(IArray._raw(np.where(ok, v.re.lo, z), np.where(ok, v.re.hi, z)),
                       IArray._raw(np.where(ok, v.im.lo, z), np.where(ok, v.im.hi, z)))

    val = look(refl)
    if np.any(mirror):
        m_idx = cidx.copy()
        m_idx[:, 0] = -m_idx[:, 0]
        mv = look(np.where(fourier, -m_idx, m_idx))
        s = np.where(mirror, sign, 0.0)
        val = val + mv * CIArray.point(s)
    return val
