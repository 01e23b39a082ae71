"""Diagonal symbols on Fourier x Taylor index sets and certified tail suprema.

A :class:`Symbol` is the diagonal action of a constant-coefficient operator

    sigma(k, j, m) = P(k) + c_j * j + c_m * m

where ``k`` is the spatial Fourier index, ``j`` the temporal Fourier index and
``m`` the Taylor index. ``P`` has complex interval coefficients. This family
contains every operator needed here: x-derivatives (``i k``), the linear
part ``l(k)``, ``a d_theta`` (``i a j``) and the Taylor scaling ``s d_s`` (``m``).

:func:`tail_sup` bounds ``sup |num(n) / den(n)|`` over all multi-indices
outside a truncation box. Linear ``j`` and ``m`` dependence of the numerator
is absorbed with ``|A j| <= |den| + |Im P|`` and ``|L m| <= |den| + |Re P|``,
which leaves a one-variable problem in ``k``. Finitely many ``k`` are
evaluated explicitly; beyond a cutoff ``K`` the ratio is dominated by a
function that is nonincreasing in ``|k|``, evaluated at ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ResonantTailError, SpaceError
from .interval import CIArray, CInterval, IArray, Interval, _as_cscalar

__all__ = ["Symbol", "RationalSymbol", "tail_sup", "index_grids"]

_ZERO = CInterval(0.0)


def _coef_tuple(coeffs) -> tuple[CInterval, ...]:
    out = [_as_cscalar(c) for c in coeffs]
    while len(out) > 1 and out[-1] == _ZERO:
        out.pop()
    return tuple(out) if out else (_ZERO,)


def _poly_mul(p, q):
    out = [CInterval(0.0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == _ZERO:
            continue
        for j, b in enumerate(q):
            if b == _ZERO:
                continue
            out[i + j] = out[i + j] + a * b
    return out


def _poly_add(p, q):
    n = max(len(p), len(q))
    p = list(p) + [_ZERO] * (n - len(p))
    q = list(q) + [_ZERO] * (n - len(q))
    return [a + b for a, b in zip(p, q)]


class Symbol:
    """Affine-in-(j, m) diagonal symbol with polynomial dependence on k."""

    __slots__ = ("kpoly", "cj", "cm")

    def __init__(self, kpoly: Sequence = (0,), cj=0, cm=0):
        object.__setattr__(self, "kpoly", _coef_tuple(kpoly))
        object.__setattr__(self, "cj", _as_cscalar(cj))
        object.__setattr__(self, "cm", _as_cscalar(cm))

    def __setattr__(self, name, value):
        raise AttributeError("Symbol is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Symbol":
        return cls((c,))

    @classmethod
    def identity(cls) -> "Symbol":
        return cls((1,))

    @classmethod
    def dx(cls, order: int = 1) -> "Symbol":
        """Symbol of the x-derivative of the given order, ``(i k)^order``."""
        coeffs = [0] * order + [CInterval.point(1j**order)]
        return cls(coeffs)

    @classmethod
    def dtheta(cls) -> "Symbol":
        return cls((0,), cj=CInterval(0.0, 1.0))

    @classmethod
    def s_ds(cls) -> "Symbol":
        return cls((0,), cm=1)

    @classmethod
    def poly(cls, coeffs) -> "Symbol":
        return cls(coeffs)

    # -- algebra -------------------------------------------------------------
    def is_k_only(self) -> bool:
        return self.cj == _ZERO and self.cm == _ZERO

    def is_zero(self) -> bool:
        return self.is_k_only() and all(c == _ZERO for c in self.kpoly)

    def is_constant(self) -> bool:
        return self.is_k_only() and len(self.kpoly) == 1

    @property
    def degree(self) -> int:
        return len(self.kpoly) - 1

    def k_parity(self) -> int:
        """+1 if sigma(-k) = sigma(k), -1 if sigma(-k) = -sigma(k), else 0."""
        odd = any(c != _ZERO for c in self.kpoly[1::2])
        even = any(c != _ZERO for c in self.kpoly[0::2]) or not self.is_k_only()
        if odd and even:
            return 0
        if odd:
            return -1
        return 1

    def __add__(self, other):
        other = _as_symbol(other)
        return Symbol(_poly_add(self.kpoly, other.kpoly), self.cj + other.cj, self.cm + other.cm)

    __radd__ = __add__

    def __neg__(self):
        return Symbol([-c for c in self.kpoly], -self.cj, -self.cm)

    def __sub__(self, other):
        return self + (-_as_symbol(other))

    def __rsub__(self, other):
        return _as_symbol(other) - self

    def __mul__(self, other):
        other = _as_symbol(other)
        if not other.is_k_only() and not self.is_k_only():
            raise SpaceError("product of two (j, m)-dependent symbols is not affine")
        a, b = (self, other) if other.is_k_only() else (other, self)
        # a has (j, m) part or both are k-only; b is k-only
        if not a.is_k_only():
            if not b.is_constant():
                raise SpaceError("(j, m)-dependent symbol times a k-polynomial is not affine")
            c = b.kpoly[0]
            return Symbol([x * c for x in a.kpoly], a.cj * c, a.cm * c)
        return Symbol(_poly_mul(a.kpoly, b.kpoly))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.kpoly == other.kpoly and self.cj == other.cj and self.cm == other.cm

    def __hash__(self):
        return hash((self.kpoly, self.cj, self.cm))

    def __repr__(self):
        return f"Symbol(deg={self.degree}, cj={self.cj.mid()}, cm={self.cm.mid()})"

    def mid_symbol(self) -> "Symbol":
        """Symbol with every coefficient replaced by its floating midpoint."""
        return Symbol([CInterval.point(c.mid()) for c in self.kpoly],
                      CInterval.point(self.cj.mid()), CInterval.point(self.cm.mid()))

    # -- evaluation ------------------------------------------------------------
    def eval_k(self, k) -> CIArray:
        """Enclosure of ``P(k)`` for an integer array ``k``."""
        k = np.asarray(k, dtype=float)
        key = (self, k.shape, k.tobytes())
        hit = _EVAL_CACHE.get(key)
        if hit is None:
            hit = self._horner(k)
            if len(_EVAL_CACHE) > 4096:
                _EVAL_CACHE.clear()
            _EVAL_CACHE[key] = hit
        return CIArray(IArray._raw(hit.re.lo.copy(), hit.re.hi.copy()),
                       IArray._raw(hit.im.lo.copy(), hit.im.hi.copy()))

    def _horner(self, k: np.ndarray) -> CIArray:
        kk = IArray.point(k)
        acc = _cia_const(self.kpoly[-1], k.shape)
        for c in reversed(self.kpoly[:-1]):
            acc = acc * kk + _cia_const(c, k.shape)
        return acc

    def eval(self, k, j=None, m=None) -> CIArray:
        """Enclosure of the symbol at broadcastable integer index arrays."""
        k = np.asarray(k)
        shape = np.broadcast_shapes(k.shape, *(np.shape(x) for x in (j, m) if x is not None))
        uk, inv = np.unique(k.ravel(), return_inverse=True)
        pk = self.eval_k(uk)
        val = CIArray(
            IArray._raw(pk.re.lo[inv].reshape(k.shape), pk.re.hi[inv].reshape(k.shape)),
            IArray._raw(pk.im.lo[inv].reshape(k.shape), pk.im.hi[inv].reshape(k.shape)),
        )
        val = _broadcast_ci(val, shape)
        if self.cj != _ZERO:
            if j is None:
                raise SpaceError("symbol depends on j but the space has no theta index")
            val = val + _broadcast_ci(CIArray(IArray.point(np.asarray(j, float))), shape) * _cia_const(self.cj, shape)
        if self.cm != _ZERO:
            if m is None:
                raise SpaceError("symbol depends on m but the space has no Taylor index")
            val = val + _broadcast_ci(CIArray(IArray.point(np.asarray(m, float))), shape) * _cia_const(self.cm, shape)
        return val

    def eval_grid(self, kinds, box) -> CIArray:
        """Evaluate on the full index grid of a box with the given axis kinds."""
        k, j, m = index_grids(kinds, box)
        return self.eval(k, j, m)

    def eval_point(self, k: int, j: int = 0, m: int = 0) -> CInterval:
        v = self.eval(np.array([k]), np.array([j]), np.array([m]))
        return v[0]

    # -- text form ---------------------------------------------------------------
    def to_text(self) -> str:
        def c2s(c):
            return f"{c.re.to_hex()}{c.im.to_hex()}"

        return "k:" + ";".join(c2s(c) for c in self.kpoly) + " j:" + c2s(self.cj) + " m:" + c2s(self.cm)

    @classmethod
    def from_text(cls, text: str) -> "Symbol":
        parts = dict(p.split(":", 1) for p in text.split())

        def s2c(s):
            i = s.index("][")
            return CInterval(Interval.from_hex(s[: i + 1]), Interval.from_hex(s[i + 1:]))

        return cls([s2c(c) for c in parts["k"].split(";")], s2c(parts["j"]), s2c(parts["m"]))


_EVAL_CACHE: dict = {}


def _as_symbol(x) -> Symbol:
    if isinstance(x, Symbol):
        return x
    return Symbol.const(x)


def _cia_const(c: CInterval, shape) -> CIArray:
    return CIArray(IArray._raw(np.full(shape, c.re.lo), np.full(shape, c.re.hi)),
                   IArray._raw(np.full(shape, c.im.lo), np.full(shape, c.im.hi)))


def _broadcast_ci(x: CIArray, shape) -> CIArray:
    if x.shape == tuple(shape):
        return x
    b = lambda a: np.broadcast_to(a, shape).copy()  # noqa: E731
    return CIArray(IArray._raw(b(x.re.lo), b(x.re.hi)), IArray._raw(b(x.im.lo), b(x.im.hi)))


def index_grids(kinds, box):
    """Integer grids (k, j, m) for a box; missing axes are returned as None."""
    axes = []
    for kind, n in zip(kinds, box):
        axes.append(np.arange(-n, n + 1) if kind == "fourier" else np.arange(0, n + 1))
    grids = np.meshgrid(*axes, indexing="ij")
    roles = axis_roles(kinds)
    k = grids[roles["x"]]
    j = grids[roles["theta"]] if "theta" in roles else None
    m = grids[roles["s"]] if "s" in roles else None
    return k, j, m


def axis_roles(kinds) -> dict:
    """Map role names x, theta, s to axis numbers."""
    if not kinds or kinds[0] != "fourier":
        raise SpaceError("the first axis must be the spatial Fourier index")
    roles = {"x": 0}
    for ax, kind in enumerate(kinds[1:], start=1):
        if kind == "fourier":
            if "theta" in roles or "s" in roles:
                raise SpaceError("axis order must be x, theta, s")
            roles["theta"] = ax
        elif kind == "taylor":
            if "s" in roles:
                raise SpaceError("at most one Taylor axis")
            roles["s"] = ax
        else:
            raise SpaceError(f"unknown axis kind {kind!r}")
    return roles


@dataclass(frozen=True)
class RationalSymbol:
    """Diagonal symbol ``num / den`` (``den=None`` means a polynomial symbol)."""

    num: Symbol
    den: Symbol | None = None

    def eval(self, k, j=None, m=None) -> CIArray:
        v = self.num.eval(k, j, m)
        if self.den is None:
            return v
        d = self.den.eval(k, j, m)
        if np.any(d.mig() == 0.0):
            raise ResonantTailError("tail symbol denominator encloses zero")
        return v / d

    def sup_outside(self, kinds, box, parity=0, weight_ratio=None) -> float:
        den = self.den if self.den is not None else Symbol.identity()
        return tail_sup(self.num, den, kinds, box, parity=parity, weight_ratio=weight_ratio)

    def to_text(self) -> str:
        d = "none" if self.den is None else self.den.to_text()
        return f"num {self.num.to_text()} | den {d}"

    @classmethod
    def from_text(cls, text: str) -> "RationalSymbol":
        num, den = text.split("|")
        num = num.strip()[4:]
        den = den.strip()[4:]
        return cls(Symbol.from_text(num), None if den.strip() == "none" else Symbol.from_text(den))


# ---------------------------------------------------------------------------
# certified suprema
# ---------------------------------------------------------------------------


def _inf_abs_affine(c: IArray, a: Interval, ranges) -> np.ndarray:
    """Lower bounds of inf over integer n in ``ranges`` of |c + a n|, per entry of c.

    ``ranges`` is a list of (lo, hi) with None meaning unbounded.
    """
    out = np.full(c.shape, np.inf)
    for lo, hi in ranges:
        out = np.minimum(out, _inf_abs_affine_range(c, a, lo, hi))
    return out


def _inf_abs_affine_range(c: IArray, a: Interval, lo, hi) -> np.ndarray:
    if a.lo == 0.0 and a.hi == 0.0:
        return c.mig()
    if a.lo <= 0.0 <= a.hi:
        if lo is None or hi is None:
            return np.zeros(c.shape)
        return (c + Interval(lo, hi) * a).mig()
    root = -(c / a)
    big = 2.0**52
    lo_f = -big if lo is None else float(lo)
    hi_f = big if hi is None else float(hi)
    with np.errstate(all="ignore"):
        n1 = np.clip(np.floor(root.lo), lo_f, hi_f)
        n2 = np.clip(np.ceil(root.hi), lo_f, hi_f)
    best = np.full(c.shape, np.inf)
    for n in (n1, n2, np.clip(n1 + 1, lo_f, hi_f), np.clip(n2 - 1, lo_f, hi_f)):
        best = np.minimum(best, (c + IArray.point(n) * a).mig())
    # more than two interior integers: fall back to a zero bound
    wide = (n2 - n1) > 3
    return np.where(wide, 0.0, best)


def _real_coeffs(poly, part: str, sign: int):
    """Interval coefficients of Re or Im of P(sign * k) as a real polynomial."""
    out = []
    for i, c in enumerate(poly):
        x = c.re if part == "re" else c.im
        out.append(-x if (sign < 0 and i % 2 == 1) else x)
    return out


def _mag_poly(coeffs) -> list[float]:
    return [c.mag() if isinstance(c, Interval) else c.mag() for c in coeffs]




def tail_sup(num: Symbol, den: Symbol, kinds, box, parity: int = 0, weight_ratio=None,
             region: str = "outside", k_cut: int | None = None) -> float:
    """Upper bound of ``sup |num(n)/den(n)| * ratio(n)`` over indices outside ``box``.

    ``kinds`` and ``box`` describe the index set (see :func:`axis_roles`).
    ``parity=-1`` removes ``k=0`` (odd sequences). ``weight_ratio`` is an
    optional pair of :class:`~capde.sequences.Weight` (dst, src) for
    one-dimensional two-space bounds. ``region='all'`` takes the supremum over
    every index instead of the complement of the box.
    """
    kinds = tuple(kinds)
    box = tuple(int(b) for b in box)
    roles = axis_roles(kinds)
    has_t, has_s = "theta" in roles, "s" in roles
    nx = box[0]
    nt = box[roles["theta"]] if has_t else 0
    ns = box[roles["s"]] if has_s else 0
    if weight_ratio is not None and len(kinds) != 1:
        raise SpaceError("weight ratios are supported for one-dimensional spaces only")

    # j and m coefficients of the denominator
    if den.cj.re != Interval(0.0):
        raise SpaceError("tail denominators must have a purely imaginary j coefficient")
    if den.cm.im != Interval(0.0):
        raise SpaceError("tail denominators must have a real m coefficient")
    A, Lam = den.cj.im, den.cm.re
    if not has_t and (A != Interval(0.0) or num.cj != _ZERO):
        raise SpaceError("j-dependent symbol on a space without a theta axis")
    if not has_s and (Lam != Interval(0.0) or num.cm != _ZERO):
        raise SpaceError("m-dependent symbol on a space without a Taylor axis")

    # absorb (j, m) terms of the numerator
    const = 0.0
    cjm, cmm = num.cj.mag(), num.cm.mag()
    wj = wm = 0.0
    if cjm > 0.0:
        if A.mig() == 0.0:
            raise SpaceError("numerator grows in j but the denominator does not")
        wj = float((Interval(cjm) / A.mig()).hi)
        const = float((Interval(const) + wj).hi)
    if cmm > 0.0:
        if Lam.mig() == 0.0:
            raise SpaceError("numerator grows in m but the denominator does not")
        wm = float((Interval(cmm) / Lam.mig()).hi)
        const = float((Interval(const) + wm).hi)

    def q_of_k(kv: np.ndarray) -> np.ndarray:
        pn = num.eval_k(kv).mag()
        p = den.eval_k(kv)
        q = IArray.point(pn)
        if wj:
            q = q + IArray.point(p.im.mag()) * wj
        if wm:
            q = q + IArray.point(p.re.mag()) * wm
        return q.hi

    all_j = [(None, None)]
    all_m = [(0, None)]

    def explicit(kv: np.ndarray, jr, mr) -> float:
        kv = kv[kv != 0] if parity == -1 else kv
        if kv.size == 0:
            return 0.0
        p = den.eval_k(kv)
        dj = _inf_abs_affine(p.im, A, jr) if has_t else p.im.mig()
        dm = _inf_abs_affine(p.re, Lam, mr) if has_s else p.re.mig()
        d = IArray.point(dj).sqr() + IArray.point(dm).sqr()
        dl = d.sqrt().lo
        q = q_of_k(kv)
        if np.any(dl <= 0.0):
            bad = kv[dl <= 0.0][0]
            raise ResonantTailError(f"tail symbol may vanish near k={int(bad)}")
        r = IArray.point(q) / IArray.point(dl)
        if weight_ratio is not None:
            wd, ws = weight_ratio
            r = r * (wd.values(np.abs(kv)) / ws.values(np.abs(kv)))
        return float(np.max(r.hi))

    best = 0.0
    if region == "all":
        kmax = k_cut or max(2048, 8 * (nx + 1))
        ks = np.arange(-kmax + 1, kmax)
        best = explicit(ks, [(None, None)] if has_t else [(0, 0)], all_m if has_s else [(0, 0)])
        far_from = kmax
    else:
        k_cut = k_cut or max(2048, 8 * (nx + 1))
        # region R1: |k| > nx, all j, all m
        if k_cut > nx + 1:
            ks = np.concatenate([np.arange(nx + 1, k_cut), -np.arange(nx + 1, k_cut)])
            best = max(best, explicit(ks, all_j, all_m))
        kin = np.arange(-nx, nx + 1)
        if has_t:
            best = max(best, explicit(kin, [(None, -nt - 1), (nt + 1, None)], all_m))
        if has_s:
            jr = [(-nt, nt)] if has_t else [(0, 0)]
            best = max(best, explicit(kin, jr, [(ns + 1, None)]))
        far_from = max(k_cut, nx + 1)

    # |k| >= far_from: monotone majorant of q(k) / |Re P(k) + Lam m|
    best = max(best, _far_bound(num, den, wj, wm, Lam, has_s, far_from, weight_ratio))
    return float((Interval(best) + const).hi)


def _far_bound(num, den, wj, wm, Lam, has_s, K, weight_ratio) -> float:
    out = 0.0
    for sign in (1, -1):
        rp = _real_coeffs(den.kpoly, "re", sign)
        n = len(rp) - 1
        while n > 0 and rp[n].lo <= 0.0 <= rp[n].hi and rp[n].mag() == 0.0:
            n -= 1
        lead = rp[n]
        if lead.lo <= 0.0 <= lead.hi:
            raise ResonantTailError("leading coefficient of the tail denominator encloses zero")
        if has_s and not (Lam.lo == 0.0 and Lam.hi == 0.0):
            if (Lam.lo > 0.0) != (lead.lo > 0.0) or (Lam.lo <= 0.0 <= Lam.hi):
                raise ResonantTailError("Taylor coefficient and spatial symbol have opposite signs at infinity")
        # numerator majorant with nonnegative coefficients in |k|
        q = [c.mag() for c in num.kpoly]
        if wj:
            q = _add_float_polys(q, [float((Interval(c.im.mag()) * wj).hi) for c in den.kpoly])
        if wm:
            q = _add_float_polys(q, [float((Interval(c.re.mag()) * wm).hi) for c in den.kpoly])
        if weight_ratio is not None:
            wd, ws = weight_ratio
            if wd.mu2 > ws.mu2:
                raise SpaceError("destination exponential rate exceeds the source rate")
            delta = wd.mu1 - ws.mu1
            if float(delta) != int(delta):
                raise SpaceError("two-space weights need an integer polynomial exponent difference")
            delta = int(delta)
            if delta > 0:
                q = [float(x) for x in _binom_times(q, delta)]
            elif delta < 0:
                rp = [Interval(0.0)] * (-delta) + list(rp)
                n += -delta
                lead = rp[n]
        while len(q) > 1 and q[-1] == 0.0:
            q.pop()
        if len(q) - 1 > n:
            raise SpaceError("symbol ratio is unbounded on the tail")
        Ki = Interval(float(K))
        numv = Interval(0.0)
        for i, qi in enumerate(q):
            numv = numv + Interval(qi) * Ki.pow_int(i - n) if i < n else numv + Interval(qi)
        denv = Interval(lead.mig())
        for i in range(n):
            denv = denv - Interval(rp[i].mag()) * Ki.pow_int(i - n)
        if denv.lo <= 0.0:
            raise ResonantTailError("cutoff too small for the monotone tail bound")
        out = max(out, (numv / denv).hi)
    return out


def _add_float_polys(p, q):
    n = max(len(p), len(q))
    p = list(p) + [0.0] * (n - len(p))
    q = list(q) + [0.0] * (n - len(q))
    return [float((Interval(a) + Interval(b)).hi) for a, b in zip(p, q)]


def _binom_times(q, d):
    """Coefficients (upper bounds) of q(k) * (1 + k)^d."""
    b = [Interval(math.comb(d, i)) for i in range(d + 1)]
    out = [Interval(0.0)] * (len(q) + d)
    for i, qi in enumerate(q):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + Interval(qi) * bj
    return [x.hi for x in out]
