"""Weighted l1 sequence spaces on Fourier x Taylor index sets.

Coefficients are stored as two-sided complex exponential coefficients on a
full rectangular box (one-sided for a Taylor axis). A symmetry in the x
index is described by ``parity``: ``-1`` for sequences odd in ``k``
(sine series when real), ``+1`` for even ones and ``0`` for none. The
independent unknowns of a space are the coefficients at representative
indices (``k >= 1`` for odd, ``k >= 0`` for even, all indices otherwise).

Every :class:`FourierSeq` carries a scalar ``tail``. The represented set is
the ball of radius ``tail`` (in the weighted l1 norm) around the listed
coefficients. This contains the set of sequences whose unlisted coefficients
have weighted mass at most ``tail``, so bounds proved for the ball apply to
the narrower reading as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import DomainError, SpaceError
from .interval import CIArray, CInterval, IArray, Interval, _as_cscalar
from .symbols import Symbol, axis_roles, index_grids, tail_sup

__all__ = [
    "Weight",
    "SeqSpace",
    "FourierSeq",
    "DecaySeq",
    "norm_l1w",
    "conv",
    "apply_symbol",
    "inner_l2",
    "pair",
    "dual_norm",
    "algebra_const",
    "decay_bound",
]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _weight_table(mu1: float, mu2: float, nmax: int) -> IArray:
    n = np.arange(nmax + 1, dtype=float)
    w = IArray.point(np.ones(nmax + 1))
    if mu1 != 0.0:
        base = IArray.point(1.0 + n)
        if float(mu1).is_integer() and mu1 <= 64:
            acc = IArray.point(np.ones(nmax + 1))
            for _ in range(int(mu1)):
                acc = acc * base
            w = acc
        else:
            w = (base.log() * Interval(mu1)).exp()
    if mu2 != 0.0:
        w = w * (IArray.point(n) * Interval(mu2)).exp()
    return w


@dataclass(frozen=True)
class Weight:
    """Weight ``W_n = (1 + |n|)^mu1 * exp(mu2 |n|)`` on one index."""

    mu1: float = 0.0
    mu2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu1", float(self.mu1))
        object.__setattr__(self, "mu2", float(self.mu2))
        if not (self.mu1 >= 0.0 and self.mu2 >= 0.0) or not (math.isfinite(self.mu1) and math.isfinite(self.mu2)):
            raise DomainError("weight exponents must be finite and nonnegative")

    def values(self, n) -> IArray:
        """Enclosures of ``W_|n|`` for an integer array ``n``."""
        n = np.abs(np.asarray(n, dtype=np.int64))
        if n.size == 0:
            return IArray.zeros(n.shape)
        nmax = int(n.max())
        table = _weight_table(self.mu1, self.mu2, max(64, 1 << max(nmax, 1).bit_length()))
        return IArray._raw(table.lo[n], table.hi[n])

    def at(self, n: int) -> Interval:
        return self.values(np.array([n]))[0]

    def to_text(self) -> str:
        return f"{self.mu1.hex()}:{self.mu2.hex()}"

    @classmethod
    def from_text(cls, text: str) -> "Weight":
        a, b = text.split(":")
        return cls(float.fromhex(a), float.fromhex(b))


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeqSpace:
    """Index set, truncation box, weights and symmetry class."""

    kinds: tuple = ("fourier",)
    box: tuple = (8,)
    weights: tuple = (Weight(),)
    parity: int = 0
    real: bool = False
    zero_mean: bool = False
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "box", tuple(int(b) for b in self.box))
        w = self.weights
        if isinstance(w, Weight):
            w = (w,) * len(self.kinds)
        object.__setattr__(self, "weights", tuple(w))
        if not (len(self.kinds) == len(self.box) == len(self.weights)):
            raise SpaceError("kinds, box and weights must have equal length")
        if any(b < 0 for b in self.box):
            raise SpaceError("box sizes must be nonnegative")
        if self.parity not in (-1, 0, 1):
            raise SpaceError("parity must be -1, 0 or 1")
        if self.zero_mean and self.parity != 0:
            raise SpaceError("zero_mean applies to spaces without parity")
        axis_roles(self.kinds)

    # -- description -----------------------------------------------------------
    @property
    def dims(self) -> int:
        return len(self.kinds)

    @property
    def shape(self) -> tuple:
        return tuple(2 * n + 1 if k == "fourier" else n + 1 for k, n in zip(self.kinds, self.box))

    @property
    def offsets(self) -> tuple:
        return tuple(n if k == "fourier" else 0 for k, n in zip(self.kinds, self.box))

    @property
    def symmetry(self) -> str:
        base = {-1: "odd", 0: "", 1: "even"}[self.parity]
        if self.real:
            return f"{base}-real" if base else "real"
        return base or "none"

    def family(self) -> tuple:
        return (self.kinds, self.weights)

    def with_box(self, box) -> "SeqSpace":
        return replace(self, box=tuple(box), _cache={})

    def with_parity(self, parity: int, real: bool | None = None) -> "SeqSpace":
        return replace(self, parity=parity, real=self.real if real is None else real,
                       zero_mean=False if parity else self.zero_mean, _cache={})

    def grids(self):
        return index_grids(self.kinds, self.box)

    def full_index(self) -> np.ndarray:
        """Array of shape (size, dims) listing multi-indices in C order."""
        axes = [np.arange(-n, n + 1) if k == "fourier" else np.arange(0, n + 1)
                for k, n in zip(self.kinds, self.box)]
        g = np.meshgrid(*axes, indexing="ij")
        return np.stack([x.ravel() for x in g], axis=1)

    def flat_of(self, idx: np.ndarray) -> np.ndarray:
        """Flat positions of multi-indices (rows of ``idx``) inside this box; -1 if outside."""
        idx = np.atleast_2d(idx)
        shape = self.shape
        pos = idx + np.array(self.offsets)
        ok = np.all((pos >= 0) & (pos < np.array(shape)), axis=1)
        flat = np.ravel_multi_index(tuple(np.where(ok[:, None], pos, 0).T), shape)
        return np.where(ok, flat, -1)

    # -- coordinates -------------------------------------------------------------
    def _coord_data(self):
        if "coords" in self._cache:
            return self._cache["coords"]
        full = self.full_index()
        k = full[:, 0]
        if self.parity == -1:
            keep = k >= 1
        elif self.parity == 1:
            keep = k >= 0
        else:
            keep = np.ones(len(k), bool)
        if self.zero_mean:
            keep &= np.any(full != 0, axis=1)
        reps = full[keep]
        rep_flat = np.nonzero(keep)[0]
        mir = reps.copy()
        mir[:, 0] = -mir[:, 0]
        has_mir = (self.parity != 0) & (reps[:, 0] != 0)
        mir_flat = np.where(has_mir, self.flat_of(mir), -1)
        data = (reps, rep_flat, mir_flat, float(self.parity))
        self._cache["coords"] = data
        return data

    @property
    def ncoords(self) -> int:
        return len(self._coord_data()[0])

    def coord_indices(self) -> np.ndarray:
        return self._coord_data()[0]

    def orbits(self):
        """(rep multi-indices, rep flat positions, mirror flat positions or -1, mirror sign)."""
        return self._coord_data()

    def full_weights(self) -> IArray:
        """Product weight on the full box."""
        if "fullw" in self._cache:
            return self._cache["fullw"]
        out = None
        for ax, (w, n, kind) in enumerate(zip(self.weights, self.box, self.kinds)):
            idx = np.arange(-n, n + 1) if kind == "fourier" else np.arange(0, n + 1)
            v = w.values(idx)
            shape = [1] * self.dims
            shape[ax] = len(idx)
            v = IArray._raw(v.lo.reshape(shape), v.hi.reshape(shape))
            out = v if out is None else out * v
        out = IArray._raw(np.broadcast_to(out.lo, self.shape).copy(), np.broadcast_to(out.hi, self.shape).copy())
        self._cache["fullw"] = out
        return out

    def weight_of(self, idx: np.ndarray) -> IArray:
        """Product weights of arbitrary multi-indices (rows of ``idx``)."""
        idx = np.atleast_2d(idx)
        out = None
        for ax, w in enumerate(self.weights):
            v = w.values(idx[:, ax])
            out = v if out is None else out * v
        return out

    def reduced_weights(self) -> IArray:
        """Weighted norm of each coordinate's unit orbit vector."""
        if "redw" in self._cache:
            return self._cache["redw"]
        reps, _, mir_flat, _ = self._coord_data()
        w = self.weight_of(reps)
        factor = np.where(mir_flat >= 0, 2.0, 1.0)
        out = w * factor
        self._cache["redw"] = out
        return out

    def check_compatible(self, other: "SeqSpace"):
        if self.kinds != other.kinds or self.weights != other.weights:
            raise SpaceError("sequence spaces differ in axis kinds or weights")


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


def _tail_interval(t) -> Interval:
    t = Interval(0.0) if t is None else (t if isinstance(t, Interval) else Interval.enclose(t))
    if t.lo < 0.0:
        raise DomainError("tail must be nonnegative")
    return Interval(0.0, t.hi)


class FourierSeq:
    """Finite interval coefficients plus a weighted l1 tail ball."""

    __slots__ = ("space", "coeffs", "tail")

    def __init__(self, space: SeqSpace, coeffs: CIArray, tail=None):
        if not isinstance(coeffs, CIArray):
            coeffs = CIArray.point(np.asarray(coeffs, dtype=complex))
        if coeffs.shape != space.shape:
            raise SpaceError(f"coefficient shape {coeffs.shape} does not match box {space.shape}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tail", _tail_interval(tail))

    def __setattr__(self, name, value):
        raise AttributeError("FourierSeq is immutable")

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zeros(cls, space: SeqSpace) -> "FourierSeq":
        return cls(space, CIArray.zeros(space.shape))

    @classmethod
    def from_coords(cls, space: SeqSpace, c, tail=None) -> "FourierSeq":
        """Build from representative coordinates (complex array or CIArray)."""
        if not isinstance(c, CIArray):
            c = CIArray.point(np.asarray(c, dtype=complex))
        if c.shape != (space.ncoords,):
            raise SpaceError("coordinate vector has the wrong length")
        _, rep_flat, mir_flat, sign = space.orbits()
        size = int(np.prod(space.shape))
        arrs = []
        for part in (c.re, c.im):
            lo, hi = np.zeros(size), np.zeros(size)
            lo[rep_flat], hi[rep_flat] = part.lo, part.hi
            m = mir_flat >= 0
            if sign < 0:
                lo[mir_flat[m]], hi[mir_flat[m]] = -part.hi[m], -part.lo[m]
            else:
                lo[mir_flat[m]], hi[mir_flat[m]] = part.lo[m], part.hi[m]
            arrs.append(IArray._raw(lo.reshape(space.shape), hi.reshape(space.shape)))
        return cls(space, CIArray(*arrs), tail)

    @classmethod
    def from_full(cls, space: SeqSpace, a, tail=None) -> "FourierSeq":
        return cls(space, a if isinstance(a, CIArray) else CIArray.point(np.asarray(a, dtype=complex)), tail)

    @classmethod
    def basis(cls, space: SeqSpace, index, value=1.0) -> "FourierSeq":
        """Unit orbit vector at a multi-index (its parity mirror is filled in)."""
        index = np.atleast_2d(np.asarray(index))
        reps = space.coord_indices()
        hit = np.nonzero(np.all(reps == index, axis=1))[0]
        if len(hit) == 0:
            raise SpaceError(f"index {index.tolist()} is not a coordinate of the space")
        c = np.zeros(space.ncoords, dtype=complex)
        c[hit[0]] = value
        return cls.from_coords(space, c)

    # -- views -----------------------------------------------------------------
    @property
    def dims(self) -> int:
        return self.space.dims

    @property
    def box(self) -> tuple:
        return self.space.box

    @property
    def symmetry(self) -> str:
        return self.space.symmetry

    def coords(self) -> CIArray:
        _, rep_flat, _, _ = self.space.orbits()
        return self.coeffs.flatten()[rep_flat]

    def mid(self) -> np.ndarray:
        return self.coeffs.mid()

    def mid_coords(self) -> np.ndarray:
        return self.coords().mid()

    def at(self, index) -> CInterval:
        pos = tuple(int(i) + o for i, o in zip(index, self.space.offsets))
        return self.coeffs[pos]

    def check_symmetry(self) -> bool:
        """True when the stored coefficients are consistent with the symmetry flags."""
        sp = self.space
        a = self.coeffs
        ok = True
        if sp.parity != 0:
            flip = CIArray(IArray._raw(np.flip(a.re.lo, 0), np.flip(a.re.hi, 0)),
                           IArray._raw(np.flip(a.im.lo, 0), np.flip(a.im.hi, 0)))
            other = flip if sp.parity > 0 else -flip
            ok &= _overlap(a, other)
        if sp.real:
            axes = tuple(ax for ax, k in enumerate(sp.kinds) if k == "fourier")
            fl = lambda x: np.flip(x, axes)  # noqa: E731
            conj = CIArray(IArray._raw(fl(a.re.lo), fl(a.re.hi)), IArray._raw(-fl(a.im.hi), -fl(a.im.lo)))
            ok &= _overlap(a, conj)
        return bool(ok)

    # -- norms ---------------------------------------------------------------------
    def box_norm(self) -> Interval:
        w = self.space.full_weights()
        return (self.coeffs.abs() * w).sum()

    def norm(self) -> Interval:
        return norm_l1w(self)

    # -- restructuring ---------------------------------------------------------------
    def with_box(self, box) -> "FourierSeq":
        """Pad with zeros or truncate; truncated mass moves into the tail."""
        box = tuple(int(b) for b in box)
        new_space = self.space.with_box(box)
        if box == self.box:
            return self
        sl_old, sl_new = [], []
        for kind, n_old, n_new in zip(self.space.kinds, self.box, box):
            n = min(n_old, n_new)
            if kind == "fourier":
                sl_old.append(slice(n_old - n, n_old + n + 1))
                sl_new.append(slice(n_new - n, n_new + n + 1))
            else:
                sl_old.append(slice(0, n + 1))
                sl_new.append(slice(0, n + 1))
        sl_old, sl_new = tuple(sl_old), tuple(sl_new)
        parts = []
        for part in (self.coeffs.re, self.coeffs.im):
            lo, hi = np.zeros(new_space.shape), np.zeros(new_space.shape)
            lo[sl_new], hi[sl_new] = part.lo[sl_old], part.hi[sl_old]
            parts.append(IArray._raw(lo, hi))
        mag = self.coeffs.mag() * 1.0
        mag[sl_old] = 0.0
        spill = Interval(0.0)
        if np.any(mag):
            spill = (IArray.point(mag) * self.space.full_weights()).sum()
        return FourierSeq(new_space, CIArray(*parts), Interval(0.0, (self.tail + spill).hi))

    def with_tail(self, tail) -> "FourierSeq":
        return FourierSeq(self.space, self.coeffs, tail)

    def with_space(self, space: SeqSpace) -> "FourierSeq":
        """Relabel symmetry flags (same box and weights)."""
        if space.shape != self.space.shape or space.family() != self.space.family():
            raise SpaceError("relabelling must keep the box and weights")
        return FourierSeq(space, self.coeffs, self.tail)

    # -- arithmetic --------------------------------------------------------------------
    def _aligned(self, other: "FourierSeq"):
        self.space.check_compatible(other.space)
        box = tuple(max(a, b) for a, b in zip(self.box, other.box))
        return self.with_box(box), other.with_box(box)

    def __add__(self, other):
        if not isinstance(other, FourierSeq):
            return NotImplemented
        a, b = self._aligned(other)
        sp = a.space
        parity = sp.parity if sp.parity == b.space.parity else 0
        real = sp.real and b.space.real
        zm = sp.zero_mean and b.space.zero_mean and parity == 0
        if (parity, real, zm) != (sp.parity, sp.real, sp.zero_mean):
            sp = replace(sp, parity=parity, real=real, zero_mean=zm, _cache={})
        return FourierSeq(sp, a.coeffs + b.coeffs, Interval(0.0, (a.tail + b.tail).hi))

    def __neg__(self):
        return FourierSeq(self.space, -self.coeffs, self.tail)

    def __sub__(self, other):
        if not isinstance(other, FourierSeq):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "FourierSeq":
        """Multiply by a scalar (real, complex, Interval or CInterval)."""
        c = _as_cscalar(c)
        real = self.space.real and c.im == Interval(0.0)
        sp = self.space if real == self.space.real else replace(self.space, real=real, _cache={})
        return FourierSeq(sp, self.coeffs * CIArray(IArray.full((), c.re), IArray.full((), c.im)),
                          Interval(0.0, (self.tail * c.mag()).hi))

    def __mul__(self, c):
        if isinstance(c, FourierSeq):
            return conv(self, c)
        return self.scale(c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"FourierSeq(kinds={self.space.kinds}, box={self.box}, symmetry={self.symmetry}, tail={self.tail.hi:.3e})"

    # -- text form -------------------------------------------------------------------
    def to_text(self) -> str:
        sp = self.space
        lines = [
            "capde-sequence 1",
            "kinds " + " ".join(sp.kinds),
            "box " + " ".join(str(b) for b in sp.box),
            "weights " + " ".join(w.to_text() for w in sp.weights),
            f"parity {sp.parity}",
            f"real {int(sp.real)}",
            f"zero_mean {int(sp.zero_mean)}",
            f"tail {self.tail.to_decimal()} {self.tail.to_hex()}",
        ]
        full = sp.full_index()
        re, im = self.coeffs.re, self.coeffs.im
        rl, rh, il, ih = re.lo.ravel(), re.hi.ravel(), im.lo.ravel(), im.hi.ravel()
        for i in range(len(full)):
            if rl[i] == 0.0 and rh[i] == 0.0 and il[i] == 0.0 and ih[i] == 0.0:
                continue
            r = Interval._make(float(rl[i]), float(rh[i]))
            m = Interval._make(float(il[i]), float(ih[i]))
            idx = " ".join(str(int(v)) for v in full[i])
            lines.append(f"coeff {idx} : {r.to_decimal()} {m.to_decimal()} {r.to_hex()} {m.to_hex()}")
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FourierSeq":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0] != "capde-sequence 1":
            raise ValueError("not a sequence file")
        head = {}
        coeffs = []
        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key == "coeff":
                coeffs.append(rest)
            elif key == "end":
                break
            else:
                head[key] = rest
        kinds = tuple(head["kinds"].split())
        space = SeqSpace(
            kinds=kinds,
            box=tuple(int(b) for b in head["box"].split()),
            weights=tuple(Weight.from_text(w) for w in head["weights"].split()),
            parity=int(head["parity"]),
            real=bool(int(head["real"])),
            zero_mean=bool(int(head.get("zero_mean", "0"))),
        )
        tail_dec, tail_hex = head["tail"].split()
        tail = Interval.from_hex(tail_hex)
        if not tail.subset(Interval.from_decimal(tail_dec)):
            raise ValueError("tail decimal and hexadecimal forms disagree")
        size = int(np.prod(space.shape))
        arr = [np.zeros(size) for _ in range(4)]
        for rest in coeffs:
            idx, _, vals = rest.partition(":")
            idx = np.array([int(v) for v in idx.split()])
            rd, md, rx, mx = vals.split()
            r, m = Interval.from_hex(rx), Interval.from_hex(mx)
            if not (r.subset(Interval.from_decimal(rd)) and m.subset(Interval.from_decimal(md))):
                raise ValueError("coefficient decimal and hexadecimal forms disagree")
            f = int(space.flat_of(idx[None, :])[0])
            if f < 0:
                raise ValueError("coefficient index outside the box")
            arr[0][f], arr[1][f], arr[2][f], arr[3][f] = r.lo, r.hi, m.lo, m.hi
        sh = space.shape
        c = CIArray(IArray(arr[0].reshape(sh), arr[1].reshape(sh)), IArray(arr[2].reshape(sh), arr[3].reshape(sh)))
        return cls(space, c, tail)


def _overlap(a: CIArray, b: CIArray) -> bool:
    return bool(np.all(a.re.lo <= b.re.hi) and np.all(b.re.lo <= a.re.hi)
                and np.all(a.im.lo <= b.im.hi) and np.all(b.im.lo <= a.im.hi))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def norm_l1w(u: FourierSeq) -> Interval:
    """Enclosure of the weighted l1 norm of every element of ``u``."""
    w = u.space.full_weights()
    box = (u.coeffs.abs() * w).sum()
    lo = max(0.0, (Interval(box.lo) - u.tail.hi).lo)
    return Interval(lo, (box + u.tail.hi).hi)


def conv(u: FourierSeq, v: FourierSeq, box=None) -> FourierSeq:
    """Rigorous discrete convolution (product of the represented functions).

    ``box`` selects the output box: ``None`` uses the larger operand box
    (products landing outside spill into the tail) and ``"full"`` keeps every
    product mode.
    """
    u.space.check_compatible(v.space)
    full = u.coeffs.convolve(v.coeffs)
    fbox = tuple(a + b for a, b in zip(u.box, v.box))
    parity = u.space.parity * v.space.parity
    space = SeqSpace(u.space.kinds, fbox, u.space.weights, parity=parity,
                     real=u.space.real and v.space.real)
    tail = Interval(0.0)
    if u.tail.hi > 0.0 or v.tail.hi > 0.0:
        nu, nv = u.box_norm(), v.box_norm()
        tail = nu * v.tail.hi + nv * u.tail.hi + u.tail * v.tail
    res = FourierSeq(space, full, Interval(0.0, tail.hi))
    if box is None:
        box = tuple(max(a, b) for a, b in zip(u.box, v.box))
    if box == "full":
        return res
    return res.with_box(box)


def apply_symbol(u: FourierSeq, sym: Symbol, target: tuple | None = None) -> FourierSeq:
    """Multiply each coefficient by the symbol value at its index.

    A nonzero tail can only be carried through an unbounded symbol into a
    weaker space; pass ``target`` as a tuple of :class:`Weight` (one per axis)
    for that. Only one-dimensional targets are supported for tails.
    """
    sp = u.space
    k, j, m = sp.grids()
    vals = sym.eval(k, j, m)
    coeffs = u.coeffs * vals
    par = sym.k_parity() if sp.parity != 0 else 0
    parity = sp.parity * par if par != 0 else 0
    real = sp.real and _symbol_preserves_real(sym)
    tail = Interval(0.0)
    weights = sp.weights
    if u.tail.hi > 0.0:
        if target is None:
            if not sym.is_constant():
                raise SpaceError("unbounded symbol applied to a tail needs a target weight")
            tail = u.tail * sym.kpoly[0].mag()
        else:
            target = tuple(target)
            if sp.dims != 1:
                raise SpaceError("two-space tails are supported in one dimension only")
            factor = tail_sup(sym, Symbol.identity(), sp.kinds, (0,), region="all",
                              weight_ratio=(target[0], sp.weights[0]))
            tail = u.tail * factor
            weights = target
    elif target is not None:
        weights = tuple(target)
    space = SeqSpace(sp.kinds, sp.box, weights, parity=parity, real=real,
                     zero_mean=sp.zero_mean and parity == 0)
    return FourierSeq(space, coeffs, Interval(0.0, tail.hi))


def _symbol_preserves_real(sym: Symbol) -> bool:
    # sigma(-n) = conj(sigma(n)) keeps real sequences real
    for i, c in enumerate(sym.kpoly):
        part = c.im if i % 2 == 0 else c.re
        if part != Interval(0.0):
            return False
    return sym.cj.re == Interval(0.0) and sym.cm.im == Interval(0.0)


def _tail_cross(u: FourierSeq, v: FourierSeq) -> Interval:
    t = Interval(0.0)
    if u.tail.hi > 0.0:
        t = t + u.tail * dual_norm(v.with_tail(0.0))
    if v.tail.hi > 0.0:
        t = t + v.tail * dual_norm(u.with_tail(0.0))
    if u.tail.hi > 0.0 and v.tail.hi > 0.0:
        t = t + u.tail * v.tail
    return Interval(0.0, t.hi)


def _add_disk(z: CInterval, r: Interval) -> CInterval:
    if r.hi == 0.0:
        return z
    d = Interval(-r.hi, r.hi)
    return CInterval(z.re + d, z.im + d)


def inner_l2(u: FourierSeq, v: FourierSeq) -> CInterval:
    """L2 pairing ``sum a_n conj(b_n)`` with orthonormal basis modes."""
    a, b = u._aligned(v)
    s = (a.coeffs * b.coeffs.conj()).sum()
    return _add_disk(s, _tail_cross(u, v))


def _reflect(a: CIArray, space: SeqSpace) -> CIArray:
    axes = tuple(ax for ax, k in enumerate(space.kinds) if k == "fourier")
    fl = lambda x: np.flip(x, axes)  # noqa: E731
    return CIArray(IArray._raw(fl(a.re.lo), fl(a.re.hi)), IArray._raw(fl(a.im.lo), fl(a.im.hi)))


def pair(u: FourierSeq, v: FourierSeq) -> CInterval:
    """Bilinear pairing ``sum a_n b_{-n}``; equals the L2 product for real functions.

    Reflection acts on the Fourier axes only; Taylor indices are paired
    directly.
    """
    a, b = u._aligned(v)
    s = (a.coeffs * _reflect(b.coeffs, b.space)).sum()
    return _add_disk(s, _tail_cross(u, v))


def dual_norm(v: FourierSeq, weight=None) -> Interval:
    """Bound on ``sup |v_n| / W_n``, the norm of ``u -> <u, v>`` on the weighted l1 space."""
    sp = v.space
    if weight is not None:
        ws = weight if isinstance(weight, tuple) else (weight,) * sp.dims
        sp = replace(sp, weights=tuple(ws), _cache={})
    w = sp.full_weights()
    r = IArray.point(v.coeffs.mag()) / w
    best = float(np.max(r.hi)) if r.size else 0.0
    lo = float(np.max((IArray.point(v.coeffs.mig()) / w).lo)) if r.size else 0.0
    if v.tail.hi > 0.0:
        best = max(best, v.tail.hi)
        lo = 0.0
    return Interval(lo, best)


# ---------------------------------------------------------------------------
# algebraic decay
# ---------------------------------------------------------------------------


def _pow_table(s: float, nmax: int) -> IArray:
    """Enclosures of max(1, n)^(-s) for n = 0..nmax."""
    n = np.maximum(np.arange(nmax + 1, dtype=float), 1.0)
    return (IArray.point(n).log() * Interval(-s)).exp()


@lru_cache(maxsize=32)
def algebra_const(s: float, n0: int = 1000, kcut: int = 256) -> Interval:
    """Rigorous bound C(s) with ``||a * b||_s <= C(s) ||a||_s ||b||_s``.

    The norm is ``sup_n |a_n| w_n^s`` with ``w_0 = 1`` and ``w_n = |n|``.
    ``C(s) = sup_n S(n)`` with ``S(n) = sum_k (w_n / (w_k w_{n-k}))^s``. For
    ``|n| <= n0`` the sum is evaluated with explicit terms for ``-kcut <= k <=
    n + kcut`` and an integral bound for the rest; for ``|n| > n0`` a uniform
    bound is derived by splitting at ``k = kcut``.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError("algebra constant needs s > 1")
    S = Interval(s)
    K = int(kcut)
    tbl = _pow_table(s, n0 + 2 * K + 2)  # w^(-s)
    tail_k = Interval(K).pow_real(1.0 - s) / (S - 1.0)  # sum_{j > K} j^-s <= K^(1-s)/(s-1)
    best = 0.0
    ks = np.arange(-K, n0 + K + 1)
    for n in range(0, n0 + 1):
        kk = ks[: n + 2 * K + 1]
        a = np.abs(kk)
        b = np.abs(n - kk)
        terms = IArray._raw(tbl.lo[a], tbl.hi[a]) * IArray._raw(tbl.lo[b], tbl.hi[b])
        tot = terms.sum()
        wn = Interval(max(n, 1)).pow_real(s)
        val = wn * tot + 2.0 * tail_k
        best = max(best, val.hi)
    # |n| > n0
    zeta_part = (IArray._raw(tbl.lo[1:K + 1], tbl.hi[1:K + 1])).sum()
    zeta = zeta_part + tail_k
    ratio = (Interval(n0) / Interval(n0 - K)).pow_real(s)
    far = 2.0 + 2.0 * zeta + 2.0 * ratio * zeta_part + Interval(2.0).pow_real(s + 1.0) * tail_k
    best = max(best, far.hi)
    return Interval(1.0, best)


class DecaySeq:
    """Sequence with algebraic decay: ``||a||_s = sup_n |a_n| w_n^s``.

    ``coeffs`` are interval coefficients on ``|n| <= N`` (one-dimensional,
    two-sided) and ``bound`` majorizes ``|a_n| w_n^s`` for ``|n| > N``.
    """

    __slots__ = ("coeffs", "s", "bound")

    def __init__(self, coeffs: CIArray, s: float, bound=0.0):
        if not float(s) > 1.0:
            raise DomainError("decay rate must exceed 1")
        if not isinstance(coeffs, CIArray):
            coeffs = CIArray.point(np.asarray(coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.shape[0] % 2 != 1:
            raise SpaceError("decay sequences are one-dimensional and two-sided")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "s", float(s))
        object.__setattr__(self, "bound", _tail_interval(bound))

    def __setattr__(self, name, value):
        raise AttributeError("DecaySeq is immutable")

    @property
    def box(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    def weights(self) -> IArray:
        n = np.maximum(np.abs(np.arange(-self.box, self.box + 1)), 1).astype(float)
        return (IArray.point(n).log() * Interval(self.s)).exp()

    def norm(self) -> Interval:
        v = self.coeffs.abs() * self.weights()
        hi = max(float(np.max(v.hi)), self.bound.hi)
        lo = float(np.max(v.lo))
        return Interval(min(lo, hi), hi)

    def conv_bound(self, other: "DecaySeq") -> Interval:
        """Bound on the norm of the product via the algebra constant."""
        if self.s != other.s:
            raise SpaceError("decay rates differ")
        return algebra_const(self.s) * self.norm() * other.norm()


def decay_bound(u: FourierSeq, s: float) -> Interval:
    """Certified ``sup_n |a_n| max(1,|n|)^s`` over all elements of ``u`` (one-dimensional).

    The tail ball contributes ``tail * sup_{n} w_n^s / W_n``, which is finite
    when the space weight dominates ``|n|^s``.
    """
    sp = u.space
    if sp.dims != 1:
        raise SpaceError("decay bounds are one-dimensional")
    n = np.arange(-sp.box[0], sp.box[0] + 1)
    ws = (IArray.point(np.maximum(np.abs(n), 1).astype(float)).log() * Interval(s)).exp()
    best = float(np.max((u.coeffs.abs() * ws).hi))
    if u.tail.hi > 0.0:
        w = sp.weights[0]
        if w.mu2 > 0.0:
            nstar = int(math.ceil(s / w.mu2)) + 2
            kk = np.arange(0, nstar + 1)
            r = (IArray.point(np.maximum(kk, 1).astype(float)).log() * Interval(s)).exp() / w.values(kk)
            sup = float(np.max(r.hi))
        elif w.mu1 >= s:
            sup = 1.0
        else:
            raise SpaceError("space weight does not dominate the requested decay")
        best = max(best, (u.tail * sup).hi)
    return Interval(0.0, best)
