"""Linear operators made of a finite interval block and a diagonal tail.

A :class:`BlockTailOperator` acts on a product space ``C^q x X`` where ``X``
is a weighted l1 sequence space truncated to a box. The block acts on the
``q`` scalars and on the coordinates of ``X`` inside the box. Every index
outside the box is multiplied by a rational diagonal symbol. Scalars carry
weight 1 and sequence coordinates carry the weighted norm of their unit
vector, so the operator norm is the largest weighted column sum

    ||T|| = max( max_m sum_n |T_nm| w_n / w_m ,  sup_{n outside} |t(n)| W'_n / W_n ).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NotContractingError, SpaceError
from .interval import CIArray, IArray, Interval
from .sequences import FourierSeq, SeqSpace, Weight
from .symbols import RationalSymbol, Symbol, axis_roles, tail_sup

__all__ = [
    "TailSpec",
    "BlockTailOperator",
    "column_norms",
    "op_norm",
    "compose_bound",
    "neumann_bound",
    "defect",
]


def column_norms(block: CIArray, row_weights: IArray, col_weights: IArray) -> IArray:
    """Enclosures of ``sum_n |T_nm| w_n / w_m`` for every column ``m``."""
    if block.ndim != 2:
        raise SpaceError("block must be a matrix")
    r, c = block.shape
    if row_weights.shape != (r,) or col_weights.shape != (c,):
        raise SpaceError("weight vectors do not match the block shape")
    if r == 0:
        return IArray.zeros((c,))
    a = block.abs()
    w = IArray._raw(row_weights.lo[:, None], row_weights.hi[:, None])
    return (a * w).sum(axis=0) / col_weights


@dataclass(frozen=True)
class TailSpec:
    """Diagonal action ``t(n)`` on every index outside a box.

    ``src_weights`` and ``dst_weights`` give the per-axis weights of the
    source and target spaces; they may differ only in one dimension.
    """

    symbol: RationalSymbol
    kinds: tuple
    box: tuple
    parity: int = 0
    src_weights: tuple = ()
    dst_weights: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "box", tuple(int(b) for b in self.box))
        d = len(self.kinds)
        sw = tuple(self.src_weights) or (Weight(),) * d
        dw = tuple(self.dst_weights) or sw
        object.__setattr__(self, "src_weights", sw)
        object.__setattr__(self, "dst_weights", dw)

    def bound(self) -> Interval:
        """Certified ``sup |t(n)| W'_n / W_n`` over indices outside the box."""
        if "bound" not in self._cache:
            ratio = None
            if self.src_weights != self.dst_weights:
                if len(self.kinds) != 1:
                    raise SpaceError("different source and target weights need a one-dimensional space")
                ratio = (self.dst_weights[0], self.src_weights[0])
            den = self.symbol.den if self.symbol.den is not None else Symbol.identity()
            hi = tail_sup(self.symbol.num, den, self.kinds, self.box, parity=self.parity,
                          weight_ratio=ratio)
            self._cache["bound"] = Interval(0.0, hi)
        return self._cache["bound"]

    def same_index_set(self, other: "TailSpec") -> bool:
        return (self.kinds, self.box, self.parity) == (other.kinds, other.box, other.parity)

    def with_symbol(self, symbol: RationalSymbol, src_weights=None, dst_weights=None) -> "TailSpec":
        return TailSpec(symbol, self.kinds, self.box, self.parity,
                        self.src_weights if src_weights is None else src_weights,
                        self.dst_weights if dst_weights is None else dst_weights)

    def to_text(self) -> str:
        return (f"kinds={','.join(self.kinds)} box={','.join(map(str, self.box))} parity={self.parity} "
                f"src={','.join(w.to_text() for w in self.src_weights)} "
                f"dst={','.join(w.to_text() for w in self.dst_weights)} :: {self.symbol.to_text()}")

    @classmethod
    def from_text(cls, text: str) -> "TailSpec":
        head, _, sym = text.partition("::")
        kv = dict(item.split("=", 1) for item in head.split())
        return cls(
            RationalSymbol.from_text(sym.strip()),
            tuple(kv["kinds"].split(",")),
            tuple(int(b) for b in kv["box"].split(",")),
            int(kv["parity"]),
            tuple(Weight.from_text(w) for w in kv["src"].split(",")),
            tuple(Weight.from_text(w) for w in kv["dst"].split(",")),
        )


def _space_weights(space: SeqSpace | None, nscalars: int) -> IArray:
    ones = IArray.point(np.ones(nscalars))
    if space is None:
        return ones
    w = space.reduced_weights()
    return IArray._raw(np.concatenate([ones.lo, w.lo]), np.concatenate([ones.hi, w.hi]))


def _rational_mul(a: RationalSymbol, b: RationalSymbol) -> RationalSymbol:
    num = a.num * b.num
    if a.den is None and b.den is None:
        return RationalSymbol(num)
    da = a.den if a.den is not None else Symbol.identity()
    db = b.den if b.den is not None else Symbol.identity()
    return RationalSymbol(num, da * db)


def _rational_add(a: RationalSymbol, b: RationalSymbol, sign: float = 1.0) -> RationalSymbol:
    if a.den is None and b.den is None:
        return RationalSymbol(a.num + b.num * sign)
    if a.den is not None and b.den is not None and a.den == b.den:
        return RationalSymbol(a.num + b.num * sign, a.den)
    da = a.den if a.den is not None else Symbol.identity()
    db = b.den if b.den is not None else Symbol.identity()
    return RationalSymbol(a.num * db + b.num * da * sign, da * db)


class BlockTailOperator:
    """Finite interval block plus a diagonal tail on a product space.

    ``block`` has shape (rows, cols) and acts on the stacked vector
    ``(scalars, box coordinates)``. ``row_weights``/``col_weights`` are the
    norms of the unit vectors of the target/source coordinates. ``tail``
    describes the action outside the box; ``finite=True`` marks an operator
    between finite-dimensional spaces (no tail needed).
    """

    __slots__ = ("block", "row_weights", "col_weights", "tail", "finite", "nscalars")

    def __init__(self, block: CIArray, row_weights: IArray | None = None, col_weights: IArray | None = None,
                 tail: TailSpec | None = None, finite: bool = True, nscalars: int = 0):
        if not isinstance(block, CIArray):
            block = CIArray.point(np.asarray(block, dtype=complex))
        if block.ndim != 2:
            raise SpaceError("block must be a matrix")
        r, c = block.shape
        row_weights = IArray.point(np.ones(r)) if row_weights is None else row_weights
        col_weights = IArray.point(np.ones(c)) if col_weights is None else col_weights
        if row_weights.shape != (r,) or col_weights.shape != (c,):
            raise SpaceError("weight vectors do not match the block shape")
        if np.any(row_weights.lo <= 0.0) or np.any(col_weights.lo <= 0.0):
            raise SpaceError("coordinate weights must be positive")
        for name, val in (("block", block), ("row_weights", row_weights), ("col_weights", col_weights),
                          ("tail", tail), ("finite", bool(finite)), ("nscalars", int(nscalars))):
            object.__setattr__(self, name, val)

    def __setattr__(self, name, value):
        raise AttributeError("BlockTailOperator is immutable")

    # -- constructors ------------------------------------------------------------
    @classmethod
    def on_space(cls, block, src: SeqSpace, dst: SeqSpace | None = None,
                 tail: RationalSymbol | None = None, nscalars: int = 0) -> "BlockTailOperator":
        """Operator on ``C^nscalars x src`` with the given block and tail symbol."""
        dst = src if dst is None else dst
        if (src.kinds, src.box, src.parity, src.zero_mean) != (dst.kinds, dst.box, dst.parity, dst.zero_mean):
            raise SpaceError("source and target must share the index set")
        spec = None
        if tail is not None:
            spec = TailSpec(tail, src.kinds, src.box, src.parity, src.weights, dst.weights)
        return cls(block, _space_weights(dst, nscalars), _space_weights(src, nscalars), spec,
                   finite=False, nscalars=nscalars)

    @classmethod
    def identity(cls, space: SeqSpace | None = None, nscalars: int = 0, size: int | None = None) -> "BlockTailOperator":
        if space is None:
            n = nscalars if size is None else size
            return cls(CIArray.point(np.eye(n)))
        n = nscalars + space.ncoords
        return cls.on_space(CIArray.point(np.eye(n)), space, tail=RationalSymbol(Symbol.identity()),
                            nscalars=nscalars)

    @classmethod
    def diagonal(cls, values, space: SeqSpace | None = None, tail: RationalSymbol | None = None,
                 nscalars: int = 0) -> "BlockTailOperator":
        if isinstance(values, CIArray):
            d = values
        else:
            d = CIArray.point(np.asarray(values, dtype=complex))
        n = d.shape[0]
        z = np.zeros((n, n))
        idx = np.arange(n)
        parts = []
        for part in (d.re, d.im):
            lo, hi = z.copy(), z.copy()
            lo[idx, idx], hi[idx, idx] = part.lo, part.hi
            parts.append(IArray._raw(lo, hi))
        block = CIArray(*parts)
        if space is None:
            return cls(block)
        return cls.on_space(block, space, tail=tail, nscalars=nscalars)

    # -- properties --------------------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.block.shape

    def tail_bound(self) -> Interval:
        if self.tail is None:
            if self.finite:
                return Interval(0.0)
            raise SpaceError("operator on an infinite-dimensional space has no tail bound")
        return self.tail.bound()

    def column_norms(self) -> IArray:
        return column_norms(self.block, self.row_weights, self.col_weights)

    def norm(self) -> Interval:
        return op_norm(self)

    # -- algebra -------------------------------------------------------------------------
    def _check_same(self, other: "BlockTailOperator"):
        if self.shape != other.shape:
            raise SpaceError("operator shapes differ")
        if not (np.array_equal(self.row_weights.hi, other.row_weights.hi)
                and np.array_equal(self.col_weights.hi, other.col_weights.hi)):
            raise SpaceError("operator weights differ")
        if (self.tail is None) != (other.tail is None) or self.finite != other.finite:
            raise SpaceError("operator tails are incompatible")
        if self.tail is not None and not self.tail.same_index_set(other.tail):
            raise SpaceError("operator tails live on different index sets")

    def _combine(self, other: "BlockTailOperator", sign: float) -> "BlockTailOperator":
        self._check_same(other)
        block = self.block + other.block if sign > 0 else self.block - other.block
        tail = None
        if self.tail is not None:
            if (self.tail.src_weights, self.tail.dst_weights) != (other.tail.src_weights, other.tail.dst_weights):
                raise SpaceError("operator tails use different weights")
            tail = self.tail.with_symbol(_rational_add(self.tail.symbol, other.tail.symbol, sign))
        return BlockTailOperator(block, self.row_weights, self.col_weights, tail, self.finite, self.nscalars)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        tail = None
        if self.tail is not None:
            s = self.tail.symbol
            tail = self.tail.with_symbol(RationalSymbol(-s.num, s.den))
        return BlockTailOperator(-self.block, self.row_weights, self.col_weights, tail, self.finite, self.nscalars)

    def identity_like(self) -> "BlockTailOperator":
        r, c = self.shape
        if r != c:
            raise SpaceError("identity needs a square block")
        tail = None
        if self.tail is not None:
            tail = self.tail.with_symbol(RationalSymbol(Symbol.identity()), dst_weights=self.tail.src_weights)
        return BlockTailOperator(CIArray.point(np.eye(r)), self.col_weights, self.col_weights, tail,
                                 self.finite, self.nscalars)

    def __matmul__(self, other: "BlockTailOperator") -> "BlockTailOperator":
        """Composition ``self o other``; ``other`` must map into the source of ``self``."""
        if self.shape[1] != other.shape[0]:
            raise SpaceError("inner dimensions differ")
        if not np.array_equal(self.col_weights.hi, other.row_weights.hi):
            raise SpaceError("intermediate weights differ")
        if self.finite != other.finite or (self.tail is None) != (other.tail is None):
            raise SpaceError("cannot compose a finite operator with an infinite one")
        tail = None
        if self.tail is not None:
            if not self.tail.same_index_set(other.tail) or self.tail.src_weights != other.tail.dst_weights:
                raise SpaceError("operator tails are incompatible")
            tail = TailSpec(_rational_mul(self.tail.symbol, other.tail.symbol), self.tail.kinds,
                            self.tail.box, self.tail.parity, other.tail.src_weights, self.tail.dst_weights)
        return BlockTailOperator(self.block @ other.block, self.row_weights, other.col_weights, tail,
                                 self.finite, self.nscalars)

    def right_symbol(self, sym: Symbol, space: SeqSpace) -> "BlockTailOperator":
        """The composition ``self o (0 + sym)``: scalar columns dropped, sequence columns scaled.

        ``space`` is the source sequence space of ``self``; the symbol must map
        unit orbit vectors of that space to multiples of themselves (for
        example ``i k`` between odd and even classes, whose mirrored pairs
        have equal weights).
        """
        q = self.nscalars
        reps = space.coord_indices()
        if reps.shape[0] + q != self.shape[1]:
            raise SpaceError("space does not match the operator columns")
        k = reps[:, 0]
        r = axis_roles(space.kinds)
        j = reps[:, r["theta"]] if "theta" in r else None
        m = reps[:, r["s"]] if "s" in r else None
        vals = sym.eval(k, j, m)
        z = np.zeros(q)
        scale = CIArray(IArray._raw(np.concatenate([z, vals.re.lo]), np.concatenate([z, vals.re.hi])),
                        IArray._raw(np.concatenate([z, vals.im.lo]), np.concatenate([z, vals.im.hi])))
        block = self.block * CIArray(IArray._raw(scale.re.lo[None, :], scale.re.hi[None, :]),
                                     IArray._raw(scale.im.lo[None, :], scale.im.hi[None, :]))
        tail = None
        if self.tail is not None:
            tail = self.tail.with_symbol(_rational_mul(self.tail.symbol, RationalSymbol(sym)))
        return BlockTailOperator(block, self.row_weights, self.col_weights, tail, self.finite, q)

    # -- action --------------------------------------------------------------------------
    def apply(self, x: CIArray, tail: Interval | float = 0.0) -> tuple[CIArray, Interval]:
        """Apply to a coordinate vector whose represented set has a tail ball of radius ``tail``.

        Returns the image coordinates and the radius of the image ball.
        """
        tail = tail if isinstance(tail, Interval) else Interval(float(tail))
        y = self.block @ x.reshape(-1, 1)
        out = Interval(0.0)
        if tail.hi > 0.0:
            out = op_norm(self) * tail.hi
        return y.reshape(-1), Interval(0.0, out.hi)

    def apply_seq(self, u: FourierSeq, scalars: CIArray | None = None, dst: SeqSpace | None = None):
        """Apply to ``(scalars, u)``; ``u`` is re-boxed to the operator box first.

        Returns ``(scalar image, FourierSeq image)``.
        """
        if self.tail is None and not self.finite:
            raise SpaceError("operator on an infinite-dimensional space has no tail bound")
        q = self.nscalars
        if self.tail is not None:
            u = u.with_box(self.tail.box)
        s = CIArray.zeros((q,)) if scalars is None else scalars
        c = u.coords()
        x = CIArray(IArray._raw(np.concatenate([s.re.lo, c.re.lo]), np.concatenate([s.re.hi, c.re.hi])),
                    IArray._raw(np.concatenate([s.im.lo, c.im.lo]), np.concatenate([s.im.hi, c.im.hi])))
        y, t = self.apply(x, u.tail)
        space = dst or u.space
        if self.tail is not None and dst is None:
            space = replace(u.space, weights=self.tail.dst_weights, _cache={})
        return y[:q], FourierSeq.from_coords(space, y[q:], t)

    # -- text form -------------------------------------------------------------------------
    def to_text(self) -> str:
        r, c = self.shape
        lines = ["capde-operator 1", f"shape {r} {c}", f"finite {int(self.finite)}", f"nscalars {self.nscalars}",
                 "tail " + ("none" if self.tail is None else self.tail.to_text())]
        for name, w in (("roww", self.row_weights), ("colw", self.col_weights)):
            for i in range(w.shape[0]):
                lines.append(f"{name} {i} {w[i].to_hex()}")
        re, im = self.block.re, self.block.im
        for i in range(r):
            for j in range(c):
                a, b = re[i, j], im[i, j]
                if a == Interval(0.0) and b == Interval(0.0):
                    continue
                lines.append(f"entry {i} {j} : {a.to_decimal()} {b.to_decimal()} {a.to_hex()} {b.to_hex()}")
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BlockTailOperator":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0] != "capde-operator 1":
            raise ValueError("not an operator file")
        head, entries, ws = {}, [], {"roww": {}, "colw": {}}
        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key == "entry":
                entries.append(rest)
            elif key in ws:
                i, h = rest.split()
                ws[key][int(i)] = Interval.from_hex(h)
            elif key == "end":
                break
            else:
                head[key] = rest
        r, c = (int(v) for v in head["shape"].split())
        arr = [np.zeros((r, c)) for _ in range(4)]
        for rest in entries:
            ij, _, vals = rest.partition(":")
            i, j = (int(v) for v in ij.split())
            ad, bd, ax, bx = vals.split()
            a, b = Interval.from_hex(ax), Interval.from_hex(bx)
            if not (a.subset(Interval.from_decimal(ad)) and b.subset(Interval.from_decimal(bd))):
                raise ValueError("entry decimal and hexadecimal forms disagree")
            arr[0][i, j], arr[1][i, j], arr[2][i, j], arr[3][i, j] = a.lo, a.hi, b.lo, b.hi
        block = CIArray(IArray(arr[0], arr[1]), IArray(arr[2], arr[3]))
        rw = IArray.from_intervals([ws["roww"][i] for i in range(r)]) if r else IArray.zeros((0,))
        cw = IArray.from_intervals([ws["colw"][i] for i in range(c)]) if c else IArray.zeros((0,))
        tail = None if head["tail"] == "none" else TailSpec.from_text(head["tail"])
        return cls(block, rw, cw, tail, bool(int(head["finite"])), int(head.get("nscalars", "0")))


def op_norm(T: BlockTailOperator) -> Interval:
    """Enclosure of the weighted l1 operator norm (largest weighted column sum)."""
    cols = T.column_norms()
    hi = float(np.max(cols.hi)) if cols.size else 0.0
    lo = float(np.max(cols.lo)) if cols.size else 0.0
    t = T.tail_bound()
    return Interval(lo, max(hi, t.hi))


def compose_bound(A: BlockTailOperator, B: BlockTailOperator, via: Weight | tuple | None = None) -> Interval:
    """Bound ``||A B|| <= ||A|| ||B||`` where ``B`` maps into the space ``A`` acts on."""
    if A.shape[1] != B.shape[0]:
        raise SpaceError("inner dimensions differ")
    if not np.array_equal(A.col_weights.hi, B.row_weights.hi):
        raise SpaceError("intermediate weights differ")
    if via is not None:
        via = via if isinstance(via, tuple) else (via,)
        for T, ws in ((A, "src_weights"), (B, "dst_weights")):
            if T.tail is not None and tuple(getattr(T.tail, ws)) != tuple(via) * (len(T.tail.kinds) // len(via)):
                raise SpaceError("intermediate weight does not match the operators")
    return op_norm(A) * op_norm(B)


def defect(B: BlockTailOperator, A: BlockTailOperator) -> Interval:
    """Enclosure of ``||I - B A||``."""
    BA = B @ A
    return op_norm(BA.identity_like() - BA)


def neumann_bound(B: BlockTailOperator, A: BlockTailOperator) -> Interval:
    """Bound ``||(B A)^-1|| <= 1 / (1 - alpha)`` with ``alpha = ||I - B A|| < 1``.

    Success also shows that ``B A`` and hence ``A`` is injective.
    """
    alpha = defect(B, A)
    if not alpha.hi < 1.0:
        raise NotContractingError(f"||I - BA|| <= {alpha.hi:.6g} is not below 1")
    return Interval(1.0) / (Interval(1.0) - alpha)
