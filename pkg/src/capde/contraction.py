"""Executable fixed-point theorems and replayable proof certificates.

Two sufficient conditions for a unique zero of ``F`` near ``ubar`` are
checked with interval arithmetic:

* the Lipschitz form with data ``(alpha, b, K, rho, bf)``
  (:func:`check_thm21`), and
* the radii polynomial form ``eps + rho * kappa(rho) < rho``
  (:func:`check_thm22`, :func:`radii_find`).

Every inequality is decided with upper endpoints on the side that must be
small and lower endpoints on the side that must be large.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptyIntervalError, IntervalOverflowError, VerificationFailed
from .interval import Interval

__all__ = [
    "KantorovichData",
    "RadiiPolynomial",
    "Certificate",
    "check_thm21",
    "radii_find",
    "check_thm22",
    "nonexistence_annulus",
    "choose_rho",
    "prove_radii",
    "MAX_DEGREE",
]

MAX_DEGREE = 6
_FMAX = sys.float_info.max
_VERSION = "capde 0.1.0"


def _iv(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.enclose(x)


def _nonneg(name: str, x: Interval) -> Interval:
    if x.hi < 0.0:
        raise DomainError(f"{name} must be nonnegative")
    return Interval(max(0.0, x.lo), x.hi)


@dataclass(frozen=True)
class KantorovichData:
    """Inputs of the Lipschitz fixed-point check.

    ``alpha`` bounds ``||I - B DF(ubar)||``, ``b`` bounds
    ``||B(F(ubar) + N(z))||`` on the ball, ``K`` bounds the Lipschitz
    constant of ``B N`` on the ball, ``rho`` is the radius and ``bf`` bounds
    ``||B F(ubar)||``.
    """

    alpha: Interval
    b: Interval
    K: Interval
    rho: Interval
    bf: Interval

    def __post_init__(self):
        for name in ("alpha", "b", "K", "rho", "bf"):
            object.__setattr__(self, name, _nonneg(name, _iv(getattr(self, name))))


def check_thm21(d: KantorovichData) -> Interval:
    """Check conditions (a)-(e) and return an upper bound on ``||delta u||``.

    Raises :class:`VerificationFailed` labelled with the first violated
    condition.
    """
    one = Interval(1.0)
    if not d.alpha.hi < 1.0:
        raise VerificationFailed(f"(a) alpha = {d.alpha.hi:.6g} is not below 1", "a")
    if d.b.hi < d.bf.lo:
        raise VerificationFailed("(b) b is smaller than ||B F(ubar)||", "b")
    if not math.isfinite(d.K.hi):
        raise VerificationFailed("(c) Lipschitz bound is not finite", "c")
    gap = one - Interval(d.alpha.hi)
    if not (Interval(d.b.hi) / gap).hi < d.rho.lo:
        raise VerificationFailed("(d) b / (1 - alpha) is not below rho", "d")
    if not (Interval(d.K.hi) / gap).hi < 1.0:
        raise VerificationFailed("(e) K / (1 - alpha) is not below 1", "e")
    den = gap - Interval(d.K.hi)
    return Interval(0.0, (Interval(d.bf.hi) / den).hi)


@dataclass(frozen=True)
class RadiiPolynomial:
    """``p(rho) = sum_{j>=2} kappa_j rho^j + (kappa_1 - 1) rho + eps``."""

    eps: Interval
    kappas: tuple

    def __post_init__(self):
        object.__setattr__(self, "eps", _nonneg("eps", _iv(self.eps)))
        ks = tuple(_nonneg(f"kappa_{i + 1}", _iv(k)) for i, k in enumerate(self.kappas))
        if not ks:
            raise DomainError("at least kappa_1 is required")
        if len(ks) > MAX_DEGREE:
            raise DomainError(f"degree is capped at {MAX_DEGREE}")
        object.__setattr__(self, "kappas", ks)

    @property
    def degree(self) -> int:
        return len(self.kappas)

    @property
    def effective_degree(self) -> int:
        n = self.degree
        while n > 1 and self.kappas[n - 1].hi == 0.0:
            n -= 1
        return n

    def kappa_of(self, rho) -> Interval:
        """``kappa(rho) = kappa_1 + kappa_2 rho + ...``."""
        rho = _iv(rho)
        acc = self.kappas[-1]
        for k in reversed(self.kappas[:-1]):
            acc = acc * rho + k
        return acc

    def __call__(self, rho) -> Interval:
        rho = _iv(rho)
        return self.eps + rho * self.kappa_of(rho) - rho

    def upper_on(self, a: float, b: float) -> float:
        """Upper bound of ``p`` on ``[a, b]`` for ``0 <= a <= b``."""
        A, B = Interval(a), Interval(b)
        acc = self.eps
        for j, k in enumerate(self.kappas[1:], start=2):
            acc = acc + Interval(k.hi) * B.pow_int(j)
        slope = Interval(self.kappas[0].hi) - 1.0
        acc = acc + (slope * A if slope.hi < 0.0 else slope * B)
        return acc.hi

    def negative_at(self, rho) -> bool:
        return self(rho).hi < 0.0

    def to_text(self) -> str:
        return " ".join(k.to_hex() for k in (self.eps,) + self.kappas)


def _roots_quadratic(p: RadiiPolynomial):
    one = Interval(1.0)
    k1, k2 = p.kappas[0], p.kappas[1]
    g = one - k1
    disc = g * g - 4.0 * k2 * p.eps
    if not disc.lo > 0.0:
        raise EmptyIntervalError("discriminant of the radii polynomial is not positive", "discriminant")
    sq = disc.sqrt()
    s = g + sq
    rho_minus = (2.0 * p.eps) / s
    try:
        rho_plus = s / (2.0 * k2) if k2.lo > 0.0 else None
    except IntervalOverflowError:
        rho_plus = None
    if rho_plus is None:
        # the upper root is beyond the float range; only its lower end is used
        try:
            lo = (s / (2.0 * Interval(k2.hi))).lo
        except IntervalOverflowError:
            lo = _FMAX
        rho_plus = Interval(lo, _FMAX)
    return Interval(max(0.0, rho_minus.lo), rho_minus.hi), rho_plus


def _bisect(p: RadiiPolynomial, neg: float, pos: float, lower_root: bool):
    """Shrink the bracket between a certified-negative and a certified-positive point."""
    for _ in range(200):
        mid = 0.5 * (neg + pos)
        if mid in (neg, pos):
            break
        v = p(Interval(mid))
        if v.hi < 0.0:
            neg = mid
        elif v.lo > 0.0:
            pos = mid
        else:
            break
    return (pos, neg) if lower_root else (neg, pos)


def _roots_general(p: RadiiPolynomial):
    grid = np.concatenate([np.logspace(-30, 12, 1200)])
    vals = [p.upper_on(r, r) for r in grid]
    i = int(np.argmin(vals))
    if not vals[i] < 0.0:
        raise EmptyIntervalError("no radius with a verified negative radii polynomial", "empty")
    star = float(grid[i])
    # lower root in (a, b): p(a) > 0 certified or a = 0
    if p.eps.hi == 0.0:
        rho_minus = Interval(0.0)
    else:
        a = 0.0
        lo_a, hi_b = _bisect(p, star, a, lower_root=True)
        if p(Interval(lo_a)).lo <= 0.0:
            lo_a = 0.0
        rho_minus = Interval(lo_a, hi_b)
    # upper root: grow until certified positive
    c = star
    for _ in range(2100):
        c *= 2.0
        if c > _FMAX / 4:
            break
        if p(Interval(c)).lo > 0.0:
            lo, hi = _bisect(p, star, c, lower_root=False)
            return rho_minus, Interval(lo, hi)
    return rho_minus, Interval(star, _FMAX)


def radii_find(p: RadiiPolynomial):
    """Enclosures ``(rho_minus, rho_plus)`` of the positive zeros of ``p``.

    Every radius strictly between ``rho_minus.hi`` and ``rho_plus.lo``
    satisfies ``p(rho) < 0``; this is verified at sample points before
    returning. ``rho_plus`` is ``None`` when ``p`` is linear (the negativity
    interval is unbounded).
    """
    if not p.kappas[0].hi < 1.0:
        raise EmptyIntervalError(f"kappa_1 = {p.kappas[0].hi:.6g} is not below 1", "kappa1")
    deg = p.effective_degree
    if deg == 1:
        if p.eps.hi == 0.0:
            rho_minus = Interval(0.0)
        else:
            rho_minus = p.eps / (Interval(1.0) - p.kappas[0])
        rho_minus = Interval(max(0.0, rho_minus.lo), rho_minus.hi)
        samples = [rho_minus.hi * 2.0 + 1e-300, rho_minus.hi * 4.0 + 1.0]
        rho_plus = None
    else:
        if deg == 2:
            rho_minus, rho_plus = _roots_quadratic(p)
        else:
            rho_minus, rho_plus = _roots_general(p)
        if not rho_minus.hi < rho_plus.lo:
            raise EmptyIntervalError("root enclosures overlap", "empty")
        a, b = rho_minus.hi, rho_plus.lo
        geo = math.sqrt(a * b) if a > 0.0 else b * 1e-9
        samples = [geo, 0.5 * (a + b)]
    for r in samples:
        if not p.negative_at(r):
            raise EmptyIntervalError(f"p is not verifiably negative at rho = {r:.6g}", "empty")
    return rho_minus, rho_plus


def check_thm22(eps, p: RadiiPolynomial, rho, digest: str = "", header: dict | None = None) -> "Certificate":
    """Verify ``eps + rho * kappa(rho) < rho`` and return a certificate.

    ``eps`` replaces the polynomial's own ``eps`` (they normally agree).
    """
    eps = _nonneg("eps", _iv(eps))
    rho = _iv(rho)
    if not rho.lo > 0.0:
        raise VerificationFailed("radius must be positive", "rho")
    q = RadiiPolynomial(eps, p.kappas)
    lhs = eps + rho * q.kappa_of(rho)
    if not lhs.hi < rho.lo:
        raise VerificationFailed(
            f"eps + rho kappa(rho) <= {lhs.hi:.6g} is not below rho = {rho.lo:.6g}", "radii")
    return Certificate(method="radii", bounds=_radii_bounds(q), rho=rho, rho_minus=None, rho_plus=None,
                       delta_u=Interval(0.0, rho.hi), digest=digest, header=dict(header or {}))


def nonexistence_annulus(p: RadiiPolynomial, rho_a, rho_b, cells: int = 64) -> bool:
    """Certify that ``rho_a < ||u - ubar|| <= rho_b`` contains no zero of ``F``.

    ``p`` must be verifiably negative on every cell of a uniform subdivision
    of ``[rho_a, rho_b]``. A degenerate annulus is trivially empty.
    """
    a, b = _iv(rho_a), _iv(rho_b)
    if a.lo == a.hi == b.lo == b.hi:
        return True
    lo, hi = a.lo, b.hi
    if not 0.0 < lo < hi:
        raise VerificationFailed("annulus radii must satisfy 0 < rho_a < rho_b", "annulus")
    edges = np.linspace(lo, hi, cells + 1)
    edges[0], edges[-1] = lo, hi
    for x, y in zip(edges[:-1], edges[1:]):
        if not p.upper_on(float(x), float(y)) < 0.0:
            raise VerificationFailed(f"p is not verifiably negative on [{x:.6g}, {y:.6g}]", "annulus")
    return True


def choose_rho(rho_minus: Interval, rho_plus: Interval | None, policy="geo") -> float:
    """Radius inside the negativity interval: ``min``, ``max``, ``geo`` or a number."""
    a = rho_minus.hi
    b = _FMAX if rho_plus is None else rho_plus.lo
    if not isinstance(policy, str):
        return float(policy)
    if policy == "min":
        r = a * (1.0 + 2.0**-20) if a > 0.0 else min(b * 1e-12, 1e-300)
    elif policy == "max":
        if rho_plus is None:
            raise VerificationFailed("the negativity interval is unbounded; no largest radius", "rho")
        r = b * (1.0 - 2.0**-20)
    elif policy == "geo":
        if rho_plus is None:
            r = 2.0 * a if a > 0.0 else 1.0
        elif a > 0.0:
            r = math.sqrt(a * b)
        else:
            r = b * 1e-9
    else:
        raise ValueError(f"unknown radius policy {policy!r}")
    return float(r)


def _radii_bounds(p: RadiiPolynomial) -> dict:
    out = {"eps": p.eps}
    for i, k in enumerate(p.kappas, start=1):
        out[f"kappa{i}"] = k
    return out


def prove_radii(p: RadiiPolynomial, policy="geo", digest: str = "", header: dict | None = None) -> "Certificate":
    """Find the negativity interval, pick a radius and certify it."""
    rho_minus, rho_plus = radii_find(p)
    rho = choose_rho(rho_minus, rho_plus, policy)
    cert = check_thm22(p.eps, p, Interval(rho), digest=digest, header=header)
    return Certificate(method="radii", bounds=cert.bounds, rho=cert.rho, rho_minus=rho_minus,
                       rho_plus=rho_plus, delta_u=Interval(0.0, rho_minus.hi), digest=digest,
                       header=dict(header or {}))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Replayable record of a successful fixed-point check.

    ``bounds`` holds ``eps, kappa1..`` (method ``radii``) or
    ``alpha, b, K, rho, bf`` (method ``thm21``). ``delta_u`` bounds the
    distance from the approximation to the certified zero. ``header`` holds
    free-form descriptive lines (problem kind, normalizations, extra
    enclosures) that are not part of the verdict.
    """

    method: str
    bounds: dict
    rho: Interval
    rho_minus: Interval | None
    rho_plus: Interval | None
    delta_u: Interval
    digest: str = ""
    header: dict = field(default_factory=dict)
    version: str = _VERSION

    def polynomial(self) -> RadiiPolynomial:
        n = sum(1 for k in self.bounds if k.startswith("kappa"))
        return RadiiPolynomial(self.bounds["eps"], tuple(self.bounds[f"kappa{i}"] for i in range(1, n + 1)))

    def kantorovich(self) -> KantorovichData:
        b = self.bounds
        return KantorovichData(b["alpha"], b["b"], b["K"], b["rho"], b["bf"])

    def replay(self) -> bool:
        """Re-run the theorem check on the stored bounds; raise on any disagreement."""
        if self.method == "radii":
            p = self.polynomial()
            check_thm22(p.eps, p, self.rho)
            if self.rho_minus is not None:
                rm, rp = radii_find(p)
                if rm != self.rho_minus or (rp != self.rho_plus):
                    raise VerificationFailed("stored root enclosures do not match the recomputation", "replay")
                if not self.delta_u.hi >= rm.hi:
                    raise VerificationFailed("stored correction bound is below the recomputed one", "replay")
            elif not self.delta_u.hi >= self.rho.hi:
                raise VerificationFailed("stored correction bound is below the radius", "replay")
        elif self.method == "thm21":
            du = check_thm21(self.kantorovich())
            if not self.delta_u.hi >= du.hi:
                raise VerificationFailed("stored correction bound is below the recomputed one", "replay")
        else:
            raise VerificationFailed(f"unknown method {self.method!r}", "replay")
        return True

    def to_text(self) -> str:
        lines = ["capde-certificate 1", f"version {self.version}", f"method {self.method}",
                 f"digest {self.digest or '-'}"]
        for key in sorted(self.header):
            val = str(self.header[key]).replace("\n", " ")
            lines.append(f"info {key} = {val}")

        def put(name, iv):
            if iv is None:
                lines.append(f"{name} none")
            else:
                lines.append(f"{name} {iv.to_decimal()} {iv.to_hex()}")

        for key in self.bounds:
            put(f"bound {key}", self.bounds[key])
        put("rho", self.rho)
        put("rho_minus", self.rho_minus)
        put("rho_plus", self.rho_plus)
        put("delta_u", self.delta_u)
        body = "\n".join(lines)
        lines.append("checksum " + hashlib.sha256(body.encode()).hexdigest()[:16])
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, verify_checksum: bool = True) -> "Certificate":
        """Parse a certificate; decimal/hex disagreement or a bad checksum raise ValueError."""
        lines = [ln.rstrip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0] != "capde-certificate 1":
            raise ValueError("not a certificate file")
        if verify_checksum:
            idx = [i for i, ln in enumerate(lines) if ln.startswith("checksum ")]
            if not idx:
                raise ValueError("certificate has no checksum")
            body = "\n".join(lines[: idx[0]])
            if hashlib.sha256(body.encode()).hexdigest()[:16] != lines[idx[0]].split()[1]:
                raise ValueError("certificate checksum mismatch")
        head, bounds, header, ivs = {}, {}, {}, {}

        def parse(rest: str):
            if rest.strip() == "none":
                return None
            dec, hx = rest.split()
            iv = Interval.from_hex(hx)
            if not iv.subset(Interval.from_decimal(dec)):
                raise ValueError("decimal and hexadecimal forms disagree")
            return iv

        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key == "info":
                k, _, v = rest.partition(" = ")
                header[k] = v
            elif key == "bound":
                k, _, v = rest.partition(" ")
                bounds[k] = parse(v)
            elif key in ("rho", "rho_minus", "rho_plus", "delta_u"):
                ivs[key] = parse(rest)
            elif key == "end":
                break
            else:
                head[key] = rest
        if head.get("method") not in ("radii", "thm21"):
            raise ValueError("unknown certificate method")
        if ivs.get("rho") is None or ivs.get("delta_u") is None:
            raise ValueError("certificate lacks a radius or a correction bound")
        digest = head.get("digest", "-")
        return cls(method=head["method"], bounds=bounds, rho=ivs["rho"], rho_minus=ivs.get("rho_minus"),
                   rho_plus=ivs.get("rho_plus"), delta_u=ivs["delta_u"],
                   digest="" if digest == "-" else digest, header=header,
                   version=head.get("version", _VERSION))
