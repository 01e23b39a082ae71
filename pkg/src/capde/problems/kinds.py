"""The invariance problems as bordered systems, and the proof driver.

Each builder returns a :class:`~capde.problems.system.BorderedSystem` whose
zero is the object of interest:

* equilibrium ``l u + N(u) = 0``;
* traveling wave ``c phi' + l phi + N(phi) = 0`` with a phase row;
* periodic orbit ``a v_theta - l v - N(v) = 0`` on the (x, theta) torus with a
  phase row ``<v - vbar, vbar_theta> = 0``;
* eigenpair ``l v + DN(u0) v - lambda v = 0`` with ``<v, v> = 1``;
* manifold jets ``(n lambda - l - DN(u0)) u_n = R_n``;
* parameterized manifold remainder ``g`` with ``U = u0 + u1 s + g s^2`` and
  ``lambda s U_s [+ a U_theta] = l U + N(U)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..contraction import (
    Certificate,
    KantorovichData,
    RadiiPolynomial,
    check_thm21,
    choose_rho,
    prove_radii,
    radii_find,
)
from ..errors import (
    EmptyIntervalError,
    PreconditionError,
    ResonanceSuspectedError,
    ResonantTailError,
    SpaceError,
    SymmetryError,
)
from ..interval import CIArray, CInterval, IArray, Interval, _as_cscalar
from ..sequences import FourierSeq, SeqSpace, apply_symbol, conv, pair
from ..symbols import Symbol
from .spec import ProblemSpec
from .system import BorderedSystem, Bounds, ScalarRow, Term, lift, seq_power

__all__ = [
    "CandidateSolution",
    "ProofResult",
    "equilibrium_system",
    "wave_system",
    "orbit_system",
    "eigen_system",
    "jet_system",
    "manifold_system",
    "residual_equilibrium",
    "residual_wave",
    "residual_orbit",
    "residual_eigenpair",
    "residual_manifold",
    "phase_rows",
    "build_B",
    "bounds_equilibrium",
    "jet_forcing",
    "manifold_data",
    "prove_system",
    "manifold_jets",
    "taylor_shift",
    "lift_jet",
]

_ONE = CInterval(Interval(1.0))


@dataclass
class CandidateSolution:
    """Approximate zero: scalar unknowns and the primary sequence."""

    z: np.ndarray
    u: FourierSeq
    names: tuple = ()

    def scalar(self, name: str) -> complex:
        return complex(self.z[self.names.index(name)])


@dataclass
class ProofResult:
    """Outcome of a successful proof."""

    kind: str
    certificate: Certificate
    bounds: Bounds
    candidate: CandidateSolution
    radius: Interval          # certified distance from the candidate (delta u)
    scalars: dict = field(default_factory=dict)  # name -> CInterval enclosure

    def ball(self) -> FourierSeq:
        """The certified zero as a ball: candidate coefficients plus a tail of radius ``delta u``."""
        return self.candidate.u.with_tail(self.radius.hi)

    @property
    def rho_minus(self) -> Interval | None:
        return self.certificate.rho_minus

    @property
    def eps(self) -> Interval:
        return self.bounds.eps


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _nonlinear(spec: ProblemSpec, sign: int) -> list:
    return [Term(c * sign, sym, p) for c, p, sym in spec.nonlinear_symbols()]


def _check_linear(spec: ProblemSpec, space: SeqSpace):
    """``l(k) + lambda_reg`` must stay away from zero on the retained modes."""
    lam = spec.linear + Symbol.const(spec.lambda_reg)
    ks = np.unique(np.abs(space.coord_indices()[:, 0]))
    vals = lam.eval_k(ks)
    bad = ks[vals.mig() == 0.0]
    if len(bad):
        raise PreconditionError(f"l(k) + lambda_reg may vanish at retained mode k = {int(bad[0])}")


def equilibrium_system(spec: ProblemSpec) -> BorderedSystem:
    space = spec.space("equilibrium")
    _check_linear(spec, space)
    pre = None
    if spec.lambda_reg != Interval(0.0):
        pre = (spec.linear + Symbol.const(spec.lambda_reg)).mid_symbol()
    return BorderedSystem(space, spec.linear, _nonlinear(spec, 1), precond_linear=pre)


def phase_rows(kind: str, ubar: FourierSeq, vref: FourierSeq | None = None) -> ScalarRow:
    """Scalar constraint bordering a translation-invariant problem.

    ``kind='fixed'`` gives ``<u - ubar, vref> = 0`` (``vref`` defaults to
    ``ubar``); ``kind='section'`` gives ``<u, vref> = 0``; ``kind='normalize'``
    gives ``<u, u> - 1 = 0``. All pairings are the bilinear ``sum a_n b_-n``.
    """
    if kind == "normalize":
        return ScalarRow(const=CInterval(Interval(-1.0)), quad=_ONE)
    if vref is None:
        vref = ubar
    if kind == "section":
        return ScalarRow(vref=vref)
    if kind == "fixed":
        return ScalarRow(const=-pair(ubar, vref), vref=vref)
    raise ValueError(f"unknown phase row {kind!r}")


def wave_system(spec: ProblemSpec, phibar: FourierSeq, row: str = "phase") -> BorderedSystem:
    """Unknowns ``(c, phi)``. ``row='phase'`` pins the translate, ``'normalize'`` uses ``<phi, phi> = 1``."""
    space = spec.space("wave")
    dphi = apply_symbol(phibar.with_tail(0.0), Symbol.dx(1))
    r = phase_rows("fixed", phibar, dphi) if row == "phase" else phase_rows("normalize", phibar)
    terms = [Term(_ONE, Symbol.dx(1), 1, scalar=0)] + _nonlinear(spec, 1)
    return BorderedSystem(space, spec.linear, terms, [r], scalar_names=("c",))


def orbit_system(spec: ProblemSpec, vbar: FourierSeq) -> BorderedSystem:
    """Unknowns ``(a, v)`` on the torus with the fixed-phase row along ``vbar_theta``."""
    space = spec.space("orbit")
    vb = FourierSeq(space.with_box(vbar.box), vbar.coeffs)
    dv = apply_symbol(vb, Symbol.dtheta())
    r = phase_rows("fixed", vb, dv)
    terms = [Term(_ONE, Symbol.dtheta(), 1, scalar=0)] + _nonlinear(spec, -1)
    return BorderedSystem(space, -spec.linear, terms, [r], scalar_names=("a",))


def _dn_terms(spec: ProblemSpec, u0: FourierSeq, space: SeqSpace, sign: int) -> list:
    """Terms of ``sign * DN(u0) v``; tails of ``u0`` become data tails."""
    out = []
    u0 = FourierSeq(space.with_box(u0.box).with_parity(u0.space.parity), u0.coeffs, u0.tail)
    for c, p, sym in spec.nonlinear_symbols():
        d = seq_power(u0, p - 1)
        out.append(Term(c * (sign * p), sym, 1, data=d))
    return out


def eigen_system(spec: ProblemSpec, u0: FourierSeq, abar=None) -> BorderedSystem:
    """Unknowns ``(lambda, v)``: ``l v + DN(u0) v [- abar v_theta] - lambda v = 0``, ``<v, v> = 1``."""
    if abar is None:
        space = spec.space("eigenpair")
        lin = spec.linear
    else:
        space = spec.space("orbit")
        lin = spec.linear + Symbol.dtheta() * _as_cscalar(abar) * -1
    terms = _dn_terms(spec, u0, space, 1) + [Term(CInterval(Interval(-1.0)), Symbol.identity(), 1, scalar=0)]
    return BorderedSystem(space, lin, terms, [phase_rows("normalize", u0)], scalar_names=("lambda",))


def taylor_shift(u: FourierSeq, d: int) -> FourierSeq:
    """Multiply by ``s^d`` on the Taylor axis (the last axis)."""
    if d == 0:
        return u
    sp = u.space
    if sp.kinds[-1] != "taylor":
        raise SpaceError("no Taylor axis to shift")
    box = sp.box[:-1] + (sp.box[-1] + d,)
    nsp = sp.with_box(box)
    parts = []
    for part in (u.coeffs.re, u.coeffs.im):
        lo, hi = np.zeros(nsp.shape), np.zeros(nsp.shape)
        lo[..., d:], hi[..., d:] = part.lo, part.hi
        parts.append(IArray._raw(lo, hi))
    tail = u.tail
    if tail.hi > 0.0:
        tail = tail * sp.weights[-1].at(d)
    return FourierSeq(nsp, CIArray(*parts), Interval(0.0, tail.hi))


def lift_jet(u: FourierSeq, space: SeqSpace) -> FourierSeq:
    """Embed an x or (x, theta) sequence as a constant-in-s sequence of ``space``."""
    v = lift(FourierSeq(u.space, u.coeffs, u.tail), space.kinds, space.weights)
    return FourierSeq(SeqSpace(space.kinds, v.box, space.weights, parity=u.space.parity, real=u.space.real),
                      v.coeffs, v.tail)


def manifold_data(spec: ProblemSpec, u0: FourierSeq, u1: FourierSeq, space: SeqSpace) -> list:
    """``(coef, sym, e, D)`` with ``N``-part of the g-equation ``sum coef sym(D * g^e)``.

    ``D_{p,e} = sum_{j >= max(2, e)} C(p,j) C(j,e) u0^{p-j} u1^{j-e} s^{j+e-2}``
    plus ``p u0^{p-1}`` when ``e = 1``.
    """
    a0, a1 = lift_jet(u0, space), lift_jet(u1, space)
    out = []
    for c, p, sym in spec.nonlinear_symbols():
        for e in range(0, p + 1):
            acc = None
            for j in range(max(2, e), p + 1):
                w = conv(seq_power(a0, p - j), seq_power(a1, j - e), box="full")
                w = taylor_shift(w, j + e - 2).scale(Interval(math.comb(p, j) * math.comb(j, e)))
                acc = w if acc is None else acc + w
            if e == 1:
                w = seq_power(a0, p - 1).scale(Interval(p))
                acc = w if acc is None else acc + w
            if acc is not None:
                out.append((c, sym, e, acc))
    return out


def manifold_system(spec: ProblemSpec, u0: FourierSeq, u1: FourierSeq, lam, abar=None) -> BorderedSystem:
    """Remainder ``g`` of ``U = u0 + u1 s + g s^2``.

    ``F(g) = (lambda (m + 2) [+ i abar j] - l(k)) g - sum coef sym(D_{p,e} * g^e)``.
    """
    lam = _as_cscalar(lam)
    if lam.re.hi < 0.0 or (lam.re.lo <= 0.0 and lam.im == Interval(0.0)):
        raise ResonantTailError("lambda must be positive: lambda (m + 2) - l(k) would approach zero in the tail")
    if abs(lam.im.mid) > 0.0:
        raise SymmetryError("complex eigenvalues give two-dimensional manifolds; only real ones are supported")
    kind = "manifold_po" if abar is not None else "manifold_fp"
    space = spec.space(kind)
    lin = -spec.linear + Symbol(((lam * 2),), cm=lam)
    if abar is not None:
        lin = lin + Symbol.dtheta() * _as_cscalar(abar)
    terms = [Term(c * -1, sym, e, data=d) for c, sym, e, d in manifold_data(spec, u0, u1, space)]
    return BorderedSystem(space, lin, terms)


def jet_forcing(spec: ProblemSpec, jets: list, n: int) -> list:
    """``(coef, sym, W)`` with ``R_n = sum coef sym(W)``, ``W = [(sum_{i<n} u_i s^i)^p]_n``."""
    out = []
    for c, p, sym in spec.nonlinear_symbols():
        # Taylor powers truncated at order n
        powers = [j for j in jets[:n]] + [None] * (n + 1 - len(jets[:n]))
        cur = list(powers)
        for _ in range(p - 1):
            nxt = [None] * (n + 1)
            for i in range(n + 1):
                if cur[i] is None:
                    continue
                for j in range(n + 1 - i):
                    if powers[j] is None:
                        continue
                    t = conv(cur[i], powers[j], box="full")
                    nxt[i + j] = t if nxt[i + j] is None else nxt[i + j] + t
            cur = nxt
        if cur[n] is not None:
            out.append((c, sym, cur[n]))
    return out


def jet_system(spec: ProblemSpec, u0: FourierSeq, lam, n: int, forcing: list, abar=None) -> BorderedSystem:
    """Linear system ``(n lambda [- abar d_theta] - l - DN(u0)) u_n - R_n = 0``."""
    lam = _as_cscalar(lam)
    if abar is None:
        space = spec.space("jets")
        lin = -spec.linear + Symbol.const(lam * n)
    else:
        space = spec.space("orbit")
        lin = -spec.linear + Symbol.const(lam * n) + Symbol.dtheta() * _as_cscalar(abar)
    terms = _dn_terms(spec, u0, space, -1)
    for c, sym, w in forcing:
        w = FourierSeq(SeqSpace(space.kinds, w.box, space.weights, parity=w.space.parity, real=w.space.real),
                       w.coeffs, w.tail)
        terms.append(Term(c * -1, sym, 0, data=w))
    return BorderedSystem(space, lin, terms)


# ---------------------------------------------------------------------------
# residual views
# ---------------------------------------------------------------------------


def _seq_in(space: SeqSpace, u: FourierSeq) -> FourierSeq:
    sp = space.with_box(u.box)
    return FourierSeq(sp, u.coeffs, u.tail)


def residual_equilibrium(spec: ProblemSpec, u: FourierSeq) -> FourierSeq:
    sys_ = equilibrium_system(spec)
    return sys_.residual(np.zeros(0), _seq_in(sys_.space, u))[1]


def residual_wave(spec: ProblemSpec, phi: FourierSeq, c, row: str = "normalize"):
    sys_ = wave_system(spec, phi.with_tail(0.0), row=row)
    rows, seq = sys_.residual(CIArray.point(np.array([complex(_as_cscalar(c).mid())])) if not isinstance(c, CIArray)
                              else c, _seq_in(sys_.space, phi))
    return seq, rows[0]


def residual_orbit(spec: ProblemSpec, vbar: FourierSeq, abar, w: FourierSeq | None = None, alpha_corr=0.0):
    """Residual of ``(abar + alpha_corr) d_theta (vbar + w) - l (vbar + w) - N(vbar + w)`` and the phase row."""
    sys_ = orbit_system(spec, vbar)
    v = _seq_in(sys_.space, vbar)
    if w is not None:
        v = v + _seq_in(sys_.space, w)
    a = _as_cscalar(abar) + _as_cscalar(alpha_corr)
    z = CIArray(IArray._raw(np.array([a.re.lo]), np.array([a.re.hi])),
                IArray._raw(np.array([a.im.lo]), np.array([a.im.hi])))
    rows, seq = sys_.residual(z, v)
    return seq, rows[0]


def residual_eigenpair(spec: ProblemSpec, u0: FourierSeq, lam, v: FourierSeq, abar=None):
    sys_ = eigen_system(spec, u0, abar)
    lam = _as_cscalar(lam)
    z = CIArray(IArray._raw(np.array([lam.re.lo]), np.array([lam.re.hi])),
                IArray._raw(np.array([lam.im.lo]), np.array([lam.im.hi])))
    rows, seq = sys_.residual(z, _seq_in(sys_.space, v), strip_tails=False) if u0.tail.hi == 0.0 else \
        sys_.residual(z, _seq_in(sys_.space, v))
    return seq, rows[0]


def residual_manifold(spec: ProblemSpec, u0: FourierSeq, u1: FourierSeq, lam, g: FourierSeq, abar=None):
    sys_ = manifold_system(spec, u0, u1, lam, abar)
    return sys_.residual(np.zeros(0), _seq_in(sys_.space, g))[1]


def build_B(system: BorderedSystem, candidate: CandidateSolution):
    return system.build_B(candidate.z, candidate.u)


def bounds_equilibrium(spec: ProblemSpec, ubar: FourierSeq) -> RadiiPolynomial:
    sys_ = equilibrium_system(spec)
    return sys_.bounds(np.zeros(0), _seq_in(sys_.space, ubar)).polynomial()


# ---------------------------------------------------------------------------
# proofs
# ---------------------------------------------------------------------------


def _thm21_certificate(p: RadiiPolynomial, rho: float, digest: str, header: dict) -> Certificate:
    """Constants of the Lipschitz theorem from the radii bounds at radius ``rho``.

    ``alpha = kappa_1``, ``bf = eps``, ``K >= sum_{j>=2} kappa_j rho^(j-1)`` and
    ``b >= eps + sum_{j>=2} kappa_j rho^j / j`` (integral of the derivative
    variation along the segment).
    """
    r = Interval(rho)
    K = Interval(0.0)
    b = p.eps
    for j, kj in enumerate(p.kappas[1:], start=2):
        K = K + kj * r.pow_int(j - 1)
        b = b + kj * r.pow_int(j) / j
    K = Interval(0.0, math.nextafter(K.hi, math.inf))
    d = KantorovichData(alpha=p.kappas[0], b=b, K=K, rho=r, bf=p.eps)
    du = check_thm21(d)
    bounds = {"alpha": d.alpha, "b": d.b, "K": d.K, "rho": d.rho, "bf": d.bf}
    return Certificate(method="thm21", bounds=bounds, rho=r, rho_minus=None, rho_plus=None, delta_u=du,
                       digest=digest, header=dict(header))


def prove_system(system: BorderedSystem, candidate: CandidateSolution, kind: str, method: str = "radii",
                 rho="min", digest: str = "", header: dict | None = None) -> ProofResult:
    """Assemble bounds at the candidate and run the requested fixed-point check."""
    z = CIArray.point(np.asarray(candidate.z, dtype=complex).reshape(-1))
    b = system.bounds(z, candidate.u)
    p = b.polynomial()
    h = {"kind": kind, "unknowns": ",".join(system.scalar_names) + ("," if system.q else "") + "u",
         "space": f"{'x'.join(system.space.kinds)} box={','.join(map(str, system.space.box))}"
                  f" parity={system.space.parity}",
         "norm": "sum |z_i| + weighted l1 norm of u",
         "z1_columns": repr(b.z1_columns), "z1_far": repr(b.z1_far)}
    h.update(header or {})
    if method == "radii":
        cert = prove_radii(p, policy=rho, digest=digest, header=h)
        radius = cert.delta_u
    elif method == "thm21":
        rm, rp = radii_find(p)
        r = choose_rho(rm, rp, rho if rho != "min" else "geo")
        cert = _thm21_certificate(p, r, digest, h)
        radius = cert.delta_u
    else:
        raise ValueError(f"unknown method {method!r}")
    scal = {}
    for i, name in enumerate(system.scalar_names):
        zc = complex(candidate.z[i])
        e = Interval(-radius.hi, radius.hi)
        scal[name] = CInterval(Interval(zc.real) + e, Interval(zc.imag) + e)
    if scal:
        for name, v in scal.items():
            cert.header[f"enclosure_{name}"] = f"re {v.re.to_decimal()} im {v.im.to_decimal()}"
        cert = Certificate(method=cert.method, bounds=cert.bounds, rho=cert.rho, rho_minus=cert.rho_minus,
                           rho_plus=cert.rho_plus, delta_u=cert.delta_u, digest=cert.digest, header=cert.header)
    return ProofResult(kind=kind, certificate=cert, bounds=b, candidate=candidate, radius=radius, scalars=scal)


@dataclass
class JetResult:
    """Certified jets ``u_n`` (balls) and per-order solvability margins ``1 - alpha_n``."""

    jets: list
    margins: list
    proofs: list


def manifold_jets(spec: ProblemSpec, u0: FourierSeq, lam, u1: FourierSeq, n_max: int, abar=None) -> JetResult:
    """Solve the jet equations for ``n = 2..n_max`` with rigorous enclosures.

    Every order is a linear bordered system; ``kappa_1 < 1`` certifies that
    ``n lambda`` avoids the spectrum of the linearization (non-resonance) and
    ``1 - kappa_1`` is reported as the margin.
    """
    from ..numeric import solve_linear

    jets = [u0, u1]
    margins, proofs = [], []
    for n in range(2, n_max + 1):
        forcing = jet_forcing(spec, jets, n)
        system = jet_system(spec, u0, lam, n, forcing, abar)
        cand = solve_linear(system)
        try:
            res = prove_system(system, cand, f"jet{n}", method="radii", rho="min")
        except EmptyIntervalError as exc:
            raise ResonanceSuspectedError(
                f"order {n}: n*lambda is not shown to avoid the spectrum (alpha_n >= 1)", order=n) from exc
        alpha_n = res.bounds.kappas[0].hi
        margins.append(Interval(1.0) - Interval(alpha_n))
        proofs.append(res)
        jets.append(res.ball())
    return JetResult(jets=jets, margins=margins, proofs=proofs)
