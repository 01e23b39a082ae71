"""The proof workflow: approximate, precondition, bound, verify.

:func:`run` turns a :class:`~capde.problems.spec.RunConfig` into one or more
:class:`~capde.problems.kinds.ProofResult` objects. Multi-stage kinds (the
eigenpair and manifold problems) prove the equilibrium or orbit they rest on
first and feed its certified ball forward.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigError, ResonantTailError, SpaceError, SymmetryError
from .interval import CInterval, Interval
from .numeric import MAX_ITER, TOL_NEWTON, galerkin_newton
from .problems.kinds import (
    CandidateSolution,
    JetResult,
    ProofResult,
    eigen_system,
    equilibrium_system,
    manifold_jets,
    manifold_system,
    orbit_system,
    prove_system,
    wave_system,
)
from .problems.spec import RunConfig, parse_number, seed_array
from .sequences import FourierSeq, SeqSpace, decay_bound, pair

__all__ = ["PipelineResult", "run", "seed_sequence"]

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    """All proofs of one invocation; ``main`` is the one the command reports."""

    main: ProofResult
    stages: list = field(default_factory=list)   # (name, ProofResult)
    jets: JetResult | None = None
    notes: dict = field(default_factory=dict)


def seed_sequence(cfg: RunConfig, space: SeqSpace) -> FourierSeq:
    """Initial guess from the ``[seed]`` section or a sequence file, projected onto ``space``."""
    if cfg.seed_file:
        try:
            with open(cfg.seed_file, encoding="utf-8") as fh:
                u = FourierSeq.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read seed file {cfg.seed_file}: {exc}") from exc
        if u.space.kinds != space.kinds:
            raise ConfigError("seed file has the wrong axes")
        full = u.with_tail(0.0).with_box(space.box).mid()
    else:
        full = seed_array(space, cfg.seed)
    _, rep_flat, _, _ = space.orbits()
    return FourierSeq.from_coords(space, full.reshape(-1)[rep_flat])


def _solver_opts(cfg: RunConfig) -> dict:
    s = cfg.solver
    try:
        return {
            "tol": float(s.get("tol", TOL_NEWTON)),
            "max_iter": int(s.get("max_iter", MAX_ITER)),
        }
    except ValueError as exc:
        raise ConfigError(f"malformed [solver] entry: {exc}") from exc


def _digest(cfg: RunConfig, stage: str, cand: CandidateSolution) -> str:
    h = hashlib.sha256()
    h.update(cfg.source.encode())
    h.update(stage.encode())
    for v in np.asarray(cand.z, dtype=complex).ravel():
        h.update(f"{v.real.hex()}{v.imag.hex()}".encode())
    for v in cand.u.mid_coords():
        h.update(f"{v.real.hex()}{v.imag.hex()}".encode())
    return h.hexdigest()[:32]


def _header(cfg: RunConfig, stage: str, extra: dict | None = None) -> dict:
    h = cfg.spec.header()
    h["stage"] = stage
    h["config_digest"] = cfg.digest()
    h.update(extra or {})
    return h


def _prove(cfg, system, cand, stage, method, rho, extra=None) -> ProofResult:
    res = prove_system(system, cand, stage, method=method, rho=rho, digest=_digest(cfg, stage, cand),
                       header=_header(cfg, stage, extra))
    spec = cfg.spec
    if spec.decay_rate is not None and system.space.dims == 1:
        d = decay_bound(res.ball(), spec.decay_rate)
        res.certificate.header["decay_bound"] = f"sup |a_n| |n|^{spec.decay_rate!r} <= {d.hi!r}"
    return res


def _equilibrium(cfg: RunConfig, method, rho, stage="equilibrium") -> ProofResult:
    spec = cfg.spec
    system = equilibrium_system(spec)
    guess = seed_sequence(cfg, system.space)
    opts = _solver_opts(cfg)
    deflate = []
    nontrivial = np.any(guess.mid_coords() != 0)
    if nontrivial and cfg.solver.get("deflate_zero", "true").strip().lower() in ("1", "true", "yes"):
        deflate = [system.pack(np.zeros(0), FourierSeq.zeros(system.space))]
    cand = galerkin_newton(system, np.zeros(0), guess, deflate=deflate, **opts)
    return _prove(cfg, system, cand, stage, method, rho)


def _top_eigenpair(cfg: RunConfig, u0: FourierSeq, abar=None):
    """Galerkin eigenpair of ``l + DN(u0) [- abar d_theta]`` chosen by ``[eigen] index``."""
    system = eigen_system(cfg.spec, u0, abar)
    space = system.space
    x = system.pack(np.zeros(system.q), FourierSeq.zeros(space))
    A = system.galerkin_jacobian(x)[system.q:, system.q:]
    w, V = scipy.linalg.eig(A)
    order = np.lexsort((-w.imag, -w.real))
    try:
        index = int(cfg.extra.get("eigen", {}).get("index", "0"))
        i = order[index]
    except (ValueError, IndexError) as exc:
        raise ConfigError("[eigen] index must select a Galerkin eigenvalue") from exc
    lam, v = complex(w[i]), V[:, i]
    vs = FourierSeq.from_coords(space, v)
    s = complex(pair(vs, vs).mid())
    if s == 0:
        raise SpaceError("eigenvector is isotropic for the bilinear pairing")
    c = v / np.sqrt(s)
    k = int(np.argmax(np.abs(c)))
    if (c[k].imag if abs(c[k].imag) > abs(c[k].real) else c[k].real) < 0:
        c = -c
    return lam, FourierSeq.from_coords(space, c)


def _eigenpair(cfg, method, rho, base: ProofResult, abar=None, stage="eigenpair") -> ProofResult:
    u0 = base.ball()
    lam, v = _top_eigenpair(cfg, u0, abar)
    system = eigen_system(cfg.spec, u0, abar)
    cand = galerkin_newton(system, np.array([lam]), v, **_solver_opts(cfg))
    extra = {"u0_radius": repr(u0.tail.hi)}
    return _prove(cfg, system, cand, stage, method, rho, extra)


def _taylor_scale(cfg) -> Interval:
    sp = cfg.spec
    if sp.taylor_param is not None:
        return sp.taylor_param
    return parse_number(cfg.extra.get("manifold", {}).get("scale", "1/2")).re


def _manifold(cfg, method, rho, jets_n, orbit: bool) -> PipelineResult:
    stages = []
    if orbit:
        base = _orbit(cfg, method, rho)
        abar = base.scalars["a"]
        abar = CInterval(abar.re, Interval(0.0))
    else:
        base = _equilibrium(cfg, method, rho)
        abar = None
    stages.append(("orbit" if orbit else "equilibrium", base))
    eig = _eigenpair(cfg, method, rho, base, abar)
    stages.append(("eigenpair", eig))
    lam = eig.scalars["lambda"]
    if lam.im.mag() > eig.radius.hi * 4 + 1e-12:
        raise SymmetryError("the selected eigenvalue is complex; only real one-dimensional manifolds are supported")
    lam = CInterval(lam.re, Interval(0.0))
    sigma = _taylor_scale(cfg)
    u1 = eig.ball()
    u1 = FourierSeq(u1.space, u1.coeffs, u1.tail).scale(sigma)
    jr = None
    notes = {}
    if jets_n:
        jr = manifold_jets(cfg.spec, base.ball(), lam, u1, jets_n, abar)
        notes["jet_margins"] = " ".join(f"{m.lo!r}" for m in jr.margins)
    if lam.re.hi <= 0.0:
        raise ResonantTailError("the selected eigenvalue is not positive; the g-equation needs lambda > 0")
    system = manifold_system(cfg.spec, base.ball(), u1, lam, abar)
    cand = galerkin_newton(system, np.zeros(0), FourierSeq.zeros(system.space), **_solver_opts(cfg))
    extra = {"lambda": f"{lam.re.to_decimal()}", "scale": sigma.to_decimal(),
             "parameterization": "U(s) = u0 + u1 s + g(s) s^2, lambda s U_s = L U + N(U)"}
    extra.update(notes)
    main = _prove(cfg, system, cand, "manifold_po" if orbit else "manifold_fp", method, rho, extra)
    return PipelineResult(main=main, stages=stages, jets=jr, notes=notes)


def _wave(cfg, method, rho) -> ProofResult:
    spec = cfg.spec
    space = spec.space("wave")
    guess = seed_sequence(cfg, space)
    row = cfg.extra.get("wave", {}).get("row", "phase").strip()
    if row not in ("phase", "normalize"):
        raise ConfigError("[wave] row must be phase or normalize")
    system = wave_system(spec, guess, row=row)
    c0 = complex(cfg.seed_scalars.get("c", 0.0))
    cand = galerkin_newton(system, np.array([c0]), guess, **_solver_opts(cfg))
    return _prove(cfg, system, cand, "wave", method, rho, {"wave_row": row})


def _orbit(cfg, method, rho) -> ProofResult:
    spec = cfg.spec
    space = spec.space("orbit")
    guess = seed_sequence(cfg, space)
    if not np.any(guess.mid_coords()):
        raise ConfigError("orbit proofs need a nonzero seed")
    system = orbit_system(spec, guess)
    a0 = complex(cfg.seed_scalars.get("a", 1.0))
    cand = galerkin_newton(system, np.array([a0]), guess, **_solver_opts(cfg))
    return _prove(cfg, system, cand, "orbit", method, rho, {"phase_row": "<v - vbar, d_theta vbar> over x and theta"})


def run(cfg: RunConfig, method: str = "radii", rho="min", jets: int | None = None) -> PipelineResult:
    """Run the proof pipeline for ``cfg.kind``."""
    kind = cfg.kind
    if jets is None:
        try:
            jets = int(cfg.extra.get("manifold", {}).get("jets", "0"))
        except ValueError as exc:
            raise ConfigError("[manifold] jets must be an integer") from exc
    if kind == "equilibrium":
        return PipelineResult(main=_equilibrium(cfg, method, rho))
    if kind == "wave":
        return PipelineResult(main=_wave(cfg, method, rho))
    if kind == "orbit":
        return PipelineResult(main=_orbit(cfg, method, rho))
    if kind == "eigenpair":
        base = _equilibrium(cfg, method, rho)
        return PipelineResult(main=_eigenpair(cfg, method, rho, base), stages=[("equilibrium", base)])
    if kind == "manifold_fp":
        return _manifold(cfg, method, rho, jets, orbit=False)
    if kind == "manifold_po":
        return _manifold(cfg, method, rho, jets, orbit=True)
    raise ConfigError(f"unknown kind {kind!r}")
