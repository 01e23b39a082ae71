"""Floating-point Galerkin solvers that produce candidates for the proofs.

Nothing here is rigorous; every candidate is re-evaluated with interval
arithmetic by :mod:`capde.problems`.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from .errors import ApproximationFailed
from .problems.kinds import CandidateSolution
from .problems.system import BorderedSystem
from .sequences import FourierSeq

__all__ = ["galerkin_newton", "galerkin_eigs", "solve_linear", "TOL_NEWTON", "MAX_ITER"]

log = logging.getLogger(__name__)

TOL_NEWTON = 1e-12
MAX_ITER = 50


def _deflation(x, roots, power, shift):
    """Deflation factor ``m(x) = prod(1/|x - r|^power + shift)`` and the correction weight of a step."""
    m = 1.0
    grads = []
    for r in roots:
        d = x - r
        nd = np.linalg.norm(d)
        if nd == 0.0:
            raise ApproximationFailed("iterate sits on a deflated solution")
        f = nd ** (-power) + shift
        m *= f
        # gradient of log f along a real direction: -power |d|^(-power-2) Re<d, .> / f
        grads.append((-power * nd ** (-power - 2) / f, d))
    return m, grads


def galerkin_newton(system: BorderedSystem, z0, u0: FourierSeq, tol: float = TOL_NEWTON,
                    max_iter: int = MAX_ITER, deflate=(), deflate_power: float = 2.0,
                    deflate_shift: float = 1.0) -> CandidateSolution:
    """Damped Newton on the Galerkin system of ``system``.

    Steps are halved while the residual grows. ``deflate`` lists known zeros
    (packed vectors) to steer away from. Raises :class:`ApproximationFailed`
    when the residual does not fall below ``tol`` within ``max_iter`` steps.
    """
    x = system.pack(np.asarray(z0, dtype=complex).reshape(-1), u0)
    if not np.all(np.isfinite(x)):
        raise ApproximationFailed("initial guess is not finite")
    roots = [np.asarray(r, dtype=complex) for r in deflate]
    f = system.galerkin_residual(x)
    res = np.max(np.abs(f)) if f.size else 0.0
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise ApproximationFailed(f"Newton did not converge: residual {res:.3e} after {it} steps")
        J = system.galerkin_jacobian(x)
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise ApproximationFailed("singular Galerkin Jacobian") from exc
        if roots:
            _, grads = _deflation(x, roots, deflate_power, deflate_shift)
            gdot = sum(g * np.real(np.vdot(d, dx)) for g, d in grads)
            if 1.0 - gdot != 0.0:
                dx = dx / (1.0 - gdot)
        step = 1.0
        merit = res * (_deflation(x, roots, deflate_power, deflate_shift)[0] if roots else 1.0)
        while True:
            xn = x + step * dx
            fn = system.galerkin_residual(xn)
            rn = np.max(np.abs(fn)) if fn.size else 0.0
            mn = rn * (_deflation(xn, roots, deflate_power, deflate_shift)[0] if roots else 1.0)
            if np.isfinite(rn) and (mn < merit or step < 2.0**-10):
                break
            step *= 0.5
        if not np.isfinite(rn):
            raise ApproximationFailed("Newton iterate left the finite range")
        x, f, res = xn, fn, rn
        it += 1
        log.debug("newton step %d: residual %.3e (damping %.3g)", it, res, step)
    z, u = system.unpack(x)
    return CandidateSolution(z=z, u=u, names=system.scalar_names)


def solve_linear(system: BorderedSystem) -> CandidateSolution:
    """Galerkin solution of a system that is affine in its unknowns."""
    x0 = np.zeros(system.size, dtype=complex)
    f = system.galerkin_residual(x0)
    J = system.galerkin_jacobian(x0)
    try:
        x = np.linalg.solve(J, -f)
    except np.linalg.LinAlgError as exc:
        raise ApproximationFailed("singular Galerkin matrix") from exc
    z, u = system.unpack(x)
    return CandidateSolution(z=z, u=u, names=system.scalar_names)


def galerkin_eigs(system: BorderedSystem, u0: FourierSeq, sign: float = 1.0):
    """Eigenpairs of the Galerkin derivative of ``system`` at ``u0`` (no scalar unknowns).

    For an equilibrium system this is ``L + DN(u0)``; pass ``sign=-1`` for
    systems written as ``a d_theta - L - N``. Returns ``[(lambda, coords)]``
    sorted by decreasing real part.
    """
    if system.q:
        raise ValueError("eigenvalues are taken of systems without scalar unknowns")
    x = system.pack(np.zeros(0), u0)
    J = sign * system.galerkin_jacobian(x)
    w, V = scipy.linalg.eig(J)
    order = np.lexsort((-w.imag, -w.real))
    return [(complex(w[i]), V[:, i]) for i in order]
