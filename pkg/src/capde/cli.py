"""Command-line front end: ``capde prove`` and ``capde check``.

Exit codes: 0 verified, 1 verification failed, 2 approximation failed,
3 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .contraction import Certificate
from .errors import (
    ApproximationFailed,
    CapdeError,
    ConfigError,
    DomainError,
    NotContractingError,
    PreconditionError,
    ResonanceSuspectedError,
    ResonantTailError,
    SpaceError,
    VerificationFailed,
)
from .problems.spec import KINDS, load_config

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VERIFY", "EXIT_APPROX", "EXIT_CONFIG"]

EXIT_OK, EXIT_VERIFY, EXIT_APPROX, EXIT_CONFIG = 0, 1, 2, 3

log = logging.getLogger("capde")

_VERIFY_ERRORS = (VerificationFailed, ResonantTailError, ResonanceSuspectedError, PreconditionError,
                  NotContractingError)


def _rho(text: str):
    if text in ("min", "max", "geo"):
        return text
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("--rho takes min, max, geo or a positive number") from exc
    if not v > 0.0:
        raise argparse.ArgumentTypeError("--rho must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capde", description="Computer-assisted proofs for scalar parabolic PDEs "
                                 "on the circle.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="run the proof pipeline and write a certificate")
    p.add_argument("kind", choices=sorted({k.replace("_", "-") for k in KINDS} | set(KINDS)),
                   help="problem kind")
    p.add_argument("--config", required=True, help="problem configuration file")
    p.add_argument("--alpha", help="KS parameter (overrides the config)")
    p.add_argument("--weights", help="mu1,mu2 of the x weight (overrides the config)")
    p.add_argument("--box", help="truncation N[,N_theta[,N_s]] (overrides the config)")
    p.add_argument("--rho", type=_rho, default="min", help="radius policy: min, max, geo or a value")
    p.add_argument("--method", choices=("radii", "thm21"), default="radii", help="fixed-point check")
    p.add_argument("--jets", type=int, help="number of manifold jets to certify before the g-proof")
    p.add_argument("--out", help="certificate path (default: <config stem>-<kind>.cert)")

    c = sub.add_parser("check", help="replay a certificate from its stored bounds")
    c.add_argument("certificate", help="certificate file")
    return ap


def _log_lines(stage: str, res) -> list:
    b = res.bounds
    cert = res.certificate
    lines = [f"[{stage}] eps = {b.eps.hi:.6e}"]
    for i, k in enumerate(b.kappas, start=1):
        lines.append(f"[{stage}] kappa{i} = {k.hi:.6e}")
    lines.append(f"[{stage}] rho- = {cert.rho_minus.hi:.6e}" if cert.rho_minus is not None
                 else f"[{stage}] rho- = n/a ({cert.method})")
    lines.append(f"[{stage}] rho+ = {cert.rho_plus.lo:.6e}" if cert.rho_plus is not None
                 else f"[{stage}] rho+ = none")
    lines.append(f"[{stage}] rho = {cert.rho.hi:.6e}")
    lines.append(f"[{stage}] delta_u <= {cert.delta_u.hi:.6e}")
    for name, v in res.scalars.items():
        lines.append(f"[{stage}] {name} in {v.re.to_decimal()} + i {v.im.to_decimal()}")
    return lines


def _write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def cmd_prove(args) -> int:
    from .pipeline import run

    overrides = {"kind": args.kind}
    for key in ("alpha", "weights", "box"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    try:
        cfg = load_config(args.config, overrides)
    except (ConfigError, SpaceError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    kind = cfg.kind.replace("_", "-")
    out = args.out or f"{os.path.splitext(args.config)[0]}-{kind}.cert"
    stem = os.path.splitext(out)[0]
    t0 = time.perf_counter()
    try:
        result = run(cfg, method=args.method, rho=args.rho, jets=args.jets)
    except ApproximationFailed as exc:
        print(f"approximation failed: {exc}", file=sys.stderr)
        return EXIT_APPROX
    except _VERIFY_ERRORS as exc:
        label = getattr(exc, "label", None) or getattr(exc, "order", None)
        suffix = f" [{label}]" if label is not None else ""
        print(f"verification failed{suffix}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConfigError, SpaceError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapdeError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    elapsed = time.perf_counter() - t0
    lines = [f"capde prove {kind} --config {args.config}", f"config digest {cfg.digest()}"]
    for stage, res in result.stages:
        path = f"{stem}-{stage}.cert"
        _write(path, res.certificate.to_text())
        lines += _log_lines(stage, res)
        lines.append(f"[{stage}] certificate {path}")
    if result.jets is not None:
        for n, m in enumerate(result.jets.margins, start=2):
            lines.append(f"[jets] order {n}: margin 1 - alpha_n >= {m.lo:.6e}")
    _write(out, result.main.certificate.to_text())
    lines += _log_lines(kind, result.main)
    lines.append(f"[{kind}] certificate {out}")
    lines.append(f"verified in {elapsed:.2f} s")
    _write(stem + ".log", "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    try:
        cert = Certificate.from_text(text)
        cert.replay()
    except (ValueError, CapdeError) as exc:
        label = getattr(exc, "label", None)
        suffix = f" [{label}]" if label else ""
        print(f"certificate rejected{suffix}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"certificate verified ({cert.method}): delta_u <= {cert.delta_u.hi:.6e}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "prove":
        return cmd_prove(args)
    return cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
