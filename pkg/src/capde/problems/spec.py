"""Problem descriptions and the text configuration format.

A configuration is an INI file. Every number is read as an exact decimal or
fraction and rounded outward, so the file is part of the proof statement::

    [problem]
    kind = equilibrium
    alpha = 2
    linear = ks              ; or k-power coefficients: 0, 0, 2, 0, -1
    symmetry = odd           ; odd | even | none
    lambda_reg = 0

    [nonlinearity]
    term1 = coef=1/2 power=2 deriv=1
    ; term2 = coef=1 power=2 dpoly=4/3, 4/3, 1/3, 1/3

    [space]
    weights = 2, 0.05        ; x axis (mu1, mu2)
    box = 24                 ; N_x[, N_theta[, N_s]]

    [seed]
    sin 1 = 0.3              ; coefficients of sin(k x [+ j theta])
"""

from __future__ import annotations

import configparser
import hashlib
import os
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import numpy as np

from ..errors import ConfigError, SymmetryError
from ..interval import CInterval, Interval, _as_cscalar
from ..sequences import SeqSpace, Weight
from ..symbols import Symbol

__all__ = [
    "KINDS",
    "NonlinearTerm",
    "ProblemSpec",
    "RunConfig",
    "parse_number",
    "parse_config",
    "load_config",
    "ks_spec",
]

KINDS = ("equilibrium", "wave", "orbit", "eigenpair", "manifold_fp", "manifold_po")

_NUM = r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?(?:/[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?"


def _exact(tok: str):
    tok = tok.strip()
    if not tok:
        raise ConfigError("empty number")
    try:
        if "/" in tok:
            a, b = tok.split("/")
            return Fraction(Decimal(a)) / Fraction(Decimal(b))
        return Decimal(tok)
    except (InvalidOperation, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"malformed number {tok!r}") from exc


def _real_interval(tok: str) -> Interval:
    v = _exact(tok)
    return Interval(v)


def parse_number(text: str) -> CInterval:
    """Parse ``3``, ``-1/2``, ``0.05``, ``2i``, ``-i/3`` or ``1/3+4i/3`` exactly.

    The result is the tightest complex rectangle enclosing the value.
    """
    s = text.replace(" ", "")
    if not s:
        raise ConfigError("empty number")
    m = re.fullmatch(rf"([+-]?(?:{_NUM}))?(?:([+-])((?:{_NUM})?)i((?:/[0-9]+)?))?", s)
    if m is None or (m.group(1) is None and m.group(2) is None):
        m2 = re.fullmatch(rf"([+-]?)((?:{_NUM})?)i((?:/[0-9]+)?)", s)
        if m2 is None:
            raise ConfigError(f"malformed number {text!r}")
        sign, mag, den = m2.groups()
        im = _imag_part(sign, mag, den)
        return CInterval(Interval(0.0), im)
    re_part = _real_interval(m.group(1)) if m.group(1) else Interval(0.0)
    if m.group(2) is None:
        return CInterval(re_part, Interval(0.0))
    return CInterval(re_part, _imag_part(m.group(2), m.group(3), m.group(4)))


def _imag_part(sign, mag, den) -> Interval:
    v = _exact(mag) if mag else Fraction(1)
    if den:
        v = Fraction(v) / int(den[1:])
    if sign == "-":
        v = -v
    return Interval(v)


def _number_list(text: str) -> list:
    return [parse_number(t) for t in text.split(",") if t.strip()]


@dataclass(frozen=True)
class NonlinearTerm:
    """``coef * P(d/dx) (u^power)`` with ``P`` given by derivative coefficients."""

    coef: CInterval
    power: int
    dpoly: tuple = (CInterval(Interval(1.0)),)

    def __post_init__(self):
        object.__setattr__(self, "coef", _as_cscalar(self.coef))
        object.__setattr__(self, "dpoly", tuple(_as_cscalar(c) for c in self.dpoly))
        if self.power < 2:
            raise ConfigError("nonlinear terms must have power >= 2 (N(0) = 0 and DN(0) = 0)")

    @classmethod
    def derivative(cls, coef, power: int, order: int) -> "NonlinearTerm":
        return cls(coef, power, tuple([0] * order + [1]))

    def symbol(self) -> Symbol:
        """Fourier symbol of ``P(d/dx)``: sum_d p_d (i k)^d."""
        out = Symbol.const(0)
        for d, c in enumerate(self.dpoly):
            if c != CInterval(0.0):
                out = out + Symbol.dx(d) * c if d else out + Symbol.const(c)
        return out

    def describe(self) -> str:
        poly = ",".join(_ctext(c) for c in self.dpoly)
        return f"coef={_ctext(self.coef)} power={self.power} dpoly={poly}"


def _ctext(c: CInterval) -> str:
    def one(iv):
        return iv.to_decimal() if iv.lo != iv.hi else repr(iv.lo)
    if c.im == Interval(0.0):
        return one(c.re)
    return f"({one(c.re)})+({one(c.im)})i"


@dataclass(frozen=True)
class ProblemSpec:
    """A semilinear PDE ``u_t = L u + N(u)`` with diagonal ``L`` and its discretization.

    ``linear`` is the Fourier symbol ``l(k)`` of ``L``; ``terms`` make up
    ``N``. ``weights`` and ``box`` list the x, theta and s axes in that order
    (only the ones a problem kind uses are read).
    """

    linear: Symbol
    terms: tuple
    symmetry: str = "odd"
    weights: tuple = (Weight(),)
    box: tuple = (24,)
    lambda_reg: Interval = Interval(0.0)
    alpha_ks: Interval | None = None
    linear_note: str = ""
    decay_rate: float | None = None
    taylor_param: Interval | None = None

    def __post_init__(self):
        if self.symmetry not in ("odd", "even", "none"):
            raise ConfigError("symmetry must be odd, even or none")
        if not self.linear.is_k_only():
            raise ConfigError("the linear symbol depends on k only")
        if not self.terms:
            pass
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "box", tuple(int(b) for b in self.box))
        if any(b < 0 for b in self.box):
            raise ConfigError("boxes must be nonnegative")

    @property
    def parity(self) -> int:
        return {"odd": -1, "even": 1, "none": 0}[self.symmetry]

    def axis(self, i: int, default_box: int = 8):
        w = self.weights[i] if i < len(self.weights) else Weight()
        b = self.box[i] if i < len(self.box) else default_box
        return w, b

    def space(self, kind: str) -> SeqSpace:
        """Sequence space of the primary unknown of a problem kind."""
        wx, nx = self.axis(0)
        kind = kind.replace("-", "_")
        if kind in ("equilibrium", "eigenpair", "jets"):
            return SeqSpace(("fourier",), (nx,), (wx,), parity=self.parity, real=True)
        if kind == "wave":
            if self.symmetry != "none":
                raise SymmetryError("traveling waves need symmetry = none (odd or even classes exclude them)")
            return SeqSpace(("fourier",), (nx,), (wx,), parity=0, real=True)
        if kind == "orbit":
            wt, nt = self.axis(1)
            return SeqSpace(("fourier", "fourier"), (nx, nt), (wx, wt), parity=self.parity, real=True)
        if kind == "manifold_fp":
            ws, ns = self.axis(1)
            return SeqSpace(("fourier", "taylor"), (nx, ns), (wx, ws), parity=self.parity, real=True)
        if kind == "manifold_po":
            wt, nt = self.axis(1)
            ws, ns = self.axis(2)
            return SeqSpace(("fourier", "fourier", "taylor"), (nx, nt, ns), (wx, wt, ws), parity=self.parity,
                            real=True)
        raise ConfigError(f"unknown problem kind {kind!r}")

    def nonlinear_symbols(self):
        return [(t.coef, t.power, t.symbol()) for t in self.terms]

    def with_box(self, box) -> "ProblemSpec":
        return _replace(self, box=tuple(box))

    def with_weights(self, weights) -> "ProblemSpec":
        return _replace(self, weights=tuple(weights))

    def header(self) -> dict:
        """Descriptive certificate header lines."""
        h = {
            "linear": _linear_text(self.linear),
            "nonlinearity": "; ".join(t.describe() for t in self.terms) or "none",
            "symmetry": self.symmetry,
            "weights": " ".join(f"{w.mu1!r},{w.mu2!r}" for w in self.weights),
            "box": ",".join(str(b) for b in self.box),
            "lambda_reg": self.lambda_reg.to_decimal(),
            "pairing": "bilinear sum a_n b_-n with orthonormal modes e^{i n x}",
        }
        if self.alpha_ks is not None:
            h["alpha_ks"] = self.alpha_ks.to_decimal()
        if self.linear_note:
            h["linear_form"] = self.linear_note
        if self.taylor_param is not None:
            h["taylor_param"] = self.taylor_param.to_decimal()
        return h

    def digest_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in sorted(self.header().items()))


def _replace(spec, **kw):
    from dataclasses import replace
    return replace(spec, **kw)


def _linear_text(sym: Symbol) -> str:
    return " + ".join(f"({_ctext(c)})k^{i}" for i, c in enumerate(sym.kpoly) if c != CInterval(0.0)) or "0"


def ks_linear(alpha) -> Symbol:
    """Dissipative Kuramoto-Sivashinsky symbol ``l(k) = -k^4 + alpha k^2``."""
    a = alpha if isinstance(alpha, Interval) else Interval(_exact(str(alpha)) if isinstance(alpha, str) else alpha)
    return Symbol([0, 0, a, 0, -1])


KS_NOTE = ("l(k) = -k^4 + alpha_ks k^2 (dissipative sign convention; "
           "the alternative L = alpha d^4 + d^2 reading is not used)")


def ks_spec(alpha=2, box=(24,), weights=(Weight(2.0, 0.05),), symmetry="odd", lambda_reg=0) -> ProblemSpec:
    """Kuramoto-Sivashinsky ``u_t = -u_xxxx - alpha u_xx ... `` in Fourier form, N = 1/2 (u^2)_x."""
    a = alpha if isinstance(alpha, Interval) else Interval(_exact(str(alpha)))
    return ProblemSpec(
        linear=ks_linear(a),
        terms=(NonlinearTerm.derivative(CInterval(Interval(Fraction(1, 2))), 2, 1),),
        symmetry=symmetry,
        weights=tuple(weights),
        box=tuple(box),
        lambda_reg=lambda_reg if isinstance(lambda_reg, Interval) else Interval(_exact(str(lambda_reg))),
        alpha_ks=a,
        linear_note=KS_NOTE,
    )


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Everything read from a configuration file."""

    kind: str
    spec: ProblemSpec
    seed: dict = field(default_factory=dict)          # multi-index tuple -> complex
    seed_scalars: dict = field(default_factory=dict)  # name -> complex
    seed_file: str | None = None
    solver: dict = field(default_factory=dict)
    proof: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    source: str = ""

    def digest(self) -> str:
        return hashlib.sha256(self.source.encode()).hexdigest()[:16]


_TERM_KEYS = {"coef", "power", "deriv", "dpoly"}


def _parse_term(text: str) -> NonlinearTerm:
    parts = re.findall(r"(\w+)\s*=\s*([^=]+?)(?=\s+\w+\s*=|$)", text.strip())
    kv = {k: v.strip() for k, v in parts}
    if not kv or set(kv) - _TERM_KEYS:
        raise ConfigError(f"malformed nonlinear term {text!r}")
    try:
        power = int(kv["power"])
    except (KeyError, ValueError) as exc:
        raise ConfigError("nonlinear term needs an integer power") from exc
    coef = parse_number(kv.get("coef", "1"))
    if "dpoly" in kv and "deriv" in kv:
        raise ConfigError("give either deriv or dpoly, not both")
    if "dpoly" in kv:
        return NonlinearTerm(coef, power, tuple(_number_list(kv["dpoly"])))
    try:
        order = int(kv.get("deriv", "0"))
    except ValueError as exc:
        raise ConfigError("deriv must be an integer") from exc
    return NonlinearTerm.derivative(coef, power, order)


def _parse_weights(text: str) -> list:
    vals = [float(_exact(t)) for t in text.replace(";", ",").split(",") if t.strip()]
    if len(vals) % 2:
        raise ConfigError("weights come in (mu1, mu2) pairs")
    try:
        return [Weight(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_box(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"malformed box {text!r}") from exc


def _parse_seed(section) -> tuple:
    coeffs, scalars, path = {}, {}, None
    for key, val in section.items():
        key = key.strip()
        if key == "file":
            path = val.strip()
            continue
        m = re.fullmatch(r"(sin|cos|exp)\s+(-?\d+(?:\s*,\s*-?\d+)*)", key)
        if m is None:
            if re.fullmatch(r"[a-z_]+", key):
                scalars[key] = parse_number(val).mid()
                continue
            raise ConfigError(f"malformed seed entry {key!r}")
        kind = m.group(1)
        idx = tuple(int(t) for t in m.group(2).split(","))
        a = parse_number(val).mid()
        neg = tuple(-i for i in idx)
        if kind == "exp":
            coeffs[idx] = coeffs.get(idx, 0) + a
        elif kind == "cos":
            if all(i == 0 for i in idx):
                coeffs[idx] = coeffs.get(idx, 0) + a
            else:
                coeffs[idx] = coeffs.get(idx, 0) + a / 2
                coeffs[neg] = coeffs.get(neg, 0) + a / 2
        else:
            coeffs[idx] = coeffs.get(idx, 0) - 0.5j * a
            coeffs[neg] = coeffs.get(neg, 0) + 0.5j * a
    return coeffs, scalars, path


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse configuration text; ``overrides`` maps alpha/weights/box/kind to flag values."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    overrides = dict(overrides or {})
    if not cp.has_section("problem"):
        raise ConfigError("missing [problem] section")
    prob = cp["problem"]
    known = {"kind", "alpha", "linear", "symmetry", "lambda_reg", "decay_rate", "taylor_param"}
    unknown = set(prob) - known
    if unknown:
        raise ConfigError(f"unknown [problem] keys: {sorted(unknown)}")
    kind = (overrides.get("kind") or prob.get("kind", "equilibrium")).replace("-", "_")
    if kind not in KINDS:
        raise ConfigError(f"unknown problem kind {kind!r}")
    alpha_txt = overrides.get("alpha") or prob.get("alpha")
    alpha = _real_interval(alpha_txt) if alpha_txt is not None else None
    lin_txt = prob.get("linear", "ks").strip()
    note = ""
    if lin_txt == "ks":
        if alpha is None:
            raise ConfigError("linear = ks needs alpha")
        linear = ks_linear(alpha)
        note = KS_NOTE
    else:
        linear = Symbol(_number_list(lin_txt))
    terms = []
    if cp.has_section("nonlinearity"):
        for key in sorted(cp["nonlinearity"]):
            terms.append(_parse_term(cp["nonlinearity"][key]))
    elif lin_txt == "ks":
        terms.append(NonlinearTerm.derivative(CInterval(Interval(Fraction(1, 2))), 2, 1))
    sp = cp["space"] if cp.has_section("space") else {}
    weights = _parse_weights(overrides.get("weights") or sp.get("weights", "0, 0"))
    box = _parse_box(overrides.get("box") or sp.get("box", "24"))
    for key, idx in (("theta_weights", 1), ("taylor_weights", None)):
        if key in sp:
            w = _parse_weights(sp[key])[0]
            pos = idx if idx is not None else (2 if kind == "manifold_po" else 1)
            while len(weights) <= pos:
                weights.append(Weight())
            weights[pos] = w
    decay = prob.get("decay_rate")
    tp = prob.get("taylor_param")
    try:
        spec = ProblemSpec(
            linear=linear,
            terms=tuple(terms),
            symmetry=prob.get("symmetry", "odd").strip(),
            weights=tuple(weights),
            box=box,
            lambda_reg=_real_interval(prob.get("lambda_reg", "0")),
            alpha_ks=alpha,
            linear_note=note,
            decay_rate=float(_exact(decay)) if decay else None,
            taylor_param=_real_interval(tp) if tp else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    seed, scalars, path = _parse_seed(cp["seed"]) if cp.has_section("seed") else ({}, {}, None)
    section = lambda name: dict(cp[name]) if cp.has_section(name) else {}  # noqa: E731
    return RunConfig(kind=kind, spec=spec, seed=seed, seed_scalars=scalars, seed_file=path,
                     solver=section("solver"), proof=section("proof"),
                     extra={name: dict(cp[name]) for name in cp.sections()
                            if name not in ("problem", "nonlinearity", "space", "seed", "solver", "proof")},
                     source=text + "\n#overrides " + repr(sorted(overrides.items())))


def load_config(path: str, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    cfg = parse_config(text, overrides)
    if cfg.seed_file and not os.path.isabs(cfg.seed_file):
        cfg.seed_file = os.path.join(os.path.dirname(os.path.abspath(path)), cfg.seed_file)
    return cfg


def seed_array(space: SeqSpace, coeffs: dict) -> np.ndarray:
    """Full-box complex array from a dict of multi-index coefficients (outside entries dropped)."""
    a = np.zeros(space.shape, dtype=complex)
    for idx, v in coeffs.items():
        idx = tuple(idx) + (0,) * (space.dims - len(idx))
        f = space.flat_of(np.array([idx]))[0]
        if f >= 0:
            a.reshape(-1)[f] += v
    return a
