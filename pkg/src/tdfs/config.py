"""Line-oriented ``key = value`` run configuration.

Values are numbers, simple arithmetic in ``pi`` (``nu = 2*pi/3``) or bare
words for the selector keys.  ``#`` starts a comment.  Unknown keys,
unparseable values and bound violations raise :class:`ConfigError` carrying
the offending line number.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .evolve import IntegratorConfig, initial_state
from .qcore import TdfsError
from .reservoir import SqueezeSchedule
from .synthesis import CONTROL_KINDS, ControlLaw


class ConfigError(TdfsError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class RunConfig:
    mu: float = 1.0
    nu: float = 2 * math.pi / 3
    o: float = 1e-3
    control: str = "exact"
    epsilon: float = 0.0
    epsilon0: float = 0.0
    gamma_big: float = 0.0
    control_phase: float = 0.0
    control_table: str = ""
    dt: float = 1e-3
    t_max: float = 5.0
    record_stride: int = 1
    method: str = "magnus4"
    picture: str = "auto"
    initial_state: str = "frame"
    rho00: float = 1.0
    re_rho01: float = 0.0
    im_rho01: float = 0.0
    output: str = ""

    def schedule(self) -> SqueezeSchedule:
        return SqueezeSchedule(mu=self.mu, nu=self.nu, o=self.o)

    def control_law(self, base_dir: Path | None = None) -> ControlLaw:
        if self.control == "tabulated":
            from .io import read_control_table

            path = Path(self.control_table)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            t, om = read_control_table(path)
            return replace(ControlLaw.tabulated(t, om), phase=self.control_phase)
        return ControlLaw(self.control, epsilon=self.epsilon, epsilon0=self.epsilon0,
                          Gamma=self.gamma_big, phase=self.control_phase)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(dt=self.dt, t_max=self.t_max, record_stride=self.record_stride,
                                method=self.method, picture=self.picture)

    def initial_rho(self) -> np.ndarray:
        rho = None
        if self.initial_state == "explicit":
            off = complex(self.re_rho01, self.im_rho01)
            rho = np.array([[self.rho00, off], [off.conjugate(), 1 - self.rho00]])
        return initial_state(self.schedule(), self.initial_state, rho)


_CHOICES = {
    "control": CONTROL_KINDS,
    "method": ("magnus4", "rk4"),
    "picture": ("auto", "frame", "lab"),
    "initial_state": ("frame", "paper_approx", "explicit"),
}
_STRINGS = {"control_table", "output"}
_NONNEG = {"epsilon", "epsilon0", "gamma_big", "mu"}
_POSITIVE = {"o", "dt", "t_max", "record_stride"}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_number(text: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    return ev(ast.parse(text, mode="eval"))


def parse_config(text: str) -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        lines[key] = lineno
        if key in _CHOICES:
            if value not in _CHOICES[key]:
                raise ConfigError(f"{key} must be one of {', '.join(_CHOICES[key])}", lineno)
            values[key] = value
        elif key in _STRINGS:
            values[key] = value
        else:
            try:
                num = _eval_number(value)
            except (ValueError, SyntaxError, ZeroDivisionError, OverflowError) as exc:
                raise ConfigError(f"cannot parse value for {key}: {value!r} ({exc})", lineno) from None
            if not math.isfinite(num):
                raise ConfigError(f"{key} must be finite", lineno)
            if key == "record_stride":
                if num != int(num):
                    raise ConfigError("record_stride must be an integer", lineno)
                num = int(num)
            if key in _NONNEG and num < 0:
                raise ConfigError(f"{key} must be >= 0", lineno)
            if key in _POSITIVE and num <= 0:
                raise ConfigError(f"{key} must be > 0", lineno)
            values[key] = num
    cfg = RunConfig(**values)
    if cfg.control == "tabulated" and not cfg.control_table:
        raise ConfigError("control = tabulated requires control_table", lines.get("control"))
    if cfg.initial_state == "explicit":
        try:
            cfg.initial_rho()
        except ValueError as exc:
            raise ConfigError(f"explicit initial state is not a density matrix: {exc}",
                              lines.get("rho00")) from None
    if cfg.control == "decaying" and cfg.nu != 0:
        raise ConfigError("control = decaying requires nu = 0", lines.get("nu", lines.get("control")))
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def format_config(cfg: RunConfig) -> str:
    """Serialise to the same text format (round-trips through :func:`parse_config`)."""
    out = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        if f.name in _STRINGS and not v:
            continue
        out.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(out) + "\n"
