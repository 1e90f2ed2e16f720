"""Invert the frame parameterisation to reach a target state.

Along the DFS the excited population is ``P1(r) = (1 - e^{-2r}) / 2`` and the
relative phase ``arg(<1|phi>/<0|phi>)`` is ``theta / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .synthesis import synthesize_exact


class UnreachableTarget(ValueError):
    pass


def excited_population(r):
    return -0.5 * np.expm1(-2 * np.asarray(r, dtype=float))


def squeeze_for_population(p1: float) -> float:
    if not 0 <= p1 < 0.5:
        raise UnreachableTarget(f"target population {p1!r} is outside [0, 1/2)")
    return -0.5 * math.log1p(-2 * p1)


@dataclass(frozen=True)
class Plan:
    target_p1: float
    target_phase: float
    r_star: float
    theta_star: float
    duration: float
    config: RunConfig

    @property
    def phase_reachable(self) -> bool:
        return self.duration > 0 or math.isclose(self.theta_star, 0.0, abs_tol=1e-15)

    def control_samples(self, n: int = 201) -> tuple[np.ndarray, np.ndarray]:
        if self.duration == 0:
            return np.zeros(1), np.array([synthesize_exact(self.config.schedule(), 0.0)])
        t = np.linspace(0.0, self.duration, n)
        return t, synthesize_exact(self.config.schedule(), t)


def wrap_phase(x: float) -> float:
    return (x + math.pi) % (2 * math.pi) - math.pi


def plan(target_p1: float, target_phase: float = 0.0, base: RunConfig | None = None) -> Plan:
    """Linear ramp reaching ``target_p1`` with relative phase ``target_phase`` at ``t = T``.

    ``T = (r* - o) / mu``; targets already below the starting population give
    ``T = 0`` and a frozen (``mu = 0``) single-step run that holds the start state.
    """
    base = base or RunConfig()
    if base.mu <= 0:
        raise ValueError("planning needs mu > 0")
    r_star = squeeze_for_population(target_p1)
    theta_star = 2 * wrap_phase(target_phase)
    T = max(0.0, (r_star - base.o) / base.mu)
    nu = theta_star / T if T > 0 else 0.0
    if T > 0:
        cfg = replace(base, nu=nu, control="exact", t_max=T)
    else:
        cfg = replace(base, mu=0.0, nu=0.0, control="exact", t_max=base.dt)
    return Plan(target_p1=target_p1, target_phase=target_phase, r_star=r_star,
                theta_star=theta_star, duration=T, config=cfg)
