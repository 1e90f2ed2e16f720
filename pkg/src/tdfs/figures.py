"""Parameter sets behind the published figure datasets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .evolve import IntegratorConfig, Trajectory, initial_state, integrate
from .io import write_trajectory
from .reservoir import SqueezeSchedule
from .synthesis import ControlLaw

NU_DEFAULT = 2 * math.pi / 3
FIG5_EPSILONS = (1e-3, 1e-2, 1e-1)
FIG6_EPSILON0 = 1e-1
FIG6_GAMMA = 1e3


@dataclass(frozen=True)
class Curve:
    name: str
    schedule: SqueezeSchedule
    control: ControlLaw
    t_max: float


def curves(name: str) -> list[Curve]:
    driven = SqueezeSchedule(mu=1.0, nu=NU_DEFAULT)
    still = SqueezeSchedule(mu=1.0, nu=0.0)
    if name in ("fig2", "fig3", "fig4"):
        return [Curve("controlled", driven, ControlLaw.exact(), 5.0),
                Curve("uncontrolled", driven, ControlLaw.none(), 5.0)]
    if name == "fig5":
        return [Curve(f"eps_{eps:g}", still, ControlLaw.regularized(eps), 12.0)
                for eps in FIG5_EPSILONS]
    if name == "fig6":
        return [Curve("decaying", still, ControlLaw.decaying(FIG6_EPSILON0, FIG6_GAMMA), 5.0)]
    raise KeyError(name)


FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")


def run_figure(name: str, dt: float = 1e-3, stride: int = 10) -> dict[str, Trajectory]:
    out = {}
    for c in curves(name):
        cfg = IntegratorConfig(dt=dt, t_max=c.t_max, record_stride=stride)
        out[c.name] = integrate(initial_state(c.schedule), c.schedule, c.control, cfg)
    return out


def write_figure(name: str, out_dir, dt: float = 1e-3, stride: int = 10) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for curve, traj in run_figure(name, dt, stride).items():
        p = out_dir / f"{name}_{curve}.csv"
        write_trajectory(traj, p)
        paths.append(p)
    return paths
