"""Invariant suites run by ``tdfs verify``.

Each check yields a :class:`Check`; ``gated`` checks decide the exit code,
the others are reported for information only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .evolve import IntegratorConfig, asymptotic_purity, integrate, initial_state, sweep_gamma
from .reservoir import (DISSIPATOR_TOL, SqueezeSchedule, dissipator_expanded,
                        dissipator_lindblad, dissipator_printed, free_steady_state,
                        frozen_sample, lindblad_operator, superoperator)
from .synthesis import (CLOSED_FORM_TOL, ControlLaw, closed_form_field, synthesize_exact,
                        theorem_report)

PURITY_TOL = 1e-5
RICHARDSON_TOL = 1e-6
STATIONARY_TOL = 1e-10
ORDER_BAND = 0.15
SWEEP_GAMMAS = (1.0, 10.0, 100.0, 1000.0)
SWEEP_TOL = 1e-6
GRID_POINTS = 500
RANDOM_STATES = 1000


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool
    gated: bool = True

    @property
    def status(self) -> str:
        if not self.gated:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


def random_density_matrices(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random mixed states from Ginibre matrices."""
    g = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1)[:, None, None]


def theorem_checks(cfg: RunConfig, law: ControlLaw) -> list[Check]:
    sched = cfg.schedule()
    grid = np.linspace(0.0, cfg.t_max, GRID_POINTS)
    rep = theorem_report(sched, law, grid)
    out = []
    gate_invariance = law.kind in ("exact", "closed_form")
    for name, (worst, tol, ok) in rep.checks().items():
        gated = gate_invariance if name == "invariance_residual" else True
        out.append(Check("synthesis", name, worst, tol, ok, gated))
    delta = grid[1] - grid[0]
    bound = abs(sched.nu) * delta / 2 + 1e-12
    worst_phase = float(np.max(np.abs(rep.gauge_phase)))
    out.append(Check("synthesis", "gauge_phase_step", worst_phase, bound, worst_phase <= bound))
    return out


def dissipator_checks(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    rhos = random_density_matrices(rng, RANDOM_STATES)
    rs = rng.uniform(1e-6, 3.0, RANDOM_STATES)
    ths = rng.uniform(0.0, 2 * np.pi, RANDOM_STATES)
    eq = tr = herm = printed = 0.0
    for rho, r, th in zip(rhos, rs, ths):
        s = frozen_sample(r, th)
        d = dissipator_lindblad(rho, s)
        eq = max(eq, np.max(np.abs(dissipator_expanded(rho, s) - d)))
        tr = max(tr, abs(np.trace(d)))
        herm = max(herm, np.max(np.abs(d - d.conj().T)))
        printed = max(printed, np.max(np.abs(dissipator_printed(rho, s) - d)))
    return [
        Check("reservoir", "expanded_vs_lindblad", eq, DISSIPATOR_TOL, eq <= DISSIPATOR_TOL),
        Check("reservoir", "dissipator_trace", tr, DISSIPATOR_TOL, tr <= DISSIPATOR_TOL),
        Check("reservoir", "dissipator_hermiticity", herm, DISSIPATOR_TOL, herm <= DISSIPATOR_TOL),
        Check("reservoir", "printed_form_residual", printed, DISSIPATOR_TOL,
              printed <= DISSIPATOR_TOL, gated=False),
    ]


def steady_state_checks() -> list[Check]:
    worst = 0.0
    for r in (0.1, 0.5, 1.0, 2.0):
        s = frozen_sample(r)
        rho = free_steady_state(s)
        gen = superoperator(np.zeros((2, 2)), lindblad_operator(s), s.gamma)
        worst = max(worst, float(np.max(np.abs(gen @ rho.reshape(4)))))
    return [Check("reservoir", "free_steady_state_stationary", worst, STATIONARY_TOL,
                  worst <= STATIONARY_TOL)]


def closed_form_checks(cfg: RunConfig) -> list[Check]:
    # the exact solve loses ~e^{2r} relative digits, so stay on the run horizon
    grid = np.linspace(0.0, cfg.t_max, GRID_POINTS)
    flat = replace(cfg, nu=0.0).schedule()
    dev = float(np.max(np.abs(np.abs(synthesize_exact(flat, grid))
                              - np.abs(closed_form_field(flat, grid)))))
    out = [Check("synthesis", "closed_form_magnitude_nu0", dev, CLOSED_FORM_TOL,
                 dev <= CLOSED_FORM_TOL)]
    if cfg.nu != 0:
        sched = cfg.schedule()
        dev_nu = float(np.max(np.abs(np.abs(synthesize_exact(sched, grid))
                                     - np.abs(closed_form_field(sched, grid)))))
        out.append(Check("synthesis", "closed_form_magnitude_nu", dev_nu, CLOSED_FORM_TOL,
                         dev_nu <= CLOSED_FORM_TOL, gated=False))
    return out


def _richardson(rho0, sched, law, icfg: IntegratorConfig) -> float:
    coarse = integrate(rho0, sched, law, replace(icfg, record_stride=1))
    fine = integrate(rho0, sched, law, replace(icfg, dt=icfg.dt / 2, record_stride=2))
    return float(np.max(np.abs(coarse.rho - fine.rho))) * 16 / 15


def evolution_checks(cfg: RunConfig, law: ControlLaw) -> list[Check]:
    sched = cfg.schedule()
    icfg = replace(cfg.integrator(), record_stride=1)
    rho0 = cfg.initial_rho()
    out = []
    traj = integrate(rho0, sched, law, icfg)
    if law.kind in ("exact", "closed_form"):
        err = float(np.max(np.abs(1 - traj.purity)))
        out.append(Check("evolve", "purity_preserved", err, PURITY_TOL, err <= PURITY_TOL))
        ferr = float(np.max(1 - traj.fidelity))
        out.append(Check("evolve", "fidelity_to_frame", ferr, PURITY_TOL, ferr <= PURITY_TOL))
    rho_err = float(np.max(np.abs(traj.rho - np.conj(np.swapaxes(traj.rho, -1, -2)))))
    tr_err = float(np.max(np.abs(np.trace(traj.rho, axis1=1, axis2=2) - 1)))
    out.append(Check("evolve", "trace_hermiticity", max(rho_err, tr_err), 1e-6,
                     max(rho_err, tr_err) <= 1e-6))
    for label, l in (("config", law), ("uncontrolled", ControlLaw.none())):
        est = _richardson(rho0, sched, l, icfg)
        out.append(Check("evolve", f"richardson_error_{label}", est, RICHARDSON_TOL,
                         est <= RICHARDSON_TOL))
    return out


def convergence_ratio(method: str, sched: SqueezeSchedule | None = None,
                      dts=(0.01, 0.005, 0.0025), t_max: float = 2.0) -> float:
    """Error contraction under step halving for the uncontrolled lab-basis run."""
    sched = sched or SqueezeSchedule(nu=0.0)
    rho0 = initial_state(sched)
    law = ControlLaw.none()

    def final(dt):
        c = IntegratorConfig(dt=dt, t_max=t_max, record_stride=int(round(t_max / dt)),
                             method=method, picture="lab")
        return integrate(rho0, sched, law, c).rho[-1]

    ref = final(dts[-1] / 16)
    errs = [np.max(np.abs(final(dt) - ref)) for dt in dts]
    return float(errs[-2] / errs[-1])


def convergence_checks(cfg: RunConfig) -> list[Check]:
    sched = replace(cfg, nu=0.0).schedule()
    out = []
    for method in ("rk4", "magnus4"):
        ratio = convergence_ratio(method, sched)
        out.append(Check("evolve", f"order4_ratio_{method}", ratio, ORDER_BAND,
                         abs(ratio / 16 - 1) <= ORDER_BAND))
    return out


def sweep_checks(cfg: RunConfig) -> list[Check]:
    sched = SqueezeSchedule(mu=cfg.mu, nu=0.0, o=cfg.o)
    icfg = IntegratorConfig(dt=cfg.dt, t_max=12.0 / max(cfg.mu, 1e-12), record_stride=100)
    res = sweep_gamma(0.1, SWEEP_GAMMAS, sched, icfg)
    p = np.array(res.purity)
    worst_drop = float(max(0.0, np.max(p[:-1] - p[1:])))
    below = float(max(0.0, res.baseline_purity - SWEEP_TOL - p.min()))
    return [
        Check("evolve", "sweep_monotone_in_Gamma", worst_drop, 0.0, worst_drop <= 0.0),
        Check("evolve", "sweep_above_regularized", below, 0.0, below <= 0.0),
    ]


def asymptotic_checks(cfg: RunConfig) -> list[Check]:
    """Reported only: the long-time purity law and the decaying-field purity floor."""
    sched = SqueezeSchedule(mu=cfg.mu, nu=0.0, o=cfg.o)
    rho0 = initial_state(sched)
    out = []
    icfg = IntegratorConfig(dt=cfg.dt, t_max=12.0 / max(cfg.mu, 1e-12), record_stride=100)
    for eps in (1e-3, 1e-2, 1e-1):
        p = integrate(rho0, sched, ControlLaw.regularized(eps), icfg).purity[-1]
        dev = abs(p - asymptotic_purity(eps))
        out.append(Check("evolve", f"asymptotic_purity_eps_{eps:g}", dev, 1e-3, dev <= 1e-3,
                         gated=False))
    icfg = IntegratorConfig(dt=cfg.dt, t_max=5.0 / max(cfg.mu, 1e-12), record_stride=1)
    pmin = float(integrate(rho0, sched, ControlLaw.decaying(0.1, 1e3), icfg).purity.min())
    out.append(Check("evolve", "decaying_min_purity_shortfall", max(0.0, 0.9999 - pmin), 0.0,
                     pmin >= 0.9999, gated=False))
    return out


def run_suites(cfg: RunConfig, law: ControlLaw | None = None) -> list[Check]:
    law = law if law is not None else cfg.control_law()
    checks = []
    checks += theorem_checks(cfg, law)
    checks += dissipator_checks()
    checks += steady_state_checks()
    checks += closed_form_checks(cfg)
    checks += evolution_checks(cfg, law)
    checks += convergence_checks(cfg)
    checks += sweep_checks(cfg)
    checks += asymptotic_checks(cfg)
    return checks


def format_table(checks: list[Check]) -> str:
    lines = [f"{'suite':<10} {'check':<34} {'value':>12} {'tol':>10}  status"]
    for c in checks:
        val = "nan" if math.isnan(c.value) else f"{c.value:.3e}"
        lines.append(f"{c.suite:<10} {c.name:<34} {val:>12} {c.tolerance:>10.1e}  {c.status}")
    failed = [c for c in checks if c.gated and not c.passed]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} ok, {len(failed)} gated failure(s)")
    return "\n".join(lines)


def all_passed(checks: list[Check]) -> bool:
    return all(c.passed for c in checks if c.gated)

