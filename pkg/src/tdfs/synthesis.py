"""Time-dependent DFS frame, coherent control synthesis and theorem checks.

The one-dimensional decoherence-free subspace at time ``t`` is spanned by the
eigenvector of ``L(t)`` with eigenvalue ``+sqrt(sinh r cosh r)``.  In the
gauge used throughout::

    phi      = ( cos(a) e^{-i theta/2},  sin(a) )
    phi_perp = ( sin(a) e^{-i theta/2}, -cos(a) )

with ``cos(a)^2 = (1 + e^{-2r})/2``, so ``phi -> |0>`` as ``r -> 0``.

The control Hamiltonian family is ``H = Omega |0><1| + conj(Omega) |1><0|``.
Keeping the state in the subspace requires ``<phi_perp| H_eff |phi> = 0``,
which is one complex equation that is real-linear in ``Omega``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .qcore import IDENTITY, PureState, TdfsError, ket
from .reservoir import SqueezeSchedule, eigenvalue, lindblad_matrices

EIGEN_TOL = 1e-10
ORTHO_TOL = 1e-10
UNITARY_TOL = 1e-10
INVARIANCE_TOL = 1e-9
CLOSED_FORM_TOL = 1e-9
FD_STEP = 1e-6


class DegenerateLindbladOperator(TdfsError, ValueError):
    """L(t) is nilpotent (r <= 0) and has no eigenbasis."""


class SingularControlSystem(TdfsError, ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# frame


@dataclass(frozen=True)
class FrameArrays:
    """Frame quantities sampled on a time grid (leading axis = time)."""

    t: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    phi: np.ndarray
    phi_perp: np.ndarray
    dphi: np.ndarray
    dphi_perp: np.ndarray
    gamma: float

    @property
    def V(self) -> np.ndarray:
        """Unitary with columns ``(phi, phi_perp)``."""
        return np.stack([self.phi, self.phi_perp], axis=-1)

    @property
    def dV(self) -> np.ndarray:
        return np.stack([self.dphi, self.dphi_perp], axis=-1)

    @property
    def L(self) -> np.ndarray:
        return lindblad_matrices(self.r, self.theta)


def _basis(r, theta):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DegenerateLindbladOperator("squeeze parameter must be positive for a DFS frame")
    e2 = np.exp(-2 * r)
    cos_a = np.sqrt(0.5 * (1 + e2))
    sin_a = np.sqrt(-0.5 * np.expm1(-2 * r))
    ph = np.exp(-0.5j * np.asarray(theta, dtype=float))
    phi = np.stack([cos_a * ph, sin_a + 0j], axis=-1)
    perp = np.stack([sin_a * ph, -cos_a + 0j], axis=-1)
    return phi, perp, cos_a, sin_a, ph


def _fd_derivative(fn: Callable[[np.ndarray], np.ndarray], t: np.ndarray, h: float):
    """Central difference with one Richardson step; one-sided near ``t = 0``."""
    def central(step):
        return (fn(t + step) - fn(t - step)) / (2 * step)

    def forward(step):
        return (-3 * fn(t) + 4 * fn(t + step) - fn(t + 2 * step)) / (2 * step)

    near_zero = t - h < 0
    d = np.empty_like(fn(t))
    if np.any(~near_zero):
        d_c = (4 * central(h / 2) - central(h)) / 3
        d[~near_zero] = d_c[~near_zero]
    if np.any(near_zero):
        d_f = (4 * forward(h / 2) - forward(h)) / 3
        d[near_zero] = d_f[near_zero]
    return d


def frame_arrays(schedule, t) -> FrameArrays:
    """Vectorised frame on the times ``t`` (scalar or 1-D)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    r, theta = schedule.r(t), schedule.theta(t)
    phi, perp, cos_a, sin_a, ph = _basis(r, theta)
    if getattr(schedule, "analytic", False):
        r_dot, th_dot = schedule.r_rate(t), schedule.theta_rate(t)
        # da/dr = e^{-r} / (2 sqrt(sinh r cosh r))
        a_dot = r_dot * np.exp(-r) / (2 * eigenvalue(r))
        dphi = np.stack([(-sin_a * a_dot - 0.5j * th_dot * cos_a) * ph, cos_a * a_dot + 0j], axis=-1)
        dperp = np.stack([(cos_a * a_dot - 0.5j * th_dot * sin_a) * ph, sin_a * a_dot + 0j], axis=-1)
    else:
        h = FD_STEP / max(abs(getattr(schedule, "mu", 1.0)), 1e-12)

        def vecs(tt):
            p, q, *_ = _basis(schedule.r(tt), schedule.theta(tt))
            return np.concatenate([p, q], axis=-1)

        d = _fd_derivative(vecs, t, h)
        dphi, dperp = d[..., :2], d[..., 2:]
    return FrameArrays(t=t, r=np.asarray(r, float), theta=np.asarray(theta, float),
                       c=eigenvalue(r), phi=phi, phi_perp=perp, dphi=dphi,
                       dphi_perp=dperp, gamma=schedule.gamma)


@dataclass(frozen=True)
class DfsFrame:
    t: float
    r: float
    theta: float
    phi: PureState
    phi_perp: PureState
    c: complex
    dphi: np.ndarray
    dphi_perp: np.ndarray
    L: np.ndarray

    def eigen_residual(self) -> float:
        v = self.phi.amplitudes
        return float(np.linalg.norm(self.L @ v - self.c * v))

    def orthonormality_residual(self) -> float:
        V = np.column_stack([self.phi.amplitudes, self.phi_perp.amplitudes])
        return float(np.max(np.abs(V.conj().T @ V - IDENTITY)))


def _frame_at(fa: FrameArrays, i: int) -> DfsFrame:
    return DfsFrame(t=float(fa.t[i]), r=float(fa.r[i]), theta=float(fa.theta[i]),
                    phi=PureState(fa.phi[i]), phi_perp=PureState(fa.phi_perp[i]),
                    c=complex(fa.c[i]), dphi=fa.dphi[i], dphi_perp=fa.dphi_perp[i],
                    L=fa.L[i])


def dfs_frame(schedule, t: float) -> DfsFrame:
    return _frame_at(frame_arrays(schedule, t), 0)


def frame_grid(schedule, t_grid) -> list[DfsFrame]:
    """Frames on an ordered grid with a sequential gauge-continuity pass.

    Any frame whose overlap with its predecessor has negative real part is
    re-phased by -1 (the only gauge ambiguity left after fixing moduli).
    """
    fa = frame_arrays(schedule, t_grid)
    frames = [_frame_at(fa, i) for i in range(len(fa.t))]
    for i in range(1, len(frames)):
        prev, cur = frames[i - 1], frames[i]
        if np.vdot(prev.phi.amplitudes, cur.phi.amplitudes).real < 0:
            frames[i] = DfsFrame(cur.t, cur.r, cur.theta, PureState(-cur.phi.amplitudes),
                                 cur.phi_perp, cur.c, -cur.dphi, cur.dphi_perp, cur.L)
    return frames


def gauge_overlaps(frames: list[DfsFrame]) -> np.ndarray:
    """<phi(t_k)|phi(t_{k+1})> for consecutive frames."""
    return np.array([np.vdot(a.phi.amplitudes, b.phi.amplitudes)
                     for a, b in zip(frames[:-1], frames[1:])])


def connection_unitary(schedule, t) -> tuple[np.ndarray, np.ndarray]:
    """``U(t) = |phi(0)><phi(t)| + |perp(0)><perp(t)|`` and its time derivative."""
    f0 = frame_arrays(schedule, 0.0)
    ft = frame_arrays(schedule, t)
    V0 = f0.V[0]
    U = V0 @ np.conj(np.swapaxes(ft.V, -1, -2))
    dU = V0 @ np.conj(np.swapaxes(ft.dV, -1, -2))
    return U, dU


# ---------------------------------------------------------------------------
# control fields


def _omega_coeffs(fa: FrameArrays):
    """Coefficients of ``Omega a + conj(Omega) b = target`` at each grid point."""
    phi, perp = fa.phi, fa.phi_perp
    a = np.conj(perp[..., 0]) * phi[..., 1]
    b = np.conj(perp[..., 1]) * phi[..., 0]
    L = fa.L
    Ld_phi = np.einsum("...ji,...j->...i", np.conj(L), phi)
    # <perp|H|phi> = i <perp|dphi> + (i gamma c / 2) <perp|L^+|phi>
    target = (1j * np.einsum("...i,...i->...", np.conj(perp), fa.dphi)
              + 0.5j * fa.gamma * fa.c * np.einsum("...i,...i->...", np.conj(perp), Ld_phi))
    return a, b, target


def synthesize_exact(schedule, t) -> complex | np.ndarray:
    """Control amplitude that keeps the DFS invariant under ``H_eff``.

    Solves the real 2x2 system for ``(Re Omega, Im Omega)`` at each time.
    """
    scalar = np.ndim(t) == 0
    fa = frame_arrays(schedule, t)
    a, b, target = _omega_coeffs(fa)
    # Omega = x + i y  ->  x (a + b) + y i (a - b) = target
    p, q = a + b, 1j * (a - b)
    det = p.real * q.imag - q.real * p.imag
    if np.any(~np.isfinite(det)) or np.any(det == 0):
        raise SingularControlSystem("control equation is singular")
    x = (target.real * q.imag - q.real * target.imag) / det
    y = (p.real * target.imag - target.real * p.imag) / det
    om = x + 1j * y
    return complex(om[0]) if scalar else om


def closed_form_field(schedule: SqueezeSchedule, t) -> complex | np.ndarray:
    """Literal closed-form control field (real part ``-cos f1 - sin f2``)."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    mu, nu, g = schedule.mu, schedule.nu, schedule.gamma
    r = schedule.r(t)
    sc = eigenvalue(r)
    f1 = nu * np.exp(-r) * sc / 2
    f2 = np.exp(-r) * (mu / sc + g * sc) / 2
    om = _rotate(nu * t, f1, f2)
    return complex(om) if scalar else om


def _rotate(nt, f1, f2):
    return (-np.cos(nt) * f1 - np.sin(nt) * f2) + 1j * (np.sin(nt) * f1 - np.cos(nt) * f2)


def regularized_field(schedule: SqueezeSchedule, t, epsilon: float) -> complex | np.ndarray:
    """Closed-form field with ``sinh(r + eps)`` in the singular denominator.

    ``f2 = e^{-r} (mu + gamma sinh r cosh r) / (2 sqrt(sinh(r + eps) cosh r))``,
    which equals the exact ``f2`` at ``eps = 0`` and tends to
    ``gamma e^{-eps/2} / 4`` at long times.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    mu, nu, g = schedule.mu, schedule.nu, schedule.gamma
    r = schedule.r(t)
    f1 = nu * np.exp(-r) * eigenvalue(r) / 2
    f2 = (np.exp(-r) * (mu + g * np.sinh(r) * np.cosh(r))
          / (2 * np.sqrt(np.sinh(r + epsilon) * np.cosh(r))))
    om = _rotate(nu * t, f1, f2)
    return complex(om) if scalar else om


def adjustment_factor(mu: float, t, epsilon0: float, Gamma: float):
    """``sqrt(sinh(mu t) / sinh(mu t + eps0 e^{-Gamma t}))``, evaluated without overflow."""
    t = np.asarray(t, dtype=float)
    if epsilon0 == 0:
        return np.ones_like(t)
    a = mu * t
    delta = epsilon0 * np.exp(-Gamma * t)
    ratio = np.exp(-delta) * np.expm1(-2 * a) / np.expm1(-2 * (a + delta))
    return np.sqrt(ratio)


def decaying_field(schedule: SqueezeSchedule, t, epsilon0: float, Gamma: float):
    if epsilon0 < 0 or Gamma < 0:
        raise ValueError("epsilon0 and Gamma must be >= 0")
    if schedule.nu != 0:
        raise ValueError("the decaying adjustment is defined for nu = 0")
    return adjustment_factor(schedule.mu, t, epsilon0, Gamma) * synthesize_exact(schedule, t)


CONTROL_KINDS = ("none", "exact", "closed_form", "regularized", "decaying", "tabulated")


@dataclass(frozen=True)
class ControlLaw:
    """Tagged control-field family.

    ``phase`` multiplies every amplitude by ``e^{i phase}``; it exists so a
    deliberately corrupted law can be fed to the verification suite.
    """

    kind: str = "exact"
    epsilon: float = 0.0
    epsilon0: float = 0.0
    Gamma: float = 0.0
    table: tuple | None = field(default=None, repr=False)
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in CONTROL_KINDS:
            raise ValueError(f"unknown control kind {self.kind!r}")
        for name in ("epsilon", "epsilon0", "Gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated control needs a table")
            ts = np.asarray(self.table[0], dtype=float)
            if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
                raise ValueError("table times must be strictly increasing")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def exact(cls):
        return cls("exact")

    @classmethod
    def closed_form(cls):
        return cls("closed_form")

    @classmethod
    def regularized(cls, epsilon):
        return cls("regularized", epsilon=epsilon)

    @classmethod
    def decaying(cls, epsilon0, Gamma):
        return cls("decaying", epsilon0=epsilon0, Gamma=Gamma)

    @classmethod
    def tabulated(cls, t, omega):
        return cls("tabulated", table=(tuple(np.asarray(t, float)), tuple(np.asarray(omega, complex))))

    def amplitude(self, schedule, t):
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if self.kind == "none":
            om = np.zeros_like(tt, dtype=complex)
        elif self.kind == "exact":
            om = synthesize_exact(schedule, tt)
        elif self.kind == "closed_form":
            om = closed_form_field(schedule, tt)
        elif self.kind == "regularized":
            om = regularized_field(schedule, tt, self.epsilon)
        elif self.kind == "decaying":
            om = decaying_field(schedule, tt, self.epsilon0, self.Gamma)
        else:
            ts = np.asarray(self.table[0], dtype=float)
            vs = np.asarray(self.table[1], dtype=complex)
            om = np.interp(tt, ts, vs.real) + 1j * np.interp(tt, ts, vs.imag)
        if self.phase:
            om = om * np.exp(1j * self.phase)
        return complex(om[0]) if scalar else om


def control_hamiltonians(omega) -> np.ndarray:
    """``Omega |0><1| + h.c.`` for an array of amplitudes."""
    om = np.asarray(omega, dtype=complex)
    H = np.zeros(om.shape + (2, 2), dtype=complex)
    H[..., 0, 1] = om
    H[..., 1, 0] = np.conj(om)
    return H


# ---------------------------------------------------------------------------
# theorem conditions


def effective_hamiltonian(schedule, t: float, control: ControlLaw) -> np.ndarray:
    """``G + H + (i gamma / 2)(c* L - c L^+)`` with ``G = i U^+ dU/dt``."""
    U, dU = connection_unitary(schedule, t)
    G = 1j * U[0].conj().T @ dU[0]
    fa = frame_arrays(schedule, t)
    L = fa.L[0]
    c = fa.c[0]
    H = control_hamiltonians(control.amplitude(schedule, float(t)))
    return G + H + 0.5j * schedule.gamma * (np.conj(c) * L - c * L.conj().T)


def invariance_residual(schedule, t, control: ControlLaw) -> np.ndarray:
    """``|<phi_perp| H_eff |phi>|`` on a grid (vectorised)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    fa = frame_arrays(schedule, t)
    V0 = frame_arrays(schedule, 0.0).V[0]
    U = V0 @ np.conj(np.swapaxes(fa.V, -1, -2))
    dU = V0 @ np.conj(np.swapaxes(fa.dV, -1, -2))
    G = 1j * np.conj(np.swapaxes(U, -1, -2)) @ dU
    L = fa.L
    Ld = np.conj(np.swapaxes(L, -1, -2))
    c = fa.c[:, None, None]
    H = control_hamiltonians(control.amplitude(schedule, t))
    Heff = G + H + 0.5j * fa.gamma * (np.conj(c) * L - c * Ld)
    val = np.einsum("ti,tij,tj->t", np.conj(fa.phi_perp), Heff, fa.phi)
    return np.abs(val)


@dataclass
class VerificationReport:
    t: np.ndarray
    eigen_residual: np.ndarray
    orthonormality_residual: np.ndarray
    unitarity_residual: np.ndarray
    invariance_residual: np.ndarray
    closed_form_deviation: np.ndarray
    gauge_phase: np.ndarray
    tolerances: dict

    def checks(self) -> dict[str, tuple[float, float, bool]]:
        """Gated checks as ``name -> (worst value, tolerance, passed)``."""
        out = {}
        for name in ("eigen_residual", "orthonormality_residual", "unitarity_residual",
                     "invariance_residual"):
            worst = float(np.max(getattr(self, name)))
            tol = self.tolerances[name]
            out[name] = (worst, tol, bool(worst <= tol))
        return out

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks().values())


def theorem_report(schedule, control: ControlLaw, t_grid, tolerances: dict | None = None
                   ) -> VerificationReport:
    tol = {"eigen_residual": EIGEN_TOL, "orthonormality_residual": ORTHO_TOL,
           "unitarity_residual": UNITARY_TOL, "invariance_residual": INVARIANCE_TOL}
    tol.update(tolerances or {})
    t = np.asarray(t_grid, dtype=float)
    fa = frame_arrays(schedule, t)
    L = fa.L
    eig = np.linalg.norm(np.einsum("tij,tj->ti", L, fa.phi) - fa.c[:, None] * fa.phi, axis=-1)
    V = fa.V
    gram = np.conj(np.swapaxes(V, -1, -2)) @ V
    ortho = np.max(np.abs(gram - IDENTITY), axis=(-1, -2))
    V0 = frame_arrays(schedule, 0.0).V[0]
    U = V0 @ np.conj(np.swapaxes(V, -1, -2))
    unit = np.max(np.abs(np.conj(np.swapaxes(U, -1, -2)) @ U - IDENTITY), axis=(-1, -2))
    inv = invariance_residual(schedule, t, control)
    if isinstance(schedule, SqueezeSchedule):
        cf = np.abs(np.abs(synthesize_exact(schedule, t)) - np.abs(closed_form_field(schedule, t)))
    else:
        cf = np.full_like(t, np.nan)
    ov = np.einsum("ti,ti->t", np.conj(fa.phi[:-1]), fa.phi[1:])
    return VerificationReport(t=t, eigen_residual=eig, orthonormality_residual=ortho,
                              unitarity_residual=unit, invariance_residual=inv,
                              closed_form_deviation=cf, gauge_phase=np.angle(ov), tolerances=tol)


def initial_frame_state(schedule) -> np.ndarray:
    return frame_arrays(schedule, 0.0).phi[0]


def approx_initial_state(o: float) -> np.ndarray:
    return np.sqrt(1 - o**2) * ket(0) + o * ket(1)
