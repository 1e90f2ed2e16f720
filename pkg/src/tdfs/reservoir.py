"""Engineered squeezed-vacuum reservoir: schedules, Lindblad operator, dissipators.

Rates are measured in units of the spontaneous decay rate ``gamma`` and
times in ``1/gamma``.  The single source of truth for the dynamics is the
Lindblad form ``gamma * (L rho L^+ - {L^+ L, rho}/2)`` with::

    L = cosh(r) e^{-i theta/2} sigma_- + sinh(r) e^{+i theta/2} sigma_+
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import null_space

from .qcore import IDENTITY, SIGMA_MINUS, SIGMA_PLUS, TdfsError

DISSIPATOR_TOL = 1e-12


class DegenerateSteadyState(TdfsError, ArithmeticError):
    pass


@dataclass(frozen=True)
class SqueezeSchedule:
    """Linear reservoir ramp ``r(t) = mu t + o``, ``theta(t) = nu t``.

    ``mu = 0`` is accepted and freezes the squeeze parameter at ``o``.
    """

    mu: float = 1.0
    nu: float = 2 * np.pi / 3
    o: float = 1e-3
    gamma: float = 1.0

    analytic = True

    def __post_init__(self):
        for name in ("mu", "nu", "o", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.o <= 0:
            raise ValueError("o must be > 0 so that r(t) > 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")

    def r(self, t):
        return self.mu * np.asarray(t, dtype=float) + self.o

    def theta(self, t):
        return self.nu * np.asarray(t, dtype=float)

    def r_rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.mu)

    def theta_rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.nu)


@dataclass(frozen=True)
class GenericSchedule:
    """Arbitrary smooth ramp given by callables; derivatives come from finite differences."""

    r_fn: Callable[[float], float]
    theta_fn: Callable[[float], float]
    gamma: float = 1.0
    mu: float = 1.0  # time scale used to size finite-difference steps

    analytic = False

    def r(self, t):
        return np.vectorize(self.r_fn, otypes=[float])(t)

    def theta(self, t):
        return np.vectorize(self.theta_fn, otypes=[float])(t)


@dataclass(frozen=True)
class ReservoirSample:
    t: float
    r: float
    theta: float
    c: float
    gamma: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"squeeze parameter must be positive, got r={self.r!r}")


def eigenvalue(r):
    """Positive eigenvalue ``sqrt(sinh r cosh r)`` of L."""
    return np.sqrt(np.sinh(r) * np.cosh(r))


def sample(schedule, t: float) -> ReservoirSample:
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t!r}")
    r = float(schedule.r(t))
    return ReservoirSample(t=float(t), r=r, theta=float(schedule.theta(t)),
                           c=float(eigenvalue(r)), gamma=schedule.gamma)


def frozen_sample(r: float, theta: float = 0.0, gamma: float = 1.0) -> ReservoirSample:
    return ReservoirSample(t=0.0, r=r, theta=theta, c=float(eigenvalue(r)), gamma=gamma)


def lindblad_matrices(r, theta) -> np.ndarray:
    """L for arrays of ``(r, theta)``; shape ``(..., 2, 2)``."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lo = (np.cosh(r) * np.exp(-0.5j * theta))[..., None, None]
    hi = (np.sinh(r) * np.exp(0.5j * theta))[..., None, None]
    return lo * SIGMA_MINUS + hi * SIGMA_PLUS


def lindblad_operator(s: ReservoirSample) -> np.ndarray:
    return lindblad_matrices(s.r, s.theta)


def dissipator_lindblad(rho, s: ReservoirSample) -> np.ndarray:
    L = lindblad_operator(s)
    rho = np.asarray(rho, dtype=complex)
    Ld = L.conj().T
    LdL = Ld @ L
    return s.gamma * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))


def _lindblad_term(a, b, rho):
    # a rho b - {b a, rho}/2, with b = a^+ for the sandwich terms used here
    ba = b @ a
    return a @ rho @ b - 0.5 * (ba @ rho + rho @ ba)


def dissipator_expanded(rho, s: ReservoirSample) -> np.ndarray:
    """Four-term squeezed-vacuum dissipator, algebraically identical to the Lindblad form."""
    rho = np.asarray(rho, dtype=complex)
    ch, sh = np.cosh(s.r), np.sinh(s.r)
    sm, sp = SIGMA_MINUS, SIGMA_PLUS
    out = ch**2 * _lindblad_term(sm, sp, rho)
    out = out + sh**2 * _lindblad_term(sp, sm, rho)
    out = out + sh * ch * np.exp(-1j * s.theta) * (sm @ rho @ sm)
    out = out + sh * ch * np.exp(1j * s.theta) * (sp @ rho @ sp)
    return s.gamma * out


def dissipator_printed(rho, s: ReservoirSample) -> np.ndarray:
    """Literal transcription of the printed four-term expression.

    Sandwich/anticommutator pairings are taken exactly as printed, so this is
    not trace preserving; it exists only so the verification report can
    quantify its distance from :func:`dissipator_lindblad`.
    """
    rho = np.asarray(rho, dtype=complex)
    ch, sh = np.cosh(s.r), np.sinh(s.r)
    sm, sp = SIGMA_MINUS, SIGMA_PLUS
    spsm, smsp = sp @ sm, sm @ sp
    out = ch**2 * (sp @ rho @ sm - 0.5 * (spsm @ rho + rho @ spsm))
    out = out + sh**2 * (sm @ rho @ sp - 0.5 * (smsp @ rho + rho @ smsp))
    out = out + sh * ch * np.exp(-1j * s.theta) * (sm @ rho @ sm)
    out = out + sh * ch * np.exp(1j * s.theta) * (sp @ rho @ sp)
    return s.gamma * out


def superoperator(H, L, gamma=1.0) -> np.ndarray:
    """Liouvillian acting on row-major ``vec(rho)``; broadcasts over leading axes.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)``.
    """
    H = np.asarray(H, dtype=complex)
    L = np.asarray(L, dtype=complex)
    Ld = np.conj(np.swapaxes(L, -1, -2))
    LdL = Ld @ L

    def kron(a, b):
        a, b = np.broadcast_arrays(a, b)
        return np.einsum("...ij,...kl->...ikjl", a, b).reshape(a.shape[:-2] + (4, 4))

    eye = IDENTITY
    gen = -1j * (kron(H, eye) - kron(eye, np.swapaxes(H, -1, -2)))
    gen = gen + gamma * (kron(L, np.conj(L))
                         - 0.5 * (kron(LdL, eye) + kron(eye, np.swapaxes(LdL, -1, -2))))
    return gen


def free_steady_state(s: ReservoirSample, rcond: float = 1e-12) -> np.ndarray:
    """Stationary state of the uncontrolled generator at frozen ``(r, theta)``."""
    gen = superoperator(np.zeros((2, 2)), lindblad_operator(s), s.gamma)
    # Scale out the large cosh^2 r rates so rcond stays meaningful.
    ns = null_space(gen / np.max(np.abs(gen)), rcond=rcond)
    if ns.shape[1] != 1:
        raise DegenerateSteadyState(f"null space has dimension {ns.shape[1]}")
    rho = ns[:, 0].reshape(2, 2)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)
