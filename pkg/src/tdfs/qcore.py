"""Dense two-level state primitives: density matrices, pure states, Bloch vectors.

Basis ordering is ``(|0>, |1>)`` with ``|0>`` the ground state.  The ladder
operators are fixed once here and every other module derives from them::

    SIGMA_MINUS = |0><1|   (sigma_- |1> = |0>)
    SIGMA_PLUS  = |1><0|

Bloch convention: ``bz(|0><0|) = +1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default tolerances; every checker below takes an override keyword.
HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
NORM_TOL = 1e-12
BLOCH_TOL = 1e-9

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class TdfsError(Exception):
    """Base class for errors raised by this package."""


class InvalidStateError(TdfsError, ValueError):
    pass


class DimensionMismatchError(TdfsError, ValueError):
    pass


def as_operator(a) -> np.ndarray:
    """Validate and return ``a`` as a square complex matrix of dim >= 2."""
    op = np.asarray(a, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatchError(f"operator must be square, got shape {op.shape}")
    if op.shape[0] < 2:
        raise DimensionMismatchError("operator dimension must be >= 2")
    if not np.all(np.isfinite(op)):
        raise InvalidStateError("operator has non-finite entries")
    return op


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} do not match")
    return a, b


def dagger(a) -> np.ndarray:
    return as_operator(a).conj().T


def matmul(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b


def commutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b + b @ a


def trace(a) -> complex:
    return complex(np.trace(as_operator(a)))


@dataclass(frozen=True)
class DensityMatrix:
    """Validated 2x2 density matrix.

    Construction checks Hermiticity, unit trace and positivity; the stored
    matrix is read-only so instances can be shared freely.
    """

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (2, 2):
            raise DimensionMismatchError(f"density matrix must be 2x2, got {rho.shape}")
        check_density(rho)
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_pure(cls, psi: "PureState | np.ndarray") -> "DensityMatrix":
        amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
        return cls(np.outer(amp, amp.conj()))

    @classmethod
    def from_bloch(cls, b: "BlochVector | np.ndarray") -> "DensityMatrix":
        return cls(bloch_to_matrix(b))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    @property
    def rho00(self) -> float:
        return float(self.entries[0, 0].real)

    @property
    def rho11(self) -> float:
        return float(self.entries[1, 1].real)

    @property
    def rho01(self) -> complex:
        return complex(self.entries[0, 1])


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.shape != (2,):
            raise DimensionMismatchError(f"pure state must have 2 amplitudes, got {amp.shape}")
        if abs(np.linalg.norm(amp) - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm {np.linalg.norm(amp)!r} is not 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True)
class BlochVector:
    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if self.norm > 1.0 + BLOCH_TOL:
            raise InvalidStateError(f"Bloch vector norm {self.norm!r} exceeds 1")

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.bx**2 + self.by**2 + self.bz**2))

    @property
    def azimuth(self) -> float:
        return float(np.arctan2(self.by, self.bx))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.bx, self.by, self.bz], dtype=dtype)


def check_density(rho, *, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                  pos_tol=POSITIVITY_TOL) -> None:
    """Raise :class:`InvalidStateError` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise InvalidStateError(f"not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace {tr:.12g} != 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -pos_tol:
        raise InvalidStateError(f"negative eigenvalue {lo:.3g}")


def _matrix(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def purity(rho) -> float:
    """Tr(rho^2); vectorised over leading axes."""
    m = _matrix(rho)
    p = np.real(np.einsum("...ij,...ji->...", m, m))
    return float(p) if p.ndim == 0 else p


def bloch_components(rho) -> np.ndarray:
    """Bloch components ``(bx, by, bz)``; vectorised over leading axes."""
    m = _matrix(rho)
    r01 = m[..., 0, 1]
    return np.stack([2 * r01.real, -2 * r01.imag, (m[..., 0, 0] - m[..., 1, 1]).real], axis=-1)


def bloch(rho) -> BlochVector:
    bx, by, bz = bloch_components(rho)
    return BlochVector(float(bx), float(by), float(bz))


def bloch_to_matrix(b) -> np.ndarray:
    bx, by, bz = np.asarray(b, dtype=float)
    return 0.5 * np.array([[1 + bz, bx - 1j * by], [bx + 1j * by, 1 - bz]])


def fidelity(rho, psi) -> float:
    """<psi|rho|psi> for a pure reference state."""
    amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    return float(np.real(amp.conj() @ _matrix(rho) @ amp))


def ket(index: int) -> np.ndarray:
    v = np.zeros(2, dtype=complex)
    v[index] = 1.0
    return v
