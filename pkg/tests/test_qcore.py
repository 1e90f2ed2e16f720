import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdfs.qcore import (SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Z, BlochVector,
                        DensityMatrix, DimensionMismatchError, InvalidStateError, PureState,
                        anticommutator, bloch, bloch_components, commutator, dagger,
                        fidelity, ket, purity)

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def test_ladder_convention():
    # sigma_- lowers |1> (excited) to |0> (ground)
    assert np.allclose(SIGMA_MINUS @ ket(1), ket(0))
    assert np.allclose(SIGMA_PLUS @ ket(0), ket(1))
    assert np.allclose(dagger(SIGMA_MINUS), SIGMA_PLUS)


def test_commutator_algebra():
    assert np.allclose(commutator(SIGMA_PLUS, SIGMA_MINUS), -SIGMA_Z)
    assert np.allclose(anticommutator(SIGMA_X, SIGMA_X), 2 * np.eye(2))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        commutator(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatchError):
        DensityMatrix(np.eye(3) / 3)


@pytest.mark.parametrize("bad", [
    np.array([[0.5, 0.1], [0.2, 0.5]]),       # not Hermitian
    np.array([[0.6, 0], [0, 0.6]]),           # trace
    np.array([[1.2, 0], [0, -0.2]]),          # negative
    np.array([[np.nan, 0], [0, 1]]),
])
def test_density_rejects(bad):
    with pytest.raises(InvalidStateError):
        DensityMatrix(bad)


def test_density_is_read_only():
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1


def test_pure_state_norm():
    with pytest.raises(InvalidStateError):
        PureState(np.array([1.0, 1e-5]))
    PureState(np.array([1, 1]) / np.sqrt(2))


def test_bloch_norm_bound():
    with pytest.raises(InvalidStateError):
        BlochVector(1.0, 0.1, 0.0)


def test_mixed_purity():
    assert purity(np.eye(2) / 2) == pytest.approx(0.5, abs=1e-15)
    assert purity(DensityMatrix.from_pure(ket(0))) == pytest.approx(1.0, abs=1e-15)


def test_fidelity_orthogonal():
    assert fidelity(np.outer(ket(0), ket(0)), ket(1)) == 0.0


@given(th=angles, ph=angles)
@settings(max_examples=50, deadline=None)
def test_pure_states_on_sphere(th, ph):
    psi = np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)])
    rho = DensityMatrix.from_pure(psi)
    b = bloch(rho)
    assert b.norm == pytest.approx(1.0, abs=1e-12)
    assert purity(rho) == pytest.approx(1.0, abs=1e-12)
    # round trip
    assert np.allclose(DensityMatrix.from_bloch(b).entries, rho.entries, atol=1e-12)


@given(x=st.floats(-1, 1), y=st.floats(-1, 1), z=st.floats(-1, 1))
@settings(max_examples=50, deadline=None)
def test_purity_from_bloch(x, y, z):
    n = np.sqrt(x * x + y * y + z * z)
    if n > 1:
        x, y, z = x / n, y / n, z / n
    rho = DensityMatrix.from_bloch([x, y, z]).entries
    assert purity(rho) == pytest.approx((1 + x * x + y * y + z * z) / 2, abs=1e-12)


def test_vectorised_helpers():
    rhos = np.stack([np.eye(2) / 2, np.outer(ket(0), ket(0))])
    assert np.allclose(purity(rhos), [0.5, 1.0])
    assert bloch_components(rhos).shape == (2, 3)
