import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdfs.evolve import IntegratorConfig, initial_state, integrate
from tdfs.reservoir import (GenericSchedule, ReservoirSample, SqueezeSchedule,
                            dissipator_expanded, dissipator_lindblad, dissipator_printed,
                            eigenvalue, free_steady_state, frozen_sample, lindblad_operator,
                            sample, superoperator)
from tdfs.synthesis import ControlLaw
from tdfs.verify import random_density_matrices


def test_eigenvalue_oracle():
    # independent high-precision evaluation of sqrt(sinh r cosh r)
    assert eigenvalue(0.1) == pytest.approx(0.317282210769130577, rel=1e-14)
    assert eigenvalue(1.0) == pytest.approx(1.346636626534236734, rel=1e-14)


def test_schedule_validation():
    with pytest.raises(ValueError):
        SqueezeSchedule(o=0.0)
    with pytest.raises(ValueError):
        SqueezeSchedule(mu=-1.0)
    with pytest.raises(ValueError):
        sample(SqueezeSchedule(), -0.1)
    with pytest.raises(ValueError):
        ReservoirSample(t=0, r=0.0, theta=0, c=0)


def test_sample_values():
    s = sample(SqueezeSchedule(mu=2, nu=3, o=0.5), 1.5)
    assert (s.r, s.theta) == (3.5, 4.5)
    assert s.c == pytest.approx(np.sqrt(np.sinh(3.5) * np.cosh(3.5)))


def test_generic_schedule():
    g = GenericSchedule(lambda t: 0.1 + t * t, lambda t: np.sin(t))
    assert g.r(2.0) == pytest.approx(4.1)
    assert not g.analytic


def test_lindblad_spectrum():
    s = frozen_sample(0.7, 1.3)
    ev = np.sort_complex(np.linalg.eigvals(lindblad_operator(s)))
    assert np.allclose(ev, [-s.c, s.c], atol=1e-12)


@pytest.mark.parametrize("r,theta", [(1e-4, 0.0), (0.3, 1.0), (2.5, 4.0)])
def test_expanded_equals_lindblad(r, theta):
    rng = np.random.default_rng(1)
    s = frozen_sample(r, theta)
    for rho in random_density_matrices(rng, 50):
        assert np.max(np.abs(dissipator_expanded(rho, s) - dissipator_lindblad(rho, s))) <= 1e-12


@given(r=st.floats(1e-6, 3.0), th=st.floats(0, 2 * np.pi), seed=st.integers(0, 2**16))
@settings(max_examples=60, deadline=None)
def test_dissipator_trace_and_hermiticity(r, th, seed):
    rho = random_density_matrices(np.random.default_rng(seed), 1)[0]
    d = dissipator_lindblad(rho, frozen_sample(r, th))
    scale = np.cosh(2 * r)
    assert abs(np.trace(d)) <= 1e-12 * scale
    assert np.max(np.abs(d - d.conj().T)) <= 1e-12 * scale


def test_printed_form_is_not_trace_preserving():
    s = frozen_sample(0.8, 0.2)
    d = dissipator_printed(np.diag([1.0, 0.0]).astype(complex), s)
    assert abs(np.trace(d)) > 0.1


def test_superoperator_matches_direct():
    s = frozen_sample(0.5, 0.9)
    rho = random_density_matrices(np.random.default_rng(3), 1)[0]
    H = np.array([[0.3, 0.1 - 0.2j], [0.1 + 0.2j, -0.3]])
    gen = superoperator(H, lindblad_operator(s))
    direct = -1j * (H @ rho - rho @ H) + dissipator_lindblad(rho, s)
    assert np.allclose((gen @ rho.reshape(4)).reshape(2, 2), direct, atol=1e-13)


@pytest.mark.parametrize("r,p11", [(1.0, 0.367098885582960154), (0.5, 0.175972863168057300)])
def test_free_steady_state_oracle(r, p11):
    # rate balance sinh^2 r rho00 = cosh^2 r rho11, no steady coherence
    rho = free_steady_state(frozen_sample(r, 0.4))
    assert rho[1, 1].real == pytest.approx(p11, abs=1e-12)
    assert abs(rho[0, 1]) < 1e-12


def test_free_steady_state_by_relaxation():
    # coherences relax at only e^{-2r}/2, hence the long horizon
    sched = SqueezeSchedule(mu=0.0, nu=0.0, o=0.3)
    traj = integrate(initial_state(sched), sched, ControlLaw.none(),
                     IntegratorConfig(dt=1e-2, t_max=120.0, record_stride=12000))
    assert np.max(np.abs(traj.rho[-1] - free_steady_state(frozen_sample(0.3)))) < 1e-10
