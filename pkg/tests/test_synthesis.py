import numpy as np
import pytest

from tdfs.reservoir import GenericSchedule, SqueezeSchedule, lindblad_operator, sample
from tdfs.synthesis import (ControlLaw, DegenerateLindbladOperator, adjustment_factor,
                            closed_form_field, connection_unitary, decaying_field, dfs_frame,
                            effective_hamiltonian, frame_arrays, frame_grid, gauge_overlaps,
                            invariance_residual, regularized_field, synthesize_exact,
                            theorem_report)

NU = 2 * np.pi / 3
GRID = np.linspace(0.0, 5.0, 500)


def test_frame_is_eigenbasis(driven):
    for t in (0.0, 0.7, 3.0):
        f = dfs_frame(driven, t)
        assert f.eigen_residual() <= 1e-10
        assert f.orthonormality_residual() <= 1e-10
        assert f.c == pytest.approx(sample(driven, t).c, rel=1e-14)


def test_frame_population_and_phase(driven):
    # derived: |<1|phi>|^2 = (1 - e^{-2r})/2, arg(<1|phi>/<0|phi>) = theta/2
    fa = frame_arrays(driven, GRID)
    p1 = np.abs(fa.phi[:, 1]) ** 2
    assert np.allclose(p1, -0.5 * np.expm1(-2 * fa.r), atol=1e-13)
    rel = np.angle(fa.phi[:, 1] / fa.phi[:, 0])
    assert np.allclose(np.exp(1j * rel), np.exp(0.5j * fa.theta), atol=1e-12)


def test_degenerate_operator_rejected():
    with pytest.raises(ValueError):
        frame_arrays(GenericSchedule(lambda t: 0.0, lambda t: 0.0), 0.0)
    assert issubclass(DegenerateLindbladOperator, ValueError)


def test_analytic_derivatives_match_differences(driven):
    t = np.linspace(0.2, 4.0, 40)
    h = 1e-5
    fa = frame_arrays(driven, t)
    fd = (frame_arrays(driven, t + h).phi - frame_arrays(driven, t - h).phi) / (2 * h)
    assert np.max(np.abs(fa.dphi - fd)) < 1e-8


def test_generic_schedule_matches_linear(driven):
    g = GenericSchedule(lambda t: driven.mu * t + driven.o, lambda t: driven.nu * t)
    t = np.linspace(0.5, 4.0, 8)
    assert np.allclose(synthesize_exact(g, t), synthesize_exact(driven, t), rtol=1e-6)


def test_gauge_continuity(driven):
    frames = frame_grid(driven, GRID)
    ov = gauge_overlaps(frames)
    assert np.all(ov.real > 0)
    # phase drift per step is bounded by half the azimuthal step
    assert np.max(np.abs(np.angle(ov))) <= NU * (GRID[1] - GRID[0]) / 2 + 1e-12


def test_connection_unitary(driven):
    U, dU = connection_unitary(driven, GRID)
    eye = np.eye(2)
    assert np.max(np.abs(np.conj(np.swapaxes(U, 1, 2)) @ U - eye)) <= 1e-10
    assert np.allclose(U[0], eye, atol=1e-12)


def test_theorem_conditions_under_exact_control(driven):
    rep = theorem_report(driven, ControlLaw.exact(), GRID)
    assert rep.passed, rep.checks()


def test_invariance_matches_scalar_form(driven):
    t = 1.3
    law = ControlLaw.exact()
    H = effective_hamiltonian(driven, t, law)
    f = dfs_frame(driven, t)
    val = abs(np.vdot(f.phi_perp.amplitudes, H @ f.phi.amplitudes))
    assert val == pytest.approx(invariance_residual(driven, t, law)[0], abs=1e-12)
    assert val < 1e-9


def test_uncontrolled_breaks_invariance(driven):
    assert np.max(invariance_residual(driven, GRID, ControlLaw.none())) > 1e-2


def test_flipped_phase_breaks_invariance(driven):
    bad = ControlLaw("exact", phase=np.pi)
    assert np.max(invariance_residual(driven, GRID, bad)) > 1.0


def test_closed_form_agrees_without_rotation(still):
    ex = synthesize_exact(still, GRID)
    cf = closed_form_field(still, GRID)
    assert np.max(np.abs(ex - cf)) <= 1e-9


def test_closed_form_violates_invariance_when_rotating(driven):
    # the printed field differs from the exact solve as soon as nu != 0
    res = invariance_residual(driven, GRID, ControlLaw.closed_form())
    assert np.max(res) > 1e-3


def test_exact_field_without_sigma_z_grows(driven):
    # no sigma_z drive: keeping up with the azimuth costs ~e^{2r}
    om = np.abs(synthesize_exact(driven, np.array([4.0, 5.0])))
    assert om[1] / om[0] == pytest.approx(np.exp(2.0), rel=0.05)


def test_regularized_reduces_to_exact(driven):
    assert np.allclose(regularized_field(driven, GRID, 0.0), closed_form_field(driven, GRID))


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 1e-1])
def test_regularized_asymptote(still, eps):
    om = regularized_field(still, 30.0, eps)
    assert abs(om) == pytest.approx(np.exp(-eps / 2) / 4, rel=1e-9)


def test_adjustment_factor_limits():
    t = np.array([1e-6, 1e-3, 0.1, 1.0, 50.0])
    lam = adjustment_factor(1.0, t, 0.1, 1e3)
    assert np.all((lam > 0) & (lam <= 1))
    assert lam[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(adjustment_factor(1.0, t, 0.0, 5.0) == 1.0)


def test_decaying_requires_static_phase(driven):
    with pytest.raises(ValueError):
        decaying_field(driven, 1.0, 0.1, 10.0)


def test_control_law_validation():
    with pytest.raises(ValueError):
        ControlLaw("bogus")
    with pytest.raises(ValueError):
        ControlLaw.regularized(-1.0)
    with pytest.raises(ValueError):
        ControlLaw.tabulated([0.0, 0.0], [1, 2])


def test_tabulated_interpolates(still):
    t = np.linspace(0, 5, 5001)
    law = ControlLaw.tabulated(t, synthesize_exact(still, t))
    mid = np.array([1.2345, 3.21])
    assert np.allclose(law.amplitude(still, mid), synthesize_exact(still, mid), rtol=1e-5)


def test_lindblad_eigenvector_consistency(driven):
    s = sample(driven, 2.0)
    f = dfs_frame(driven, 2.0)
    assert np.allclose(lindblad_operator(s), f.L)


def test_decaying_field_examples(still):
    law_fast = ControlLaw.decaying(0.1, 1e3)
    law_slow = ControlLaw.decaying(0.1, 10.0)
    assert law_fast.amplitude(still, 0.0) == 0
    assert abs(law_fast.amplitude(still, 1.0)) > abs(law_slow.amplitude(still, 1.0))
    t = np.linspace(0.0, 5.0, 51)
    assert np.allclose(ControlLaw.decaying(0.0, 5.0).amplitude(still, t),
                       synthesize_exact(still, t))


def test_regularized_finite_without_offset():
    sched = SqueezeSchedule(mu=1.0, nu=0.0, o=1e-14)
    assert np.isfinite(abs(regularized_field(sched, 0.0, 0.1)))
    assert abs(regularized_field(sched, 0.0, 0.1)) < 10


def test_exact_field_limit(still):
    assert abs(synthesize_exact(still, 9.0)) == pytest.approx(0.25, rel=1e-6)
