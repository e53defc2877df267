"""Smoke tests for the python bindings: the worked cavity example end to end."""

import math

import numpy as np
import pytest

qs = pytest.importorskip("qsynth", reason="qsynth extension not built")


def test_cavity_synthesis_matches_reference_values():
    plant = qs.cavity_plant()
    res = qs.synthesize(plant, 0.1)
    assert res.ok()
    assert np.linalg.norm(res.X) <= 1e-8
    assert np.linalg.norm(res.Y) <= 1e-8
    np.testing.assert_allclose(res.triple.A_K, -1.1 * np.eye(2), atol=1e-3)
    np.testing.assert_allclose(res.triple.B_K, -0.4472 * np.eye(2), atol=1e-3)


def test_hinf_norm_of_first_order_lag():
    A = np.array([[-1.0]])
    B = np.array([[1.0]])
    C = np.array([[1.0]])
    D = np.array([[0.0]])
    assert math.isclose(qs.hinf_norm(A, B, C, D), 1.0, abs_tol=1e-7)


def test_quantum_realization_passes_the_checks():
    res = qs.synthesize(qs.cavity_plant(), 0.1)
    ctrl = qs.realize_quantum_controller(res.triple)
    sys_q = ctrl.as_qsde(qs.canonical_ito(2))
    rep = qs.check_physical_realizability(sys_q)
    assert rep.realizable
    assert rep.residual_A <= 1e-9
    assert qs.check_compatibility(ctrl)
    assert np.linalg.norm(ctrl.oscillator.R) <= 1e-10


def test_commutation_preservation_detects_scaling():
    sys_q = qs.LinearQsde(
        A=-1.5 * np.eye(2),
        B=np.hstack(
            [
                -math.sqrt(2.6) * np.eye(2),
                -math.sqrt(0.2) * np.eye(2),
                -math.sqrt(0.2) * np.eye(2),
            ]
        ),
        C=math.sqrt(0.2) * np.eye(2),
        D=np.hstack([np.zeros((2, 2)), np.eye(2), np.zeros((2, 2))]),
        output_channel_offset=2,
    )
    assert qs.preserves_commutation(sys_q).holds
    assert qs.commutation_ode_oracle(sys_q, 5.0) <= 1e-8


def test_robust_certificate():
    up = qs.uncertain_cavity_plant(0.1)
    res = qs.synthesize(up.augmented, 0.1)
    assert res.ok()
    shell = qs.controller_shell(res.triple, 2)
    cl = qs.close_loop(up.augmented, shell)
    rep = qs.robust_stability_check(cl, 0.1, 11)
    assert rep.certified
    assert rep.worst_margin < 0.0
    assert all(margin < 0.0 for _, margin in rep.structured_margins)


def test_errors_surface_as_exceptions():
    with pytest.raises(qs.QsynthError):
        qs.hinf_norm(np.array([[1.0]]), np.eye(1), np.eye(1), np.zeros((1, 1)))
