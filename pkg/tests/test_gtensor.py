import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gestark.errors import InvalidWeights
from gestark.geometry import to_unit_vector, valley_axes
from gestark.gtensor import (
    AS75_VALLEY_G,
    EQUAL_WEIGHTS,
    RepopulationModel,
    ValleyGTensor,
    calibrate_kappa,
    effective_g_tensor,
    g_along,
    g_along_gradient,
    repopulation_weights,
    resonance_frequency,
    valley_tensor_in_crystal_frame,
)

from conftest import unit_vectors

AS = AS75_VALLEY_G


def rotation_taking_z_to(n):
    """Independent construction: rotation matrix whose third column is n."""
    n = np.asarray(n, float) / np.linalg.norm(n)
    helper = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return np.column_stack([u, v, n])


def valley_tensor_oracle(gp, gl, n):
    r = rotation_taking_z_to(n)
    return r @ np.diag([gp, gp, gl]) @ r.T


def test_valley_tensor_along_z():
    np.testing.assert_allclose(valley_tensor_in_crystal_frame(AS, (0, 0, 1)), np.diag([1.92, 1.92, 0.82]), atol=1e-15)


def test_valley_tensor_isotropic():
    t = valley_tensor_in_crystal_frame(ValleyGTensor(1.7, 1.7), to_unit_vector((1, 2, 3)))
    np.testing.assert_allclose(t, 1.7 * np.eye(3), atol=1e-15)


def test_valley_tensor_along_111():
    t = valley_tensor_in_crystal_frame(AS, to_unit_vector((1, 1, 1)))
    # hand-evaluated: diagonal g_perp + (g_par - g_perp)/3, off-diagonal (g_par - g_perp)/3
    np.testing.assert_allclose(np.diag(t), 1.5533333333333333, atol=1e-14)
    off = t[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, -0.36666666666666664, atol=1e-14)


@given(unit_vectors(), st.floats(0.5, 2.5), st.floats(0.5, 2.5))
def test_valley_tensor_matches_rotation_oracle(n, gp, gl):
    t = valley_tensor_in_crystal_frame(ValleyGTensor(gp, gl), n)
    np.testing.assert_allclose(t, valley_tensor_oracle(gp, gl, n), atol=1e-12)
    np.testing.assert_allclose(sorted(np.linalg.eigvalsh(t)), sorted([gp, gp, gl]), atol=1e-12)


def test_effective_equal_weights():
    np.testing.assert_allclose(effective_g_tensor(AS), 1.5533333333333333 * np.eye(3), atol=1e-12)


def test_effective_single_valley():
    v = valley_axes()
    t = effective_g_tensor(AS, v, (1, 0, 0, 0))
    np.testing.assert_allclose(t, valley_tensor_in_crystal_frame(AS, v[0]), atol=1e-15)


def test_effective_isotropic():
    np.testing.assert_allclose(effective_g_tensor(ValleyGTensor(2.0, 2.0)), 2.0 * np.eye(3), atol=1e-15)


@pytest.mark.parametrize("w", [(0.3, 0.3, 0.3, 0.3), (1.2, -0.2, 0, 0), (0.5, 0.5, 0), (0.25, 0.25, 0.25, 0.2500001)])
def test_invalid_weights(w):
    with pytest.raises(InvalidWeights):
        effective_g_tensor(AS, valley_axes(), w)


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_equal_weight_isotropy(gp, gl):
    t = effective_g_tensor(ValleyGTensor(gp, gl))
    np.testing.assert_allclose(t, (2 * gp + gl) / 3 * np.eye(3), atol=1e-12)


def test_g_along_examples():
    assert g_along(1.5533 * np.eye(3), to_unit_vector((3, 1, 2))) == pytest.approx(1.5533, abs=1e-15)
    t = np.diag([1.92, 1.92, 0.82])
    assert g_along(t, (0, 0, 1)) == pytest.approx(0.82, abs=1e-15)
    assert g_along(t, (1, 0, 0)) == pytest.approx(1.92, abs=1e-15)


def test_g_along_rejects_asymmetric():
    t = np.diag([1.0, 1.0, 1.0])
    t[0, 1] = 0.1
    with pytest.raises(ValueError):
        g_along(t, (0, 0, 1))


weights_strategy = st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3).map(
    lambda w: np.asarray(w) / sum(w)
)


@given(weights_strategy, unit_vectors())
def test_g_along_bounds(w, b):
    w = w / w.sum()
    g = g_along(effective_g_tensor(AS, valley_axes(), w), b)
    assert AS.g_par - 1e-12 <= g <= AS.g_perp + 1e-12


@pytest.mark.parametrize("b", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1)])
def test_100_first_order_immunity(b):
    """Finite-difference derivative of g_along along any redistribution vanishes for B along <100>."""
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(20):
        d = rng.normal(size=4)
        d -= d.mean()
        d /= np.linalg.norm(d)
        gp = g_along(effective_g_tensor(AS, valley_axes(), EQUAL_WEIGHTS + h * d), b)
        gm = g_along(effective_g_tensor(AS, valley_axes(), EQUAL_WEIGHTS - h * d), b)
        assert abs((gp - gm) / (2 * h)) < 1e-8


def test_111_not_immune():
    d = np.array([3.0, -1.0, -1.0, -1.0]) / 12
    h = 1e-6
    b = (1, 1, 1)
    deriv = (g_along(effective_g_tensor(AS, w=EQUAL_WEIGHTS + h * d), b)
             - g_along(effective_g_tensor(AS, w=EQUAL_WEIGHTS - h * d), b)) / (2 * h)
    assert abs(deriv) > 1e-2


@settings(max_examples=50)
@given(weights_strategy, unit_vectors())
def test_gradient_matches_finite_differences(w, b):
    grad = g_along_gradient(AS, w, b)
    h = 1e-6
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        # unconstrained perturbation: evaluate the weighted sum directly
        def g_of(a):
            t = AS.g_perp * a.sum() * np.eye(3) + (AS.g_par - AS.g_perp) * sum(
                ai * np.outer(n, n) for ai, n in zip(a, valley_axes())
            )
            return np.linalg.norm(t @ b)

        fd = (g_of(w + e) - g_of(w - e)) / (2 * h)
        assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_resonance_frequency():
    assert resonance_frequency(1.57, 0.437) == pytest.approx(9.60e9, rel=5e-3)
    assert resonance_frequency(2.0023, 0.3427) == pytest.approx(9.6e9, rel=5e-3)
    assert resonance_frequency(0.0, 0.4) == 0.0


def test_repopulation_zero_field():
    w = repopulation_weights(RepopulationModel(5.0), to_unit_vector((1, 1, 1)), 0.0)
    np.testing.assert_array_equal(w, [0.25] * 4)


@pytest.mark.parametrize("axis", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
@pytest.mark.parametrize("kappa, e", [(1.0, 0.1), (-3.0, 0.05), (100.0, 1.0)])
def test_repopulation_100_exact_quarters(axis, kappa, e):
    w = repopulation_weights(RepopulationModel(kappa), to_unit_vector(axis), e)
    assert list(w) == [0.25, 0.25, 0.25, 0.25]


def test_repopulation_111_example():
    w = repopulation_weights(RepopulationModel(1.0), to_unit_vector((1, 1, 1)), 0.1)
    expected = [0.25 + (2 / 3) * 0.01] + [0.25 - (2 / 9) * 0.01] * 3
    np.testing.assert_allclose(w, expected, atol=1e-15)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


@given(unit_vectors(), st.floats(-10, 10), st.floats(0, 2))
def test_repopulation_symmetries(e_hat, kappa, e):
    m = RepopulationModel(kappa)
    w = repopulation_weights(m, e_hat, e)
    np.testing.assert_array_equal(w, repopulation_weights(m, -e_hat, e))
    assert np.all(w >= 0) and np.all(w <= 1)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_repopulation_clamped():
    w = repopulation_weights(RepopulationModel(1e6), to_unit_vector((1, 1, 1)), 1.0)
    np.testing.assert_allclose(w, [1, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("eta", [3.9e-2, -3.0e-2, 1.7e-2])
def test_calibrate_kappa_matches_closed_form(eta):
    # For E || B || [111] and unclamped weights, the aligned weight moves by
    # (2/3) kappa E^2 and g changes by (8/9)(g_par - g_perp) times that.
    closed_form = eta * AS.valley_average * 27 / (16 * (AS.g_par - AS.g_perp))
    model = calibrate_kappa(AS, eta)
    assert model.kappa == pytest.approx(closed_form, rel=1e-9)


def test_calibrated_model_reproduces_eta():
    eta, e = 3.9e-2, 0.1
    m = calibrate_kappa(AS, eta, e_field=e)
    b = to_unit_vector((1, 1, 1))
    w = repopulation_weights(m, b, e)
    ratio = g_along(effective_g_tensor(AS, w=w), b) / g_along(effective_g_tensor(AS), b) - 1
    assert ratio == pytest.approx(eta * e**2, rel=1e-8)


def test_calibrate_kappa_out_of_reach():
    from gestark.errors import CalibrationError

    # repopulation alone cannot move g by more than the valley anisotropy allows
    with pytest.raises(CalibrationError):
        calibrate_kappa(AS, 1e3, e_field=0.1)
