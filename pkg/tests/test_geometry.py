import math

import numpy as np
import pytest
from hypothesis import given

from gestark.errors import ZeroDirection
from gestark.geometry import (
    Geometry,
    MillerDirection,
    classify_geometry,
    projection_squared,
    to_unit_vector,
    valley_axes,
    valley_projections,
)

from conftest import unit_vectors


@pytest.mark.parametrize(
    "d, expected",
    [
        ((0, 0, 1), (0, 0, 1)),
        ((1, 1, 1), np.ones(3) / math.sqrt(3)),
        ((1, 1, 0), (1 / math.sqrt(2), 1 / math.sqrt(2), 0)),
    ],
)
def test_to_unit_vector(d, expected):
    np.testing.assert_allclose(to_unit_vector(MillerDirection(*d)), expected, atol=1e-15)


def test_zero_direction_rejected():
    with pytest.raises(ZeroDirection):
        MillerDirection(0, 0, 0)
    with pytest.raises(ZeroDirection):
        to_unit_vector([0.0, 0.0, 0.0])


def test_scale_invariance():
    np.testing.assert_array_equal(to_unit_vector(MillerDirection(2, 2, 0)), to_unit_vector(MillerDirection(1, 1, 0)))


def test_canonical_and_axis_key():
    assert MillerDirection(2, -4, 6).canonical() == MillerDirection(1, -2, 3)
    assert MillerDirection(-1, 1, 1).axis_key() == (1, -1, -1)
    assert MillerDirection(0, -2, 2).axis_key() == (0, 1, -1)


@pytest.mark.parametrize("text", ["[-111]", "-111", "-1 1 1", "[-1 1 1]"])
def test_parse_strings(text):
    assert MillerDirection.parse(text) == MillerDirection(-1, 1, 1)


def test_projection_examples():
    z = to_unit_vector((0, 0, 1))
    n111 = to_unit_vector((1, 1, 1))
    assert projection_squared(z, n111) == pytest.approx(1 / 3, abs=1e-15)
    assert projection_squared(n111, n111) == pytest.approx(1.0, abs=1e-15)
    # (-1 + 1 + 1) / 3 squared
    assert projection_squared(n111, to_unit_vector((-1, 1, 1))) == pytest.approx(1 / 9, abs=1e-15)


def test_valley_set():
    v = valley_axes()
    assert v.shape == (4, 3)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-15)
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(np.dot(v[i], v[j])) == pytest.approx(1 / 3, abs=1e-15)
    np.testing.assert_allclose(sum(np.outer(n, n) for n in v), 4 / 3 * np.eye(3), atol=1e-12)
    assert np.all(v[:, 2] > 0)


@given(unit_vectors())
def test_projection_completeness(e):
    assert valley_projections(e).sum() == pytest.approx(4 / 3, abs=1e-12)


def test_projection_completeness_100_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        e = rng.normal(size=3)
        e /= np.linalg.norm(e)
        assert abs(valley_projections(e).sum() - 4 / 3) < 1e-12


@pytest.mark.parametrize("axis", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (0, 0, -1)])
def test_equal_angle_for_100(axis):
    p = valley_projections(to_unit_vector(axis))
    assert np.all(p == p[0])
    assert p[0] == pytest.approx(1 / 3, abs=1e-15)


def test_projection_is_headless():
    e = to_unit_vector((1, 2, 3))
    n = to_unit_vector((1, 1, 1))
    assert projection_squared(e, n) == projection_squared(e, -n)


@pytest.mark.parametrize(
    "e, b, expected",
    [
        ((0, 0, 1), (0, 0, 1), Geometry.parallel),
        ((0, 0, 1), (1, 1, 0), Geometry.perpendicular),
        ((1, 1, 1), (1, 1, 2), Geometry.oblique),
        ((-1, 1, 1), (0, 1, -1), Geometry.perpendicular),
        ((1, 0, 0), (-2, 0, 0), Geometry.parallel),
    ],
)
def test_classify_geometry(e, b, expected):
    assert classify_geometry(MillerDirection(*e), MillerDirection(*b)) is expected
