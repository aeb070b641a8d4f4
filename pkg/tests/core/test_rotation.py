#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.core.rotation

"""


# =============================================================================
# IMPORTS
# =============================================================================

from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import numpy as np

import pytest

from facedrive.core import rotation


# =============================================================================
# STRATEGIES
# =============================================================================

AXIS_ANGLES = arrays(
    np.float64,
    (3,),
    elements=st.floats(min_value=-1.8, max_value=1.8),
)


# =============================================================================
# RODRIGUES
# =============================================================================


def test_rodrigues_zero_is_identity():
    rot = rotation.rodrigues([0.0, 0.0, 0.0])
    assert np.array_equal(rot.as_matrix(), np.eye(3))


def test_rodrigues_half_turn_about_z():
    rot = rotation.rodrigues([0.0, 0.0, np.pi])
    np.testing.assert_allclose(
        rot.as_matrix(), np.diag([-1.0, -1.0, 1.0]), atol=1e-12
    )


def test_rodrigues_small_angle_series():
    v = np.array([1e-10, -2e-10, 3e-10])
    expected = np.eye(3) + rotation.hat(v)
    np.testing.assert_allclose(
        rotation.rodrigues(v).as_matrix(), expected, atol=1e-18
    )


@settings(max_examples=100, deadline=None)
@given(AXIS_ANGLES)
def test_rodrigues_inverse_property(v):
    forward = rotation.rodrigues(v).as_matrix()
    backward = rotation.rodrigues(-v).as_matrix()
    np.testing.assert_allclose(forward @ backward, np.eye(3), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(AXIS_ANGLES)
def test_rodrigues_orthogonal_and_fixes_axis(v):
    matrix = rotation.rodrigues(v).as_matrix()
    np.testing.assert_allclose(matrix.T @ matrix, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(matrix @ v, v, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(AXIS_ANGLES.filter(lambda v: 1e-3 < np.linalg.norm(v) < np.pi))
def test_rodrigues_trace_recovers_angle(v):
    matrix = rotation.rodrigues(v).as_matrix()
    angle = np.arccos(np.clip((np.trace(matrix) - 1.0) / 2.0, -1, 1))
    assert np.isclose(angle, np.linalg.norm(v), atol=1e-7)


def test_axis_angle_to_matrix_vectorised():
    vectors = np.random.default_rng(3).normal(size=(4, 5, 3))
    batch = rotation.axis_angle_to_matrix(vectors)
    assert batch.shape == (4, 5, 3, 3)
    np.testing.assert_allclose(
        batch[2, 3], rotation.rodrigues(vectors[2, 3]).as_matrix()
    )


def test_axis_angle_to_matrix_bad_shape():
    with pytest.raises(ValueError, match="3 components"):
        rotation.axis_angle_to_matrix([1.0, 2.0])


# =============================================================================
# QUATERNIONS
# =============================================================================


@pytest.mark.parametrize(
    "v",
    [
        [0.3, -0.2, 0.1],
        [np.pi - 1e-3, 0.0, 0.0],
        [0.0, 3.0, 0.0],
        [0.0, 0.0, -2.9],
    ],
)
def test_Rotation_quaternion_roundtrip(v):
    rot = rotation.Rotation.from_axis_angle(v)
    quat = rot.as_quaternion()
    assert quat[0] >= 0
    assert np.isclose(np.linalg.norm(quat), 1.0, atol=1e-12)
    assert rotation.Rotation.from_quaternion(quat).allclose(rot, atol=1e-12)
    assert rotation.Rotation.from_axis_angle(rot.as_axis_angle()).allclose(
        rot, atol=1e-10
    )


def test_quaternion_multiply_matches_matrix_product():
    a = rotation.Rotation.about_axis([1, 2, 3], 40)
    b = rotation.Rotation.about_axis([-1, 0, 2], 75)
    product = rotation.quaternion_multiply(
        a.as_quaternion(), b.as_quaternion()
    )
    assert rotation.Rotation.from_quaternion(product).allclose(
        a @ b, atol=1e-12
    )


# =============================================================================
# ROTATION
# =============================================================================


def test_Rotation_about_axis_degrees():
    rot = rotation.Rotation.about_axis([0, 1, 0], 30)
    assert np.isclose(rot.magnitude_degrees, 30.0)
    np.testing.assert_allclose(
        rot.apply([1.0, 0.0, 0.0]),
        [np.cos(np.pi / 6), 0.0, -np.sin(np.pi / 6)],
        atol=1e-12,
    )


def test_Rotation_inv_and_compose():
    rot = rotation.Rotation.about_axis([1, 1, 0], 50)
    assert (rot @ rot.inv()).allclose(rotation.Rotation.identity())


def test_Rotation_rejects_improper_matrix():
    with pytest.raises(ValueError, match="not a proper rotation"):
        rotation.Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError, match="3x3"):
        rotation.Rotation(np.eye(2))


def test_Rotation_rejects_bad_inputs():
    with pytest.raises(ValueError, match="non-finite"):
        rotation.Rotation.from_axis_angle([np.nan, 0, 0])
    with pytest.raises(ValueError, match="non-zero"):
        rotation.Rotation.from_quaternion([0, 0, 0, 0])
    with pytest.raises(ValueError, match="non-zero"):
        rotation.Rotation.about_axis([0, 0, 0], 10)


def test_Rotation_matrix_is_readonly_copy():
    rot = rotation.Rotation.identity()
    matrix = rot.as_matrix()
    matrix[0, 0] = 5
    assert rot.as_matrix()[0, 0] == 1


def test_Rotation_repr():
    rot = rotation.Rotation.identity()
    assert repr(rot).startswith("<Rotation axis_angle=")
