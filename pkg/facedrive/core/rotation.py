#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Rotations in axis-angle, matrix and unit-quaternion form.

Quaternions are stored scalar first, ``(w, x, y, z)``. All the vectorised
helpers accept arrays with arbitrary leading dimensions.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import numpy as np

# =============================================================================
# CONSTANTS
# =============================================================================

#: Below this angle (radians) Rodrigues switches to its series expansion.
SMALL_ANGLE = 1e-8

#: Tolerance of the orthogonality and unit-norm checks.
ROTATION_ATOL = 1e-9


# =============================================================================
# VECTORISED CONVERSIONS
# =============================================================================


def hat(vectors):
    """Skew-symmetric cross-product matrices of ``(..., 3)`` vectors."""
    vectors = np.asarray(vectors, dtype=float)
    x, y, z = vectors[..., 0], vectors[..., 1], vectors[..., 2]
    zero = np.zeros_like(x)
    return np.stack(
        [
            np.stack([zero, -z, y], axis=-1),
            np.stack([z, zero, -x], axis=-1),
            np.stack([-y, x, zero], axis=-1),
        ],
        axis=-2,
    )


def axis_angle_to_matrix(axis_angle):
    """Rodrigues' formula over ``(..., 3)`` axis-angle vectors.

    Angles below :py:data:`SMALL_ANGLE` use ``I + K + K^2 / 2`` with
    ``K = hat(v)``, which is exactly the identity for the zero vector.

    """
    axis_angle = np.asarray(axis_angle, dtype=float)
    if axis_angle.shape[-1:] != (3,):
        raise ValueError(
            f"axis-angle vectors must have 3 components, "
            f"found shape {axis_angle.shape}"
        )

    theta = np.linalg.norm(axis_angle, axis=-1)
    small = theta < SMALL_ANGLE

    safe_theta = np.where(small, 1.0, theta)
    unit = axis_angle / safe_theta[..., None]
    k = hat(unit)
    k2 = k @ k
    sin = np.sin(theta)[..., None, None]
    one_minus_cos = (1.0 - np.cos(theta))[..., None, None]
    eye = np.broadcast_to(np.eye(3), k.shape)
    regular = eye + sin * k + one_minus_cos * k2

    k_small = hat(axis_angle)
    series = eye + k_small + 0.5 * (k_small @ k_small)

    return np.where(small[..., None, None], series, regular)


def matrix_to_quaternion(matrix):
    """Shepperd's conversion of ``(..., 3, 3)`` matrices to quaternions.

    The branch with the largest of ``(trace, m00, m11, m22)`` is used, the
    result is normalised and its scalar part made non-negative.

    """
    m = np.asarray(matrix, dtype=float)
    m00, m01, m02 = m[..., 0, 0], m[..., 0, 1], m[..., 0, 2]
    m10, m11, m12 = m[..., 1, 0], m[..., 1, 1], m[..., 1, 2]
    m20, m21, m22 = m[..., 2, 0], m[..., 2, 1], m[..., 2, 2]
    trace = m00 + m11 + m22

    with np.errstate(divide="ignore", invalid="ignore"):
        w = 0.5 * np.sqrt(np.maximum(1.0 + trace, 0.0))
        x = 0.5 * np.sqrt(np.maximum(1.0 + m00 - m11 - m22, 0.0))
        y = 0.5 * np.sqrt(np.maximum(1.0 - m00 + m11 - m22, 0.0))
        z = 0.5 * np.sqrt(np.maximum(1.0 - m00 - m11 + m22, 0.0))

        # one candidate per branch, rows are (w, x, y, z)
        by_w = [w, (m21 - m12) / (4 * w)]
        by_w += [(m02 - m20) / (4 * w), (m10 - m01) / (4 * w)]
        by_x = [(m21 - m12) / (4 * x), x]
        by_x += [(m01 + m10) / (4 * x), (m02 + m20) / (4 * x)]
        by_y = [(m02 - m20) / (4 * y), (m01 + m10) / (4 * y)]
        by_y += [y, (m12 + m21) / (4 * y)]
        by_z = [(m10 - m01) / (4 * z), (m02 + m20) / (4 * z)]
        by_z += [(m12 + m21) / (4 * z), z]

    candidates = np.stack(
        [np.stack(by, axis=-1) for by in (by_w, by_x, by_y, by_z)], axis=-2
    )
    branch = np.argmax(np.stack([trace, m00, m11, m22], axis=-1), axis=-1)
    quat = np.take_along_axis(
        candidates, branch[..., None, None], axis=-2
    )[..., 0, :]

    quat = quat / np.linalg.norm(quat, axis=-1, keepdims=True)
    return np.where(quat[..., :1] < 0, -quat, quat)


def quaternion_to_matrix(quaternion):
    """Rotation matrices of ``(..., 4)`` quaternions (normalised first)."""
    q = np.asarray(quaternion, dtype=float)
    if q.shape[-1:] != (4,):
        raise ValueError(
            f"quaternions must have 4 components, found shape {q.shape}"
        )
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    rows = [
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def quaternion_to_axis_angle(quaternion):
    """Axis-angle vectors of ``(..., 4)`` quaternions, angles in [0, pi]."""
    q = np.asarray(quaternion, dtype=float)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    q = np.where(q[..., :1] < 0, -q, q)
    vec = q[..., 1:]
    sin_half = np.linalg.norm(vec, axis=-1)
    angle = 2.0 * np.arctan2(sin_half, q[..., 0])
    small = sin_half < SMALL_ANGLE
    scale = np.where(small, 2.0, angle / np.where(small, 1.0, sin_half))
    return vec * scale[..., None]


def quaternion_multiply(left, right):
    """Hamilton product of ``(..., 4)`` quaternions."""
    lw, lx, ly, lz = np.moveaxis(np.asarray(left, dtype=float), -1, 0)
    rw, rx, ry, rz = np.moveaxis(np.asarray(right, dtype=float), -1, 0)
    return np.stack(
        [
            lw * rw - lx * rx - ly * ry - lz * rz,
            lw * rx + lx * rw + ly * rz - lz * ry,
            lw * ry - lx * rz + ly * rw + lz * rx,
            lw * rz + lx * ry - ly * rx + lz * rw,
        ],
        axis=-1,
    )


# =============================================================================
# ROTATION
# =============================================================================


class Rotation:
    """An element of SO(3).

    Instances are immutable and hold a float64 3x3 matrix. Use the
    ``from_*`` constructors instead of calling the class directly.

    Parameters
    ----------
    matrix : array-like of shape (3, 3)
        A proper rotation matrix. It is validated: ``R^T R = I`` and
        ``det(R) = +1`` within 1e-9.

    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, found {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("rotation matrix has non-finite entries")
        orthogonality = np.abs(matrix.T @ matrix - np.eye(3)).max()
        if orthogonality > ROTATION_ATOL or np.linalg.det(matrix) <= 0:
            raise ValueError(
                "matrix is not a proper rotation "
                f"(|R^T R - I| = {orthogonality:.3g})"
            )
        matrix.flags.writeable = False
        self._matrix = matrix

    # CONSTRUCTORS ============================================================

    @classmethod
    def identity(cls):
        """The identity rotation."""
        return cls(np.eye(3))

    @classmethod
    def from_axis_angle(cls, axis_angle):
        """Build from an axis-angle 3-vector (radians)."""
        axis_angle = np.asarray(axis_angle, dtype=float)
        if axis_angle.shape != (3,):
            raise ValueError(
                f"expected an axis-angle 3-vector, found {axis_angle.shape}"
            )
        if not np.all(np.isfinite(axis_angle)):
            raise ValueError("axis-angle vector has non-finite entries")
        return cls(axis_angle_to_matrix(axis_angle))

    @classmethod
    def from_matrix(cls, matrix):
        """Build from a 3x3 rotation matrix."""
        return cls(matrix)

    @classmethod
    def from_quaternion(cls, quaternion):
        """Build from a ``(w, x, y, z)`` quaternion (normalised first)."""
        quaternion = np.asarray(quaternion, dtype=float)
        if quaternion.shape != (4,) or not np.linalg.norm(quaternion):
            raise ValueError(
                f"expected a non-zero 4-vector, found {quaternion!r}"
            )
        return cls(quaternion_to_matrix(quaternion))

    @classmethod
    def about_axis(cls, axis, degrees):
        """Rotation of ``degrees`` about ``axis`` (any non-zero 3-vector)."""
        axis = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(axis)
        if not norm:
            raise ValueError("rotation axis must be non-zero")
        return cls.from_axis_angle(axis / norm * np.deg2rad(degrees))

    # CONVERSIONS =============================================================

    def as_matrix(self):
        """Return a writable copy of the 3x3 matrix."""
        return self._matrix.copy()

    def as_quaternion(self):
        """Return the unit quaternion ``(w, x, y, z)`` with ``w >= 0``."""
        return matrix_to_quaternion(self._matrix)

    def as_axis_angle(self):
        """Return the axis-angle vector with angle in ``[0, pi]``."""
        return quaternion_to_axis_angle(self.as_quaternion())

    @property
    def angle(self):
        """Rotation angle in radians, in ``[0, pi]``."""
        return float(np.linalg.norm(self.as_axis_angle()))

    @property
    def magnitude_degrees(self):
        """Rotation angle in degrees."""
        return float(np.rad2deg(self.angle))

    # ALGEBRA =================================================================

    def inv(self):
        """Inverse rotation (the transpose)."""
        return Rotation(self._matrix.T)

    def __matmul__(self, other):
        """Composition, ``(a @ b).apply(v) == a.apply(b.apply(v))``."""
        if not isinstance(other, Rotation):
            return NotImplemented
        return Rotation(self._matrix @ other._matrix)

    def apply(self, points):
        """Rotate ``(..., 3)`` points."""
        return np.asarray(points, dtype=float) @ self._matrix.T

    def allclose(self, other, atol=1e-12):
        """Element-wise matrix comparison with absolute tolerance."""
        close = np.allclose(self._matrix, other._matrix, rtol=0, atol=atol)
        return bool(close)

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        aa = np.array2string(self.as_axis_angle(), precision=6)
        return f"<Rotation axis_angle={aa}>"


def rodrigues(axis_angle):
    """Rotation of an axis-angle vector through Rodrigues' formula.

    Parameters
    ----------
    axis_angle : array-like of shape (3,)
        Rotation axis scaled by the angle in radians.

    Returns
    -------
    Rotation
        Exactly the identity for the zero vector.

    """
    return Rotation.from_axis_angle(axis_angle)
