#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Pinhole camera in the OpenCV convention.

Camera space has ``x`` to the right, ``y`` down and ``z`` forward. A world
point ``p`` maps to ``p_cam = R p + t`` and to the pixel
``(fx x / z + cx, fy y / z + cy)``, where the centre of pixel ``(col, row)``
sits at ``(col + 0.5, row + 0.5)``.

"""

# =============================================================================
# IMPORTS
# =============================================================================

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..core.rotation import Rotation
from ..utils import DiffEqualityMixin, diff

# =============================================================================
# CONSTANTS
# =============================================================================

#: Points with camera-space depth at or below this value are behind the
#: camera.
NEAR_PLANE = 1e-6

#: Fraction of the image half-width covered by a head of radius 0.1 model
#: units in :py:meth:`Camera.default`.
_DEFAULT_HEAD_FILL = 0.35

_HEAD_RADIUS = 0.1


# =============================================================================
# PROJECTION
# =============================================================================


class Projection(NamedTuple):
    """Output of :py:meth:`Camera.project`."""

    #: ``(N, 2)`` pixel coordinates, NaN for points behind the camera.
    uv: np.ndarray

    #: ``(N,)`` camera-space depth.
    depth: np.ndarray

    #: ``(N,)`` booleans, True where ``depth <= NEAR_PLANE``.
    behind: np.ndarray


# =============================================================================
# CAMERA
# =============================================================================


def _as_rotation(value):
    if isinstance(value, Rotation):
        return value
    return Rotation.from_matrix(value)


def _translation_factory():
    return np.zeros(3)


@dataclass(frozen=True, eq=False, repr=False)
class Camera(DiffEqualityMixin):
    """Intrinsics, extrinsics and image size of a pinhole camera.

    Parameters
    ----------
    fx, fy : float
        Focal lengths in pixels, both > 0.
    cx, cy : float
        Principal point in pixels.
    width, height : int
        Image size in pixels, both >= 1.
    rotation : Rotation or array-like of shape (3, 3), optional
        World-to-camera rotation. Identity by default.
    translation : array-like of shape (3,), optional
        World-to-camera translation. Zero by default.

    """

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    rotation: Rotation = field(default_factory=Rotation.identity)
    translation: np.ndarray = field(default_factory=_translation_factory)

    def __post_init__(self):
        """Coerce and validate the fields."""
        setter = object.__setattr__
        for name in ("fx", "fy", "cx", "cy"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, found {value}")
            setter(self, name, value)
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(
                f"focal lengths must be positive, found fx={self.fx} "
                f"fy={self.fy}"
            )

        for name in ("width", "height"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(
                    f"{name} must be a positive integer, found {value!r}"
                )
            setter(self, name, int(value))

        setter(self, "rotation", _as_rotation(self.rotation))

        translation = np.array(self.translation, dtype=float)
        if translation.shape != (3,) or not np.all(np.isfinite(translation)):
            raise ValueError(
                "translation must be a finite 3-vector, found "
                f"{self.translation!r}"
            )
        translation.flags.writeable = False
        setter(self, "translation", translation)

    # CONSTRUCTORS ============================================================

    @classmethod
    def default(cls, width=512, height=512, distance=0.6):
        """Camera looking at a ~0.1 unit head at the origin facing ``+z``.

        The camera sits at ``(0, 0, distance)`` looking down ``-z`` with
        the image ``y`` axis pointing to world ``-y``.

        """
        if distance <= _HEAD_RADIUS:
            raise ValueError(
                f"distance must exceed {_HEAD_RADIUS}, found {distance}"
            )
        focal = _DEFAULT_HEAD_FILL * min(width, height) * distance
        focal /= _HEAD_RADIUS
        return cls(
            fx=focal,
            fy=focal,
            cx=width / 2.0,
            cy=height / 2.0,
            width=width,
            height=height,
            rotation=Rotation.from_axis_angle([np.pi, 0.0, 0.0]),
            translation=[0.0, 0.0, distance],
        )

    def with_resolution(self, width, height):
        """Same view rendered at another image size.

        Focal lengths and principal point are rescaled per axis.

        """
        sx, sy = width / self.width, height / self.height
        return Camera(
            fx=self.fx * sx,
            fy=self.fy * sy,
            cx=self.cx * sx,
            cy=self.cy * sy,
            width=width,
            height=height,
            rotation=self.rotation,
            translation=self.translation,
        )

    def pad(self, pixels):
        """Enlarge the canvas by ``pixels`` on every side.

        Every original pixel keeps its content; it moves to
        ``(col + pixels, row + pixels)``.

        """
        if int(pixels) != pixels or pixels < 0:
            raise ValueError(
                f"pixels must be a non-negative integer, found {pixels!r}"
            )
        pixels = int(pixels)
        return Camera(
            fx=self.fx,
            fy=self.fy,
            cx=self.cx + pixels,
            cy=self.cy + pixels,
            width=self.width + 2 * pixels,
            height=self.height + 2 * pixels,
            rotation=self.rotation,
            translation=self.translation,
        )

    # PROJECTION ==============================================================

    @property
    def resolution(self):
        """``(width, height)`` tuple."""
        return self.width, self.height

    def to_camera(self, points):
        """World ``(N, 3)`` points to camera space."""
        points = np.asarray(points, dtype=float)
        return self.rotation.apply(points) + self.translation

    def project(self, points):
        """Project world points to pixel coordinates.

        Parameters
        ----------
        points : array-like of shape (N, 3)

        Returns
        -------
        Projection
            Pixel coordinates, depth and the behind-camera flags.

        """
        cam = self.to_camera(points)
        depth = cam[..., 2]
        behind = depth <= NEAR_PLANE
        safe = np.where(behind, 1.0, depth)
        u = self.fx * cam[..., 0] / safe + self.cx
        v = self.fy * cam[..., 1] / safe + self.cy
        uv = np.stack([u, v], axis=-1)
        uv[behind] = np.nan
        return Projection(uv=uv, depth=depth, behind=behind)

    # IO ======================================================================

    def to_dict(self):
        """JSON-compatible representation."""
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "rotation": self.rotation.as_matrix().tolist(),
            "translation": self.translation.tolist(),
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, data):
        """Inverse of :py:meth:`to_dict`."""
        missing = [
            key for key in cls.__dataclass_fields__ if key not in data
        ]
        if missing:
            raise ValueError(f"camera is missing the keys {missing}")
        return cls(**{key: data[key] for key in cls.__dataclass_fields__})

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare intrinsics, extrinsics and image size."""

        def close(left, right):
            return bool(
                np.allclose(
                    np.asarray(left, dtype=float),
                    np.asarray(right, dtype=float),
                    rtol=rtol,
                    atol=atol,
                    equal_nan=equal_nan,
                )
            )

        def rotation_cmp(left, right):
            return close(left.as_matrix(), right.as_matrix())

        return diff(
            self,
            other,
            fx=close,
            fy=close,
            cx=close,
            cy=close,
            width=np.equal,
            height=np.equal,
            rotation=rotation_cmp,
            translation=close,
        )

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return (
            f"<Camera {self.width}x{self.height} fx={self.fx:.6g} "
            f"fy={self.fy:.6g} cx={self.cx:.6g} cy={self.cy:.6g}>"
        )
