#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Head Pose Follow (HPF).

HPF measures how faithfully a generated clip follows the driver's head
motion. Per frame, the visible head rotation composes the global and neck
rotations; both trajectories are re-anchored to their first frame and the
geodesic angle between the anchored rotations is averaged over the clip.
Lower is better; the unit is degrees.

Anchoring to the first frame removes the constant camera offset between a
generated clip and its driver, and keeps the metric sensitive to slow
accumulated drift.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import numpy as np

from ._metrics_base import MetricABC, MetricReport
from ..core.rotation import Rotation, quaternion_multiply
from ..utils import doc_inherit

# =============================================================================
# CONSTANTS
# =============================================================================

#: ``"spatial"``: ``R_t R_0^T``; ``"body"``: ``R_0^T R_t``.
DELTA_CONVENTIONS = ("spatial", "body")

_CONJUGATE = np.array([1.0, -1.0, -1.0, -1.0])


# =============================================================================
# TRAJECTORY
# =============================================================================


def compose_head_rotation(global_rotation, neck_rotation):
    """Visible head rotation ``R(global) @ R(neck)``."""
    return Rotation.from_axis_angle(global_rotation) @ (
        Rotation.from_axis_angle(neck_rotation)
    )


class PoseTrajectory:
    """Per-frame head rotations of a clip.

    Parameters
    ----------
    rotations : iterable of Rotation
        At least one.

    """

    def __init__(self, rotations):
        rotations = tuple(rotations)
        if not rotations:
            raise ValueError("a pose trajectory needs at least one frame")
        for index, rotation in enumerate(rotations):
            if not isinstance(rotation, Rotation):
                raise TypeError(
                    f"frame {index}: expected a Rotation, "
                    f"found {type(rotation).__name__}"
                )
        self._rotations = rotations

    @classmethod
    def from_clip(cls, clip):
        """Head rotations of every frame of a ``ClipBundle``."""
        return cls(
            compose_head_rotation(frame.global_rotation, frame.neck_rotation)
            for frame in clip.frames
        )

    @classmethod
    def from_matrices(cls, matrices):
        """Build from a ``(T, 3, 3)`` array."""
        return cls(Rotation.from_matrix(matrix) for matrix in matrices)

    @property
    def rotations(self):
        """Tuple of per-frame rotations."""
        return self._rotations

    def as_matrices(self):
        """``(T, 3, 3)`` array."""
        return np.stack([rotation.as_matrix() for rotation in self])

    def premultiply(self, offset):
        """Trajectory with every rotation left-multiplied by ``offset``."""
        return PoseTrajectory(offset @ rotation for rotation in self)

    def __len__(self):
        """Frame count."""
        return len(self._rotations)

    def __iter__(self):
        """Iterate over the rotations."""
        return iter(self._rotations)

    def __getitem__(self, index):
        """Rotation of one frame."""
        return self._rotations[index]

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return f"<PoseTrajectory T={len(self)}>"


# =============================================================================
# FUNCTIONS
# =============================================================================


def delta_rotations(trajectory, convention="body"):
    """Rotations relative to the first frame.

    Parameters
    ----------
    trajectory : PoseTrajectory
    convention : {"spatial", "body"}, optional
        ``"spatial"`` returns ``R_t R_0^T`` and ``"body"`` returns
        ``R_0^T R_t`` (default). Only the body form is unchanged by a
        constant rotation left-multiplied on every frame; the spatial form
        is conjugated by it and cancels the offset only when both clips
        share it.

    Returns
    -------
    list of Rotation
        The first entry is exactly the identity.

    """
    if convention not in DELTA_CONVENTIONS:
        raise ValueError(
            f"Invalid convention {convention!r}. "
            f"Choose from: {', '.join(DELTA_CONVENTIONS)}"
        )
    if not len(trajectory):
        raise ValueError("empty trajectory")

    anchor_inv = trajectory[0].inv()
    deltas = [Rotation.identity()]
    for rotation in trajectory.rotations[1:]:
        if convention == "spatial":
            deltas.append(rotation @ anchor_inv)
        else:
            deltas.append(anchor_inv @ rotation)
    return deltas


def geodesic_degrees(a, b):
    """Geodesic distance on SO(3) in degrees, in ``[0, 180]``.

    Computed from the relative quaternion ``conj(q_a) * q_b`` as
    ``2 atan2(|vec|, |w|)``, which equals ``2 arccos(|q_a . q_b|)``
    and is blind to the quaternion sign.

    """
    relative = quaternion_multiply(
        a.as_quaternion() * _CONJUGATE, b.as_quaternion()
    )
    half = np.arctan2(np.linalg.norm(relative[1:]), np.abs(relative[0]))
    return float(np.rad2deg(2.0 * half))


def hpf_values(pred, target, convention="body"):
    """Per-frame HPF in degrees; the first value is 0."""
    if len(pred) != len(target):
        raise ValueError(
            f"frame count mismatch: prediction has {len(pred)} frames, "
            f"target has {len(target)}"
        )
    pred_deltas = delta_rotations(pred, convention)
    target_deltas = delta_rotations(target, convention)
    return np.array(
        [geodesic_degrees(p, t) for p, t in zip(pred_deltas, target_deltas)]
    )


def hpf(pred, target, convention="body", sample_id="sample"):
    """Head Pose Follow of two trajectories.

    Parameters
    ----------
    pred, target : PoseTrajectory
        Equal lengths.
    convention : {"spatial", "body"}, optional
        See :py:func:`delta_rotations`.
    sample_id : str, optional

    Returns
    -------
    MetricReport
        Per-frame degrees; the mean includes frame 0.

    """
    values = hpf_values(pred, target, convention)
    return MetricReport(
        "hpf", values, sample_id=sample_id, extra={"convention": convention}
    )


# =============================================================================
# METRIC CLASS
# =============================================================================


class HeadPoseFollow(MetricABC):
    """Head Pose Follow metric on clip bundles.

    Parameters
    ----------
    convention : {"spatial", "body"}, optional
        Delta convention, see :py:func:`delta_rotations`.

    """

    _facedrive_parameters = ["convention"]
    _metric_name = "hpf"

    def __init__(self, convention="body"):
        if convention not in DELTA_CONVENTIONS:
            raise ValueError(
                f"Invalid convention {convention!r}. "
                f"Choose from: {', '.join(DELTA_CONVENTIONS)}"
            )
        self._convention = convention

    @property
    def convention(self):
        """Delta convention."""
        return self._convention

    @doc_inherit(MetricABC._evaluate_clips)
    def _evaluate_clips(self, target, pred):
        values = hpf_values(
            PoseTrajectory.from_clip(pred),
            PoseTrajectory.from_clip(target),
            self._convention,
        )
        return values, {"convention": self._convention}
