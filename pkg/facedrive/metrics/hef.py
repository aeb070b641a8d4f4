#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Head Expression Follow (HEF).

HEF compares expression *effects* in a shared rendering context. For every
frame the target's identity, pose and camera are kept; two deformation
maps are rasterised on the target's posed mesh:

- the target map carries ``B_E(ψ_tgt) / σ``;
- the substituted map carries ``B_E(ψ_pred) / σ``.

Both maps occupy the same pixels, so the score, the mean absolute
difference over the covered pixels and the 3 deformation channels,
depends only on the expression residual. Lower is better; the unit is the
normalised deformation.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
import warnings

import numpy as np

from ._metrics_base import MetricABC, MetricReport
from ..core.clip import PoseParams
from ..drivermap import encode_template, head_faces
from ..model import (
    evaluate_mesh,
    expression_offset,
    joint_rotation_matrices,
    linear_blend_skinning,
)
from ..render import interpolate_attribute, rasterize
from ..utils import doc_inherit, thread_map

# =============================================================================
# CONSTANTS
# =============================================================================

logger = logging.getLogger(__name__)


# =============================================================================
# ERRORS
# =============================================================================


class EmptyMaskError(ValueError):
    """The target mesh covers no pixel of the image."""


# =============================================================================
# RESIDUALS
# =============================================================================


def _padded(assets, deformation, n_total):
    out = np.zeros((n_total, 3))
    out[: assets.n_vertices] = deformation
    return out


def articulated_displacement(assets, shaped_vertices, rest_joints, pose):
    """Rest-space displacement produced by the jaw and eye rotations alone.

    The identity-shaped rest vertices are skinned with every joint at rest
    except jaw and eyes; the result minus the rest vertices is returned,
    shape ``(N_v, 3)``.

    """
    articulation = PoseParams(
        jaw_rotation=pose.jaw_rotation, eye_rotations=pose.eye_rotations
    )
    skinned = linear_blend_skinning(
        shaped_vertices,
        rest_joints,
        joint_rotation_matrices(assets, articulation),
        assets.blend_weights,
        parents=assets.joint_parents,
    )
    return skinned - shaped_vertices


def hef_vertex_residual(assets, target_expression, pred_expression):
    """Per-vertex normalised residual ``(B_E(ψ_tgt) - B_E(ψ_pred)) / σ``.

    Inner-mouth rows are zero. The result does not depend on the identity,
    pose or camera of either frame.

    Returns
    -------
    numpy.ndarray of shape (N_total, 3)

    """
    n_total = assets.n_total_vertices
    target = expression_offset(assets, target_expression)
    pred = expression_offset(assets, pred_expression)
    residual = _padded(assets, target - pred, n_total)
    return residual / assets.expression_sigma


def _masked_score(raster, target, substituted):
    target_map = interpolate_attribute(raster, target)
    substituted_map = interpolate_attribute(raster, substituted)
    covered = raster.coverage
    residual = np.abs(target_map[covered] - substituted_map[covered])
    return float(residual.mean(axis=-1).mean())


def _check_encoded(assets, encoded):
    # consistency guard only; the score never reads the encoding
    if encoded.n_vertices != assets.n_total_vertices:
        raise ValueError(
            f"encoded template has {encoded.n_vertices} vertices, "
            f"assets have {assets.n_total_vertices}"
        )


def _frame_scores(
    assets, shape, target, pred, camera, articulated=False, n_threads=None
):
    sigma = assets.expression_sigma
    mesh = evaluate_mesh(assets, shape, target.expression, target)
    faces = head_faces(assets, mesh.faces, mesh.n_vertices)
    raster = rasterize(mesh.vertices, faces, camera, n_threads=n_threads)
    if not raster.coverage.any():
        raise EmptyMaskError("the target mesh covers no pixel")

    target_attr = mesh.expr_deformation / sigma
    pred_deformation = expression_offset(assets, pred.expression)
    pred_attr = _padded(assets, pred_deformation, mesh.n_vertices) / sigma
    score = _masked_score(raster, target_attr, pred_attr)
    if not articulated:
        return score, None

    shaped, joints = mesh.shaped_vertices, mesh.rest_joints
    target_art = articulated_displacement(assets, shaped, joints, target)
    pred_art = articulated_displacement(assets, shaped, joints, pred)
    target_attr = target_attr + _padded(
        assets, target_art / sigma, mesh.n_vertices
    )
    pred_attr = pred_attr + _padded(assets, pred_art / sigma, mesh.n_vertices)
    return score, _masked_score(raster, target_attr, pred_attr)


# =============================================================================
# FUNCTIONS
# =============================================================================


def hef_frame(
    assets,
    encoded,
    shape,
    target,
    pred,
    camera,
    *,
    articulated=False,
    n_threads=None,
):
    """HEF of a single frame.

    Parameters
    ----------
    assets : FaceModelAssets
    encoded : EncodedTemplate
        Encoding of the same assets. HEF compares deformations only, so
        the encoding is not read; its vertex count is checked against the
        assets to catch a template from another model.
    shape : array-like
        Target identity β.
    target : FrameParams
        Target expression and pose; its geometry defines the mask.
    pred : FrameParams
        Predicted expression. Only ψ, jaw and eyes are read.
    camera : Camera
        Target camera.
    articulated : bool, optional
        Return ``(score, articulated_score)`` where the second value also
        counts the rigid displacement of jaw and eye rotations.

    Returns
    -------
    float or tuple of float

    Raises
    ------
    EmptyMaskError
        When the face is fully off-screen.

    """
    _check_encoded(assets, encoded)
    score, articulated_score = _frame_scores(
        assets, shape, target, pred, camera, articulated, n_threads
    )
    if articulated:
        return score, articulated_score
    return score


def hef(
    assets,
    encoded,
    target_clip,
    pred_clip,
    *,
    articulated=False,
    sample_id="sample",
    n_threads=None,
):
    """HEF of a clip pair.

    The target clip fixes identity, camera and per-frame pose. Frames whose
    mask is empty score NaN, are listed in ``extra_.empty_frames`` and are
    left out of the mean with a warning.

    Returns
    -------
    MetricReport

    """
    values, extra = hef_values(
        assets,
        encoded,
        target_clip,
        pred_clip,
        articulated=articulated,
        n_threads=n_threads,
    )
    return MetricReport("hef", values, sample_id=sample_id, extra=extra)


def hef_values(
    assets,
    encoded,
    target_clip,
    pred_clip,
    *,
    articulated=False,
    n_threads=None,
):
    """Per-frame HEF values and extra information of a clip pair."""
    if target_clip.n_frames != pred_clip.n_frames:
        raise ValueError(
            f"frame count mismatch: target has {target_clip.n_frames} "
            f"frames, prediction has {pred_clip.n_frames}"
        )
    target_clip.check_assets(assets)
    pred_clip.check_assets(assets)

    _check_encoded(assets, encoded)

    def score(index):
        try:
            return _frame_scores(
                assets,
                target_clip.shape,
                target_clip.frames[index],
                pred_clip.frames[index],
                target_clip.camera,
                articulated,
                n_threads=1,
            )
        except EmptyMaskError:
            return np.nan, np.nan

    scores = thread_map(
        score, range(target_clip.n_frames), n_threads=n_threads
    )
    values = np.array([plain for plain, _ in scores])
    empty = [int(i) for i in np.flatnonzero(np.isnan(values))]
    if empty:
        warnings.warn(
            f"{len(empty)} frame(s) without covered pixels "
            f"excluded from HEF: {empty}"
        )
    logger.debug("HEF over %d frames, %d empty", len(values), len(empty))

    extra = {"empty_frames": empty}
    if articulated:
        articulated_values = np.array([art for _, art in scores])
        extra["articulated"] = articulated_values
        extra["articulated_mean"] = (
            float(np.nanmean(articulated_values))
            if len(empty) < len(values)
            else float("nan")
        )
    return values, extra


# =============================================================================
# METRIC CLASS
# =============================================================================


class ExpressionFollow(MetricABC):
    """Head Expression Follow metric on clip bundles.

    Parameters
    ----------
    assets : FaceModelAssets
        Face model both clips were fitted with.
    articulated : bool, optional
        Also report the score with jaw and eye articulation.
    n_threads : int, optional
        Frame-parallel workers.

    """

    _facedrive_parameters = ["assets", "articulated", "n_threads"]
    _metric_name = "hef"

    def __init__(self, assets, articulated=False, n_threads=None):
        self._assets = assets
        self._articulated = bool(articulated)
        self._n_threads = n_threads
        self._encoded = encode_template(assets)

    @property
    def assets(self):
        """Face model assets."""
        return self._assets

    @property
    def articulated(self):
        """Whether the articulated score is reported."""
        return self._articulated

    @property
    def n_threads(self):
        """Worker thread cap."""
        return self._n_threads

    @doc_inherit(MetricABC._evaluate_clips)
    def _evaluate_clips(self, target, pred):
        return hef_values(
            self._assets,
            self._encoded,
            target,
            pred,
            articulated=self._articulated,
            n_threads=self._n_threads,
        )
