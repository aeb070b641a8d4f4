#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Face forward model: blendshapes, skinning and the inner mouth."""

# =============================================================================
# IMPORTS
# =============================================================================

from .face_model import (
    FaceModel,
    PosedMesh,
    evaluate_mesh,
    expression_offset,
    joint_rotation_matrices,
    linear_blend_skinning,
    pose_corrective_offset,
    pose_feature,
    regress_joints,
    shape_offset,
    skinning_transforms,
    template_with_inner_mouth,
)
from .inner_mouth import extend_inner_mouth, hemisphere, inner_mouth_rest

# =============================================================================
# ALL
# =============================================================================

__all__ = [
    "FaceModel",
    "PosedMesh",
    "evaluate_mesh",
    "expression_offset",
    "joint_rotation_matrices",
    "linear_blend_skinning",
    "pose_corrective_offset",
    "pose_feature",
    "regress_joints",
    "shape_offset",
    "skinning_transforms",
    "template_with_inner_mouth",
    "extend_inner_mouth",
    "hemisphere",
    "inner_mouth_rest",
]
