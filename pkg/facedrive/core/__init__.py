#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Core data types: rotations, face-model assets and clip bundles."""

# =============================================================================
# IMPORTS
# =============================================================================

from .assets import (
    DEFAULT_EXPRESSION_SIGMA,
    HEAD_JOINT_NAMES,
    FaceModelAssets,
    expression_coefficient_scale,
    generate_synthetic_assets,
    icosphere,
    sphere_mesh,
)
from .clip import (
    ClipBundle,
    ClipSchemaError,
    FrameParams,
    PoseParams,
    generate_synthetic_clip,
    generate_synthetic_corpus,
    load_clip_bundle,
    save_clip_bundle,
)
from .methods import FDMethodABC
from .rotation import Rotation, rodrigues

# =============================================================================
# ALL
# =============================================================================

__all__ = [
    "DEFAULT_EXPRESSION_SIGMA",
    "HEAD_JOINT_NAMES",
    "FaceModelAssets",
    "expression_coefficient_scale",
    "generate_synthetic_assets",
    "icosphere",
    "sphere_mesh",
    "ClipBundle",
    "ClipSchemaError",
    "FrameParams",
    "PoseParams",
    "generate_synthetic_clip",
    "generate_synthetic_corpus",
    "load_clip_bundle",
    "save_clip_bundle",
    "FDMethodABC",
    "Rotation",
    "rodrigues",
]
