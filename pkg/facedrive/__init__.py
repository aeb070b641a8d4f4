#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""facedrive builds template-space driver maps from parametric face \
models and measures how well generated talking heads follow them."""

# =============================================================================
# IMPORTS
# =============================================================================

import importlib_metadata

from .container import TensorContainer
from .core import ClipBundle, FaceModelAssets, generate_synthetic_assets
from .drivermap import DriverMap, DriverMapBuilder
from .metrics import ExpressionFollow, HEFCalibrator, HeadPoseFollow
from .model import FaceModel


# =============================================================================
# CONSTANTS
# =============================================================================

__all__ = [
    "TensorContainer",
    "ClipBundle",
    "FaceModelAssets",
    "generate_synthetic_assets",
    "DriverMap",
    "DriverMapBuilder",
    "ExpressionFollow",
    "HEFCalibrator",
    "HeadPoseFollow",
    "FaceModel",
]


NAME = "facedrive"

DOC = __doc__

VERSION = importlib_metadata.version(NAME)

__version__ = tuple(VERSION.split("."))


del importlib_metadata
