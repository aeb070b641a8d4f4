#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Pinhole camera and software rasteriser."""

# =============================================================================
# IMPORTS
# =============================================================================

from .camera import NEAR_PLANE, Camera, Projection
from .raster import (
    RasterBuffer,
    depth_image,
    face_index_image,
    interpolate_attribute,
    locate_points,
    rasterize,
    write_pgm,
)

# =============================================================================
# ALL
# =============================================================================

__all__ = [
    "NEAR_PLANE",
    "Camera",
    "Projection",
    "RasterBuffer",
    "depth_image",
    "face_index_image",
    "interpolate_attribute",
    "locate_points",
    "rasterize",
    "write_pgm",
]
