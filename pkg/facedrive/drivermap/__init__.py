#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Template-space driver maps and retargeting."""

# =============================================================================
# IMPORTS
# =============================================================================

from .builder import (
    BROADCAST_GRID,
    DriverMap,
    DriverMapBuilder,
    DriverMapMode,
    N_CHANNELS,
    N_DEFORMATION_CHANNELS,
    N_POSENC_CHANNELS,
    build_driver_map,
    build_driver_map_sequence,
    head_faces,
    hash_to_words,
    raw_vector_broadcast,
    retarget,
    retarget_clip,
    sample_driver_values,
    vertex_attributes,
    words_to_hash,
)
from .encoding import (
    DEFAULT_OCTAVES,
    EncodedTemplate,
    channel_label,
    encode_template,
    normalize_template,
    positional_encoding,
)
from .plot import DriverMapPlotter, save_image


__all__ = [
    "BROADCAST_GRID",
    "DriverMap",
    "DriverMapBuilder",
    "DriverMapMode",
    "N_CHANNELS",
    "N_DEFORMATION_CHANNELS",
    "N_POSENC_CHANNELS",
    "build_driver_map",
    "build_driver_map_sequence",
    "head_faces",
    "hash_to_words",
    "raw_vector_broadcast",
    "retarget",
    "retarget_clip",
    "sample_driver_values",
    "vertex_attributes",
    "words_to_hash",
    "DEFAULT_OCTAVES",
    "EncodedTemplate",
    "channel_label",
    "encode_template",
    "normalize_template",
    "positional_encoding",
    "DriverMapPlotter",
    "save_image",
]
