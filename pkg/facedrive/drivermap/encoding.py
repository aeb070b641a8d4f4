#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Sinusoidal encoding of template-space vertex coordinates."""

# =============================================================================
# IMPORTS
# =============================================================================

from dataclasses import dataclass

import numpy as np

from ..model import template_with_inner_mouth

# =============================================================================
# CONSTANTS
# =============================================================================

#: Frequency octaves per axis and function.
DEFAULT_OCTAVES = 7

AXES = ("x", "y", "z")


# =============================================================================
# ENCODING
# =============================================================================


def positional_encoding(points, octaves=DEFAULT_OCTAVES):
    """Axis-grouped sin/cos features of 3D points.

    For each axis the ``2 * octaves`` channels are
    ``sin(2^0 p) ... sin(2^(octaves-1) p)`` followed by
    ``cos(2^0 p) ... cos(2^(octaves-1) p)``; the axes follow in ``x, y, z``
    order.

    Parameters
    ----------
    points : array-like of shape (..., 3)
    octaves : int, optional

    Returns
    -------
    numpy.ndarray of shape (..., 6 * octaves)

    """
    points = np.asarray(points, dtype=float)
    if points.shape[-1:] != (3,):
        raise ValueError(
            f"points must have 3 coordinates, found shape {points.shape}"
        )
    if octaves < 1:
        raise ValueError(f"octaves must be >= 1, found {octaves}")

    frequencies = 2.0 ** np.arange(octaves)
    scaled = points[..., :, None] * frequencies  # (..., 3, octaves)
    features = np.concatenate([np.sin(scaled), np.cos(scaled)], axis=-1)
    return features.reshape(points.shape[:-1] + (6 * octaves,))


def channel_label(index, octaves=DEFAULT_OCTAVES):
    """Human readable name of an encoding channel, e.g. ``"sin y k=3"``."""
    per_axis = 2 * octaves
    axis, rest = divmod(int(index), per_axis)
    function, octave = divmod(rest, octaves)
    if not 0 <= axis < 3:
        raise IndexError(f"channel {index} out of range")
    return f"{('sin', 'cos')[function]} {AXES[axis]} k={octave}"


# =============================================================================
# TEMPLATE
# =============================================================================


@dataclass(frozen=True, eq=False)
class EncodedTemplate:
    """Positional encoding of the normalised rest template.

    Parameters
    ----------
    per_vertex_pe : array of shape (N, 6 * octaves)
    mean : array of shape (3,)
        Centroid removed before scaling.
    scale : float
        Largest absolute centred coordinate.
    normalized : array of shape (N, 3)
        ``(template - mean) / scale``, every coordinate in [-1, 1].

    """

    per_vertex_pe: np.ndarray
    mean: np.ndarray
    scale: float
    normalized: np.ndarray

    @property
    def n_vertices(self):
        """Encoded vertex count."""
        return len(self.per_vertex_pe)

    @property
    def n_channels(self):
        """Encoding channel count."""
        return self.per_vertex_pe.shape[1]


def normalize_template(template_vertices, octaves=DEFAULT_OCTAVES):
    """Mean-centre and max-normalise a template, then encode it.

    Raises
    ------
    ValueError
        For an empty template or one whose vertices all coincide.

    """
    vertices = np.asarray(template_vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 3 or not len(vertices):
        raise ValueError(
            f"expected a non-empty (N, 3) array, found {vertices.shape}"
        )
    mean = vertices.mean(axis=0)
    centred = vertices - mean
    scale = float(np.abs(centred).max())
    if scale == 0:
        raise ValueError("degenerate template: all vertices coincide")
    normalized = centred / scale

    encoding = positional_encoding(normalized, octaves=octaves)
    for array in (mean, normalized, encoding):
        array.flags.writeable = False
    return EncodedTemplate(
        per_vertex_pe=encoding,
        mean=mean,
        scale=scale,
        normalized=normalized,
    )


def encode_template(assets, octaves=DEFAULT_OCTAVES):
    """Encode the rest template of ``assets``, inner mouth included."""
    return normalize_template(template_with_inner_mouth(assets), octaves)
