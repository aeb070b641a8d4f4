#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Plot helper for the DriverMap object."""

# =============================================================================
# IMPORTS
# =============================================================================

import matplotlib.pyplot as plt

import numpy as np

from .encoding import channel_label
from ..utils import AccessorABC, atomic_write

# =============================================================================
# CONSTANTS
# =============================================================================

#: Diverging colormap of the encoding and deformation channels.
CHANNEL_CMAP = "RdBu_r"

#: Sequential colormap of the deformation magnitude.
MAGNITUDE_CMAP = "inferno"


# =============================================================================
# PLOTTER OBJECT
# =============================================================================


class DriverMapPlotter(AccessorABC):
    """DriverMap plot utilities.

    Kind of plot to produce:

    - 'magnitude' : per-pixel deformation norm (default).
    - 'channel' : a single channel.
    - 'posenc_grid' : every encoding channel, one row per axis and function.

    """

    _default_kind = "magnitude"
    _kinds = ("magnitude", "channel", "posenc_grid")

    def __init__(self, driver_map):
        self._map = driver_map

    def _axes(self, ax):
        if ax is None:
            ax = plt.gca()
        ax.set_xticks([])
        ax.set_yticks([])
        return ax

    # PLOTS ===================================================================

    def channel(self, index=0, ax=None, **kwargs):
        """Draw channel ``index`` with a symmetric diverging colormap.

        Encoding channels use the range [-1, 1]; deformation channels a
        range symmetric around 0 set by their largest absolute value.

        """
        image = self._map.tensor[index]
        if index < self._map.n_posenc_channels:
            limit = 1.0
            title = channel_label(index)
        else:
            limit = float(np.abs(image).max()) or 1.0
            axis = "xyz"[index - self._map.n_posenc_channels]
            title = f"deformation {axis}"
        kwargs.setdefault("cmap", CHANNEL_CMAP)
        kwargs.setdefault("vmin", -limit)
        kwargs.setdefault("vmax", limit)
        ax = self._axes(ax)
        ax.imshow(image, **kwargs)
        ax.set_title(title)
        return ax

    def magnitude(self, vmax=None, ax=None, **kwargs):
        """Draw the deformation magnitude in normalised units."""
        image = self._map.magnitude
        if vmax is None:
            vmax = float(image.max()) or 1.0
        kwargs.setdefault("cmap", MAGNITUDE_CMAP)
        ax = self._axes(ax)
        ax.imshow(image, vmin=0.0, vmax=vmax, **kwargs)
        ax.set_title("deformation magnitude")
        return ax

    def posenc_grid(self, fig=None, **kwargs):
        """Draw the encoding channels on a (6, octaves) grid."""
        n_channels = self._map.n_posenc_channels
        octaves = n_channels // 6
        if fig is None:
            fig = plt.figure(figsize=(octaves * 1.5, 9))
        axes = fig.subplots(6, octaves, squeeze=False)
        for index, ax in enumerate(axes.ravel()):
            self.channel(index, ax=ax, **kwargs)
            ax.set_title(channel_label(index, octaves), fontsize=6)
        return axes


# =============================================================================
# PNG EXPORT
# =============================================================================


def save_image(path, image, cmap, vmin, vmax):
    """Write a 2D array as a color-mapped PNG, atomically."""
    with atomic_write(path, "wb") as fp:
        plt.imsave(fp, image, cmap=cmap, vmin=vmin, vmax=vmax, format="png")
