#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.drivermap.plot

"""


# =============================================================================
# IMPORTS
# =============================================================================

from matplotlib import pyplot as plt
from matplotlib.testing.decorators import check_figures_equal

import numpy as np

from PIL import Image

import pytest

from facedrive.drivermap import DriverMap, channel_label, plot


# =============================================================================
# HELPERS
# =============================================================================


def make_map(seed=0, size=6):
    random = np.random.default_rng(seed)
    tensor = random.uniform(-1, 1, size=(45, size, size))
    tensor[:, 0] = 0
    return DriverMap(tensor, sigma=0.5)


# =============================================================================
# PLOTS
# =============================================================================


@pytest.mark.slow
@check_figures_equal()
def test_DriverMapPlotter_channel(fig_test, fig_ref):
    driver_map = make_map()

    test_ax = fig_test.subplots()
    driver_map.plot.channel(3, ax=test_ax)

    exp_ax = fig_ref.subplots()
    exp_ax.imshow(driver_map.tensor[3], cmap="RdBu_r", vmin=-1.0, vmax=1.0)
    exp_ax.set_xticks([])
    exp_ax.set_yticks([])
    exp_ax.set_title(channel_label(3))


@pytest.mark.slow
@check_figures_equal()
def test_DriverMapPlotter_deformation_channel(fig_test, fig_ref):
    driver_map = make_map()
    limit = float(np.abs(driver_map.tensor[43]).max())

    test_ax = fig_test.subplots()
    driver_map.plot("channel", index=43, ax=test_ax)

    exp_ax = fig_ref.subplots()
    exp_ax.imshow(
        driver_map.tensor[43], cmap="RdBu_r", vmin=-limit, vmax=limit
    )
    exp_ax.set_xticks([])
    exp_ax.set_yticks([])
    exp_ax.set_title("deformation y")


@pytest.mark.slow
@check_figures_equal()
def test_DriverMapPlotter_magnitude(fig_test, fig_ref):
    driver_map = make_map()

    test_ax = fig_test.subplots()
    driver_map.plot(ax=test_ax, vmax=2.0)

    exp_ax = fig_ref.subplots()
    exp_ax.imshow(driver_map.magnitude, cmap="inferno", vmin=0.0, vmax=2.0)
    exp_ax.set_xticks([])
    exp_ax.set_yticks([])
    exp_ax.set_title("deformation magnitude")


def test_DriverMapPlotter_posenc_grid():
    fig = plt.figure()
    axes = make_map().plot.posenc_grid(fig=fig)
    assert axes.shape == (6, 7)
    assert axes[1, 0].get_title() == "cos x k=0"
    plt.close(fig)


def test_DriverMapPlotter_invalid_kind():
    with pytest.raises(ValueError, match="Invalid kind 'surface'"):
        make_map().plot("surface")


def test_DriverMapPlotter_is_cached():
    driver_map = make_map()
    assert driver_map.plot is driver_map.plot


# =============================================================================
# PNG EXPORT
# =============================================================================


def test_save_image(tmp_path):
    path = tmp_path / "magnitude.png"
    image = np.linspace(0, 1, 12).reshape(3, 4)
    plot.save_image(path, image, cmap="inferno", vmin=0.0, vmax=1.0)

    with Image.open(path) as loaded:
        assert loaded.format == "PNG"
        assert loaded.size == (4, 3)
