#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Shared fixtures of the facedrive test suite.

"""


# =============================================================================
# IMPORTS
# =============================================================================

import functools

import matplotlib as mpl

import pytest

from facedrive.core import (
    generate_synthetic_assets,
    generate_synthetic_clip,
    generate_synthetic_corpus,
)
from facedrive.drivermap import encode_template
from facedrive.render import Camera


# =============================================================================
# CONSTANTS
# =============================================================================

#: Sizes of the assets used across the suite; an icosphere count keeps the
#: mesh regular.
SMALL_ASSETS = {"n_vertices": 642, "n_beta": 10, "n_psi": 12, "n_joints": 5}


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture(scope="session")
def make_assets():
    @functools.lru_cache(maxsize=None)
    def make(seed=0, inner_mouth_count=40, **kwargs):
        sizes = dict(SMALL_ASSETS, **kwargs)
        return generate_synthetic_assets(
            seed=seed, inner_mouth_count=inner_mouth_count, **sizes
        )

    return make


@pytest.fixture(scope="session")
def make_encoded(make_assets):
    @functools.lru_cache(maxsize=None)
    def make(seed=0, **kwargs):
        return encode_template(make_assets(seed=seed, **kwargs))

    return make


@pytest.fixture(scope="session")
def make_camera():
    def make(width=48, height=48, distance=0.6):
        return Camera.default(width=width, height=height, distance=distance)

    return make


@pytest.fixture(scope="session")
def make_clip(make_assets):
    def make(seed=0, n_frames=4, width=48, height=48, assets=None, **kwargs):
        assets = make_assets() if assets is None else assets
        return generate_synthetic_clip(
            assets,
            seed=seed,
            n_frames=n_frames,
            width=width,
            height=height,
            **kwargs,
        )

    return make


@pytest.fixture(scope="session")
def make_corpus(make_assets):
    def make(n_clips=6, n_frames=6, seed=0, width=32, height=32):
        return generate_synthetic_corpus(
            make_assets(),
            n_clips,
            n_frames=n_frames,
            seed=seed,
            width=width,
            height=height,
        )

    return make


# =============================================================================
# CI
# =============================================================================


mpl.use("Agg")
