#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.core.methods

"""


# =============================================================================
# IMPORTS
# =============================================================================

import pytest

from facedrive.core import methods


# =============================================================================
# TESTS
# =============================================================================


def test_FDMethodABC_no__facedrive_kind():
    with pytest.raises(TypeError, match="_facedrive_kind"):

        class Foo(methods.FDMethodABC):
            pass


def test_FDMethodABC_no__facedrive_parameters():
    with pytest.raises(TypeError, match="_facedrive_parameters"):

        class Foo(methods.FDMethodABC):
            _facedrive_kind = "metric"

            def __init__(self, **kwargs):
                pass


def test_FDMethodABC_params_not_in_init():
    with pytest.raises(TypeError, match="not arguments of __init__"):

        class Foo(methods.FDMethodABC):
            _facedrive_kind = "metric"
            _facedrive_parameters = ["window"]

            def __init__(self, **kwargs):
                pass


def test_FDMethodABC_abstract_class_skips_validation():
    class Base(methods.FDMethodABC):
        _facedrive_abstract_class = True

    class Foo(Base):
        _facedrive_kind = "sampler"
        _facedrive_parameters = []

    assert Foo._facedrive_kind == "sampler"
    assert Foo._facedrive_parameters == ()


class Window(methods.FDMethodABC):
    _facedrive_kind = "metric"
    _facedrive_parameters = ["window", "seed"]

    def __init__(self, window=2, seed=None):
        self.window = window
        self.seed = seed


def test_FDMethodABC_repr():
    assert repr(Window(window=3, seed=1)) == "Window(window=3, seed=1)"


def test_FDMethodABC_get_method_name():
    assert Window().get_method_name() == "Window"


def test_FDMethodABC_get_parameters():
    assert Window(window=4).get_parameters() == {"window": 4, "seed": None}


def test_FDMethodABC_copy():
    original = Window(window=4, seed=[1, 2])
    clone = original.copy()

    assert clone is not original
    assert clone.get_parameters() == original.get_parameters()
    assert clone.seed is not original.seed


def test_FDMethodABC_copy_override():
    clone = Window(window=4).copy(seed=9)
    assert clone.get_parameters() == {"window": 4, "seed": 9}


def test_FDMethodABC_copy_unknown_parameter():
    with pytest.raises(TypeError, match="Unknown parameters"):
        Window().copy(sigma=1.0)
