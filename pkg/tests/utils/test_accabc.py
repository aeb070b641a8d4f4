#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.utils.accabc

"""


# =============================================================================
# IMPORTS
# =============================================================================

import numpy as np

import pytest

from facedrive.utils.accabc import AccessorABC


# =============================================================================
# TEST CLASSES
# =============================================================================


def test_AccessorABC():
    class FooAccessor(AccessorABC):
        _default_kind = "magnitude"
        _kinds = ("magnitude",)

        def __init__(self, v):
            self._v = v

        def magnitude(self):
            return self._v

    acc = FooAccessor(np.random.random())
    assert acc("magnitude") == acc.magnitude() == acc()


def test_AccessorABC_no__default_kind():
    with pytest.raises(TypeError):

        class FooAccessor(AccessorABC):
            pass


def test_AccessorABC_default_kind_not_listed():
    with pytest.raises(TypeError, match="is not listed"):

        class FooAccessor(AccessorABC):
            _default_kind = "channel"
            _kinds = ("magnitude",)


def test_AccessorABC_invalid_kind():
    class FooAccessor(AccessorABC):
        _default_kind = "magnitude"
        _kinds = ("magnitude",)

        def __init__(self):
            self.dont_work = None

        def magnitude(self):
            pass

        def _hidden(self):
            pass

    acc = FooAccessor()

    with pytest.raises(ValueError, match="Invalid kind"):
        acc("_hidden")

    with pytest.raises(ValueError, match="Invalid kind"):
        acc("dont_work")


def test_AccessorABC_kwargs_forwarded():
    class FooAccessor(AccessorABC):
        _default_kind = "scaled"
        _kinds = ("scaled",)

        def scaled(self, factor=1):
            return 2 * factor

    assert FooAccessor()(factor=3) == 6
