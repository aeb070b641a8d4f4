#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.utils.bunch

"""


# =============================================================================
# IMPORTS
# =============================================================================

import copy
import pickle

import pytest

from facedrive.utils import bunch


# =============================================================================
# TEST Bunch
# =============================================================================


def test_Bunch_creation():
    md = bunch.Bunch("extra", {"alfa": 1})
    assert md["alfa"] == md.alfa == 1
    assert len(md) == 1
    assert md.name == "extra"


def test_Bunch_creation_empty():
    md = bunch.Bunch("extra", {})
    assert len(md) == 0


def test_Bunch_creation_not_mapping():
    with pytest.raises(TypeError, match="must be a mapping"):
        bunch.Bunch("extra", [1, 2])


def test_Bunch_key_notfound():
    md = bunch.Bunch("extra", {"alfa": 1})
    with pytest.raises(KeyError):
        md["bravo"]


def test_Bunch_attribute_notfound():
    md = bunch.Bunch("extra", {"alfa": 1})
    with pytest.raises(AttributeError):
        md.bravo


def test_Bunch_iter():
    md = bunch.Bunch("extra", {"alfa": 1})
    assert list(iter(md)) == ["alfa"]


def test_Bunch_repr():
    md = bunch.Bunch("extra", {"ratio": 0.25, "n_valid": 16})
    assert repr(md) == "<extra {n_valid, ratio}>"


def test_Bunch_dir():
    md = bunch.Bunch("extra", {"alfa": 1})
    assert "alfa" in dir(md)


def test_Bunch_copy_is_shallow():
    md = bunch.Bunch("extra", {"alfa": [1]})
    md_c = copy.copy(md)
    assert md is not md_c
    assert md_c.alfa is md.alfa


def test_Bunch_deepcopy():
    md = bunch.Bunch("extra", {"alfa": [1]})
    md_c = copy.deepcopy(md)

    assert md is not md_c
    assert md.name == md_c.name
    assert md_c.alfa == md.alfa and md_c.alfa is not md.alfa


def test_Bunch_pickle():
    md = bunch.Bunch("extra", {"alfa": 1})
    md_p = pickle.loads(pickle.dumps(md))
    assert md_p.to_dict() == {"alfa": 1}


def test_Bunch_to_dict_is_a_copy():
    md = bunch.Bunch("extra", {"alfa": 1})
    data = md.to_dict()
    data["alfa"] = 2
    assert md.alfa == 1
