#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Utilities shared by the facedrive modules."""

# =============================================================================
# IMPORTS
# =============================================================================

from .accabc import AccessorABC
from .bunch import Bunch
from .cmanagers import atomic_write
from .doctools import doc_inherit
from .equality import (
    DiffEqualityMixin,
    Difference,
    array_allclose,
    dict_allclose,
    diff,
)
from .parallel import split_bands, thread_count, thread_map


# =============================================================================
# ALL
# =============================================================================

__all__ = [
    "AccessorABC",
    "Bunch",
    "atomic_write",
    "doc_inherit",
    "DiffEqualityMixin",
    "Difference",
    "array_allclose",
    "dict_allclose",
    "diff",
    "split_bands",
    "thread_count",
    "thread_map",
]
