#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Docstring inheritance for overridden methods."""

# =============================================================================
# IMPORTS
# =============================================================================

from inspect import isclass

from custom_inherit import doc_inherit as _doc_inherit

# =============================================================================
# DOC INHERITANCE
# =============================================================================


def doc_inherit(parent):
    """Merge the numpy-style docstring of ``parent`` into the decorated.

    Only functions and methods are accepted; class docstrings are written
    explicitly across the package.

    Parameters
    ----------
    parent : str or object
        Docstring, or object that owns the docstring, used as the base of
        the merge.

    """

    def _wrapper(obj):
        if isclass(obj):
            raise TypeError(
                f"doc_inherit decorates functions and methods, not {obj!r}"
            )
        return _doc_inherit(parent, style="numpy")(obj)

    return _wrapper
