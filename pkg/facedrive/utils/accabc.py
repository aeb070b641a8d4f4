#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Accessor base class used by the plotting helpers."""

# =============================================================================
# IMPORTS
# =============================================================================

import abc

# =============================================================================
# ACCESSOR
# =============================================================================


class AccessorABC(abc.ABC):
    """Callable namespace that dispatches to one of its public methods.

    ``obj.plot("magnitude", vmax=1)`` is the same as
    ``obj.plot.magnitude(vmax=1)`` and ``obj.plot()`` runs the method named
    by ``_default_kind``.

    Subclasses must declare ``_default_kind`` as a class attribute and list
    every dispatchable method in ``_kinds``.

    """

    _default_kind = None
    _kinds = ()

    def __init_subclass__(cls):
        """Validate the accessor declaration."""
        if cls._default_kind is None:
            raise TypeError(f"{cls!r} must define a _default_kind")
        if cls._default_kind not in cls._kinds:
            raise TypeError(
                f"{cls!r} default kind {cls._default_kind!r} "
                "is not listed in _kinds"
            )

    def __call__(self, kind=None, **kwargs):
        """x.__call__() <==> x()."""
        kind = self._default_kind if kind is None else kind
        if kind not in self._kinds:
            kinds = ", ".join(repr(k) for k in self._kinds)
            raise ValueError(
                f"Invalid kind {kind!r}. Please choose from: {kinds}"
            )
        method = getattr(self, kind)
        return method(**kwargs)
