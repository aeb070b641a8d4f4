#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Read-only mapping that also exposes its keys as attributes."""


# =============================================================================
# IMPORTS
# =============================================================================

import copy
from collections.abc import Mapping


# =============================================================================
# BUNCH
# =============================================================================


class Bunch(Mapping):
    """Named read-only mapping with attribute access.

    Metric and calibration reports keep their auxiliary values inside a
    Bunch, so ``report.extra_["empty_frames"]`` and
    ``report.extra_.empty_frames`` are equivalent.

    Parameters
    ----------
    name : str
        Label used in the representation.
    data : Mapping
        Content of the bunch. It is shallow-copied.

    Examples
    --------
    >>> b = Bunch("extra", {"ratio": 0.25, "n_valid": 16})
    >>> b
    <extra {n_valid, ratio}>
    >>> b.ratio == b["ratio"]
    True

    """

    def __init__(self, name, data):
        if not isinstance(data, Mapping):
            raise TypeError(
                f"Bunch data must be a mapping, found {type(data)!r}"
            )
        self._name = str(name)
        self._data = dict(data)

    @property
    def name(self):
        """Label of the bunch."""
        return self._name

    def __getitem__(self, key):
        """x.__getitem__(y) <==> x[y]."""
        return self._data[key]

    def __getattr__(self, attr):
        """x.__getattr__(y) <==> x.y."""
        # __getattr__ runs before __init__ finishes during unpickling
        if attr.startswith("__") or attr == "_data":
            raise AttributeError(attr)
        try:
            return self._data[attr]
        except KeyError:
            raise AttributeError(attr)

    def __iter__(self):
        """x.__iter__() <==> iter(x)."""
        return iter(self._data)

    def __len__(self):
        """x.__len__() <==> len(x)."""
        return len(self._data)

    def __copy__(self):
        """x.__copy__() <==> copy.copy(x)."""
        return type(self)(self._name, self._data)

    def __deepcopy__(self, memo):
        """x.__deepcopy__() <==> copy.deepcopy(x)."""
        clone = type(self)(self._name, {})
        memo[id(self)] = clone
        clone._data = copy.deepcopy(self._data, memo)
        return clone

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        keys = ", ".join(sorted(str(k) for k in self._data))
        return f"<{self._name} {{{keys}}}>"

    def __dir__(self):
        """x.__dir__() <==> dir(x)."""
        return list(super().__dir__()) + list(self._data)

    def to_dict(self):
        """Return a shallow copy of the content as a plain dict."""
        return dict(self._data)
