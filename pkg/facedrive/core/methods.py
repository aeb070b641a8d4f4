#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Base class of every configurable algorithm in facedrive."""

# =============================================================================
# IMPORTS
# =============================================================================

import abc
import copy
import inspect


# =============================================================================
# BASE METHOD CLASS
# =============================================================================


class FDMethodABC(metaclass=abc.ABCMeta):
    """Base class for the parameterised algorithms of facedrive.

    Driver-map builders, metrics, the calibration harness and the sampler
    are plain objects whose behaviour is fixed at construction time by a
    handful of keyword parameters. This class gives them a uniform
    ``repr``, ``get_parameters()`` and ``copy(**overrides)``.

    Notes
    -----
    Concrete subclasses must declare:

    - ``_facedrive_parameters``: names of the constructor parameters, each
      one readable as an attribute of the instance.
    - ``_facedrive_kind``: short family name (``"metric"``, ``"sampler"``,
      ...).

    Classes that set ``_facedrive_abstract_class = True`` in their own body
    skip the validation.

    """

    _facedrive_abstract_class = True

    def __init_subclass__(cls):
        """Validate that the subclass declares its parameters."""
        if vars(cls).get("_facedrive_abstract_class", False):
            return

        kind = getattr(cls, "_facedrive_kind", None)
        if kind is None:
            raise TypeError(f"{cls} must redefine '_facedrive_kind'")
        cls._facedrive_kind = str(kind)

        params = getattr(cls, "_facedrive_parameters", None)
        if params is None:
            raise TypeError(f"{cls} must redefine '_facedrive_parameters'")
        params = tuple(params)

        signature = inspect.signature(cls.__init__)
        missing = [p for p in params if p not in signature.parameters]
        if missing:
            raise TypeError(
                f"{cls} declares the parameters {missing} which are not "
                "arguments of __init__"
            )
        cls._facedrive_parameters = params

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        parameters = ", ".join(
            f"{name}={getattr(self, name)!r}"
            for name in self._facedrive_parameters
        )
        return f"{self.get_method_name()}({parameters})"

    def get_method_name(self):
        """Return the name of the method as string."""
        return type(self).__name__

    def get_parameters(self):
        """Return a deep copy of the constructor parameters as a dict."""
        return {
            name: copy.deepcopy(getattr(self, name))
            for name in self._facedrive_parameters
        }

    def copy(self, **kwargs):
        """Return a new instance, optionally overriding some parameters.

        Parameters
        ----------
        kwargs :
            Constructor parameters replacing the current values.

        Returns
        -------
        A new object of the same class.

        """
        parameters = self.get_parameters()
        unknown = set(kwargs).difference(parameters)
        if unknown:
            raise TypeError(f"Unknown parameters {sorted(unknown)}")
        parameters.update(kwargs)
        return type(self)(**parameters)
