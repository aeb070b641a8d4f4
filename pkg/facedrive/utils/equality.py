#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Member-wise comparison of array-carrying objects.

Most public objects of facedrive (assets, driver maps, reports, schedules)
wrap numpy arrays, so ``==`` can not be delegated to dataclass equality.
They implement :py:meth:`DiffEqualityMixin.diff` instead, listing which
members to compare and with which function.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import abc
import inspect
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

# =============================================================================
# CONSTANTS
# =============================================================================

_INEXACT_TYPES = (float, complex, np.inexact)


class _Missing:
    """Sentinel for members absent on one side of a comparison."""

    _instance = None

    def __new__(cls):
        """Return the unique sentinel instance."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return "<MISSING>"


#: Value reported for a member that only one of the objects has.
MISSING = _Missing()


# =============================================================================
# DIFFERENCE
# =============================================================================


@dataclass(frozen=True)
class Difference:
    """Result of :py:func:`diff`.

    ``members_diff`` maps every differing member name to the pair
    ``(left_value, right_value)``.

    """

    left_type: type
    right_type: type
    members_diff: dict = field(default_factory=dict, init=False)

    @property
    def different_types(self):
        """True when the compared objects are not of the same type."""
        return self.left_type is not self.right_type

    @property
    def has_differences(self):
        """True when types or any compared member differ."""
        return self.different_types or bool(self.members_diff)

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        members = tuple(sorted(self.members_diff))
        return (
            f"<Difference has_differences={self.has_differences!r} "
            f"different_types={self.different_types!r} "
            f"members_diff={members!r}>"
        )


def diff(left, right, **members):
    """Compare the named members of two objects.

    Parameters
    ----------
    left, right : object
        Objects to compare.
    **members : callable
        ``member_name=cmp_function`` pairs. ``cmp_function(lvalue, rvalue)``
        must return True when both values are considered equal.

    Returns
    -------
    Difference

    """
    the_diff = Difference(left_type=type(left), right_type=type(right))
    if left is right or the_diff.different_types:
        return the_diff

    for member, member_cmp in members.items():
        lvalue = getattr(left, member, MISSING)
        rvalue = getattr(right, member, MISSING)
        if lvalue is MISSING or rvalue is MISSING:
            if lvalue is not rvalue:
                the_diff.members_diff[member] = (lvalue, rvalue)
        elif not member_cmp(lvalue, rvalue):
            the_diff.members_diff[member] = (lvalue, rvalue)

    return the_diff


# =============================================================================
# ARRAY HELPERS
# =============================================================================


def array_allclose(
    left, right, rtol=1e-05, atol=1e-08, equal_nan=False, check_dtypes=False
):
    """Shape-aware ``numpy.allclose`` that also accepts non-float arrays.

    Integer and boolean arrays are compared exactly. Shapes must match.

    """
    left, right = np.asarray(left), np.asarray(right)
    if left.shape != right.shape:
        return False
    if check_dtypes and left.dtype != right.dtype:
        return False
    inexact = issubclass(left.dtype.type, _INEXACT_TYPES) or issubclass(
        right.dtype.type, _INEXACT_TYPES
    )
    if inexact:
        return bool(
            np.allclose(
                left, right, rtol=rtol, atol=atol, equal_nan=equal_nan
            )
        )
    return bool(np.array_equal(left, right))


def dict_allclose(left, right, rtol=1e-05, atol=1e-08, equal_nan=False):
    """Compare two mappings, using ``numpy.allclose`` on float arrays.

    Nested mappings are compared recursively. Values of different types are
    never equal.

    """
    if left is right:
        return True
    if set(left) != set(right):
        return False

    for key in left:
        lvalue, rvalue = left[key], right[key]
        if type(lvalue) is not type(rvalue):
            return False
        if isinstance(lvalue, Mapping):
            equal = dict_allclose(
                lvalue, rvalue, rtol=rtol, atol=atol, equal_nan=equal_nan
            )
        elif isinstance(lvalue, (np.ndarray, float, np.floating)):
            equal = array_allclose(
                lvalue, rvalue, rtol=rtol, atol=atol, equal_nan=equal_nan
            )
        else:
            equal = bool(np.array_equal(lvalue, rvalue))
        if not equal:
            return False
    return True


# =============================================================================
# MIXIN
# =============================================================================


class DiffEqualityMixin(abc.ABC):
    """Equality operators built on top of a ``diff`` method.

    Subclasses implement ``diff`` with exactly the signature declared here,
    and obtain ``aequals`` (tolerant), ``equals`` (exact), ``==`` and
    ``!=``.

    """

    def __init_subclass__(cls):
        """Check that ``diff`` keeps the declared signature."""
        expected = list(inspect.signature(DiffEqualityMixin.diff).parameters)
        found = list(inspect.signature(cls.diff).parameters)
        if expected != found:
            expected.remove("self")
            raise TypeError(
                f"{cls.diff.__qualname__!r} must redefine exactly "
                f"the parameters {expected!r}"
            )

    @abc.abstractmethod
    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Return the :py:class:`Difference` against ``other``.

        Parameters
        ----------
        other : object
            The object to compare to.
        rtol : float, optional
            Relative tolerance for float members. Default is 1e-05.
        atol : float, optional
            Absolute tolerance for float members. Default is 1e-08.
        equal_nan : bool, optional
            Whether NaN values in the same position compare equal.
            Default is True.
        check_dtypes : bool, optional
            Whether array dtypes must match. Default is False.

        Returns
        -------
        Difference

        """
        raise NotImplementedError()

    def aequals(
        self,
        other,
        *,
        rtol=1e-05,
        atol=1e-08,
        equal_nan=True,
        check_dtypes=False,
    ):
        """Check if the two objects are equal within a tolerance.

        All the parameters are passed to ``diff``.

        """
        the_diff = self.diff(
            other,
            rtol=rtol,
            atol=atol,
            equal_nan=equal_nan,
            check_dtypes=check_dtypes,
        )
        return not the_diff.has_differences

    def equals(self, other):
        """Return True if the objects are exactly equal."""
        return self.aequals(
            other, rtol=0, atol=0, equal_nan=False, check_dtypes=True
        )

    def __eq__(self, other):
        """x.__eq__(y) <==> (x == y) <==> x.equals(y)."""
        return self.equals(other)

    def __ne__(self, other):
        """x.__ne__(y) <==> (x != y) <==> not x.equals(y)."""
        return not self == other
