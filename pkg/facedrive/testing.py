#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Public testing utility functions.

This module exposes "assert" functions which facilitate the comparison in a
testing environment of objects created in facedrive.

"""

# =============================================================================
# IMPORTS
# =============================================================================

from .diffusion import NoiseSchedule
from .drivermap import DriverMap
from .metrics import MetricReport


# =============================================================================
# HELPERS
# =============================================================================


def _assert(cond, err_msg):
    """Asserts that a condition is true, otherwise raises an AssertionError \
    with a specified error message.

    This function exists to prevent asserts from being turned off with a
    "python -O."

    """
    if not cond:
        raise AssertionError(err_msg)


def _assert_same(cls, left, right, members, diff_kws):
    _assert(
        isinstance(left, cls),
        f"'left' is not a {cls.__name__} instance. Found {type(left)!r}",
    )

    the_diff = left.diff(right, **diff_kws)
    if not the_diff.has_differences:
        return

    _assert(
        the_diff.different_types is False,
        f"'right' is not a {cls.__name__} instance. "
        f"Found {the_diff.right_type!r}",
    )
    for member in members:
        _assert(
            member not in the_diff.members_diff, f"{member!r} are not equal"
        )


# =============================================================================
# ASSERTS
# =============================================================================


def assert_driver_map_equals(left, right, **diff_kws):
    """Asserts that two DriverMap objects are equal by comparing \
    their tensors, coverage masks, modes and sigmas.

    Parameters
    ----------
    left : DriverMap
        The first DriverMap to compare.
    right : DriverMap
        The second DriverMap to compare.
    **diff_kws : dict
        Additional keyword arguments to pass to `DriverMap.diff`.

    Raises
    ------
    AssertionError
        If the two maps are not equal.

    """
    _assert_same(
        DriverMap,
        left,
        right,
        ("mode", "sigma", "coverage", "tensor"),
        diff_kws,
    )


def assert_report_equals(left, right, **diff_kws):
    """Asserts that two MetricReport objects are equal.

    Parameters
    ----------
    left : MetricReport
        The left report to compare.
    right : MetricReport
        The right report to compare.
    **diff_kws : dict
        Optional keyword arguments to pass to the report `diff` method.

    Raises
    ------
    AssertionError if the two reports are not equal.

    """
    _assert_same(
        MetricReport,
        left,
        right,
        ("metric", "sample_id", "values", "extra_"),
        diff_kws,
    )


def assert_schedule_equals(left, right, **diff_kws):
    """Asserts that two NoiseSchedule objects are equal."""
    _assert_same(
        NoiseSchedule,
        left,
        right,
        ("alphas_cumprod", "shift_ratio"),
        diff_kws,
    )
