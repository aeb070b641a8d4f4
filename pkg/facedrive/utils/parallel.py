#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Thread-count resolution and thread-pool mapping.

The worker count is resolved, in order, from an explicit argument, from
the ``LOKI_THREADS`` environment variable and finally from the number of
CPUs.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
import os
import warnings
from concurrent import futures

import numpy as np

# =============================================================================
# CONSTANTS
# =============================================================================

#: Environment variable capping the worker threads.
THREADS_ENV = "LOKI_THREADS"

logger = logging.getLogger(__name__)


# =============================================================================
# FUNCTIONS
# =============================================================================


def thread_count(n_threads=None):
    """Resolve how many worker threads to use.

    Parameters
    ----------
    n_threads : int, optional
        Explicit count. Must be >= 1.

    Returns
    -------
    int

    """
    if n_threads is not None:
        n_threads = int(n_threads)
        if n_threads < 1:
            raise ValueError(f"n_threads must be >= 1, found {n_threads}")
        return n_threads

    cpus = os.cpu_count() or 1
    env_value = os.environ.get(THREADS_ENV)
    if env_value is None:
        return cpus

    try:
        from_env = int(env_value)
    except ValueError:
        from_env = 0
    if from_env < 1:
        warnings.warn(
            f"Ignoring invalid {THREADS_ENV}={env_value!r}; using {cpus}"
        )
        return cpus
    return from_env


def split_bands(size, n_bands):
    """Split ``range(size)`` into at most ``n_bands`` contiguous bands.

    Returns
    -------
    list of (start, stop) tuples
        Non-empty, disjoint and covering ``range(size)`` in order.

    """
    n_bands = max(1, min(int(n_bands), int(size)))
    if size <= 0:
        return []
    edges = np.linspace(0, size, n_bands + 1).round().astype(int)
    return [
        (int(start), int(stop))
        for start, stop in zip(edges[:-1], edges[1:])
        if stop > start
    ]


def thread_map(func, items, n_threads=None):
    """Map ``func`` over ``items`` on a thread pool, preserving order.

    With one thread (or one item) the map runs in the calling thread.

    """
    items = list(items)
    workers = min(thread_count(n_threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]

    logger.debug("Mapping %d items over %d threads", len(items), workers)
    with futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
