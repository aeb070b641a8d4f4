#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Context managers used by the IO layer."""

# =============================================================================
# IMPORTS
# =============================================================================

import contextlib
import os
import pathlib
import tempfile

# =============================================================================
# ATOMIC WRITE
# =============================================================================


@contextlib.contextmanager
def atomic_write(path, mode="wb", encoding=None):
    """Write a file through a temporary sibling and rename it into place.

    Readers never observe a half-written file: the destination only
    appears (or is replaced) once the block finishes without errors. On
    error the temporary file is removed and the destination is untouched.

    Parameters
    ----------
    path : str or path-like
        Destination file.
    mode : {"wb", "w"}
        Binary or text mode.
    encoding : str, optional
        Text encoding, only for ``mode="w"``. Defaults to UTF-8.

    Yields
    ------
    file object

    """
    if mode not in ("wb", "w"):
        raise ValueError(f"mode must be 'wb' or 'w', found {mode!r}")
    if mode == "w" and encoding is None:
        encoding = "utf-8"

    path = pathlib.Path(path)
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent
    )
    try:
        with os.fdopen(fd, mode, encoding=encoding) as fp:
            yield fp
            fp.flush()
            os.fsync(fp.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.remove(tmp_name)
        raise
