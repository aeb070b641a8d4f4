#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Chunked little-endian tensor container (``.lka`` files).

Layout (all integers little-endian)::

    header   : b"LKAC" | u32 version (=1) | u32 entry count
    table    : per entry
               u16 name length | name (utf-8) | u8 dtype code | u8 rank |
               u32 x rank dims | u64 payload offset
    payloads : row-major data, every payload starts at an offset that is a
               multiple of 8 (zero padded)

Supported dtypes are ``float32`` (code 1), ``float64`` (code 2) and
``int32`` (code 3). Round-trips are bit-exact.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import pathlib
import struct
import warnings
from collections.abc import Mapping

import numpy as np

from .utils import DiffEqualityMixin, atomic_write, diff

# =============================================================================
# CONSTANTS
# =============================================================================

MAGIC = b"LKAC"

VERSION = 1

ALIGNMENT = 8

DTYPE_CODES = {
    1: np.dtype("<f4"),
    2: np.dtype("<f8"),
    3: np.dtype("<i4"),
}

_CODE_BY_STR = {dtype.str: code for code, dtype in DTYPE_CODES.items()}

_HEADER = struct.Struct("<4sII")
_NAME_LEN = struct.Struct("<H")
_DTYPE_RANK = struct.Struct("<BB")
_DIM = struct.Struct("<I")
_OFFSET = struct.Struct("<Q")

_MAX_NAME_BYTES = 2**16 - 1
_MAX_RANK = 2**8 - 1
_MAX_DIM = 2**32 - 1


# =============================================================================
# ERRORS
# =============================================================================


class ContainerError(ValueError):
    """The container bytes or the entries to encode are invalid.

    Parameters
    ----------
    message : str
        Description of the problem.
    entry : str, optional
        Name of the offending entry, if any.

    """

    def __init__(self, message, entry=None):
        self.entry = entry
        if entry is not None:
            message = f"entry {entry!r}: {message}"
        super().__init__(message)


class ContainerTrailingDataWarning(UserWarning):
    """Bytes after the last payload were ignored."""


# =============================================================================
# ENCODING
# =============================================================================


def _align(offset):
    return -(-offset // ALIGNMENT) * ALIGNMENT


def _coerce_entry(name, array):
    if not isinstance(name, str) or not name:
        raise ContainerError(
            f"entry names must be non-empty str, got {name!r}"
        )
    try:
        encoded_name = name.encode("utf-8")
    except UnicodeEncodeError as err:
        raise ContainerError(f"name is not valid UTF-8 ({err})", name)
    if len(encoded_name) > _MAX_NAME_BYTES:
        raise ContainerError("name longer than 65535 bytes", name)

    array = np.asarray(array)
    dtype = array.dtype.newbyteorder("<")
    if dtype.str not in _CODE_BY_STR:
        supported = ", ".join(str(d) for d in DTYPE_CODES.values())
        raise ContainerError(
            f"dtype mismatch: {array.dtype} is not one of {supported}", name
        )
    if array.ndim > _MAX_RANK:
        raise ContainerError(f"rank {array.ndim} is too large", name)
    if any(dim > _MAX_DIM for dim in array.shape):
        raise ContainerError(
            f"dimension too large: shape {array.shape} exceeds {_MAX_DIM}",
            name,
        )

    array = np.ascontiguousarray(array, dtype=dtype)
    return encoded_name, array


def _iter_entries(entries):
    if isinstance(entries, Mapping):
        entries = entries.items()
    for name, array in entries:
        yield name, array


def write_container(entries):
    """Encode named arrays as container bytes.

    Parameters
    ----------
    entries : Mapping or iterable of (str, array-like)
        Entries in the order they must be stored.

    Returns
    -------
    bytes

    Raises
    ------
    ContainerError
        If names repeat or are not valid UTF-8, a dtype is unsupported or
        a dimension does not fit in 32 bits.

    """
    coerced, seen = [], set()
    for name, array in _iter_entries(entries):
        if name in seen:
            raise ContainerError("duplicate name", name)
        seen.add(name)
        coerced.append(_coerce_entry(name, array))

    table_size = sum(
        _NAME_LEN.size
        + len(encoded_name)
        + _DTYPE_RANK.size
        + _DIM.size * array.ndim
        + _OFFSET.size
        for encoded_name, array in coerced
    )

    # first pass: offsets
    offsets, cursor = [], _align(_HEADER.size + table_size)
    for _, array in coerced:
        offsets.append(cursor)
        cursor = _align(cursor + array.nbytes)

    chunks = [_HEADER.pack(MAGIC, VERSION, len(coerced))]
    for (encoded_name, array), offset in zip(coerced, offsets):
        chunks.append(_NAME_LEN.pack(len(encoded_name)))
        chunks.append(encoded_name)
        code = _CODE_BY_STR[array.dtype.str]
        chunks.append(_DTYPE_RANK.pack(code, array.ndim))
        chunks.extend(_DIM.pack(dim) for dim in array.shape)
        chunks.append(_OFFSET.pack(offset))

    buffer = bytearray(b"".join(chunks))
    for (_, array), offset in zip(coerced, offsets):
        buffer.extend(b"\x00" * (offset - len(buffer)))
        buffer.extend(array.tobytes(order="C"))

    return bytes(buffer)


# =============================================================================
# DECODING
# =============================================================================


class _Reader:
    """Cursor over the table section with truncation checks."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def unpack(self, fmt, what, entry=None):
        end = self.pos + fmt.size
        if end > len(self.data):
            raise ContainerError(
                f"truncated {what}: expected {fmt.size} bytes at offset "
                f"{self.pos}, only {len(self.data) - self.pos} available",
                entry,
            )
        values = fmt.unpack_from(self.data, self.pos)
        self.pos = end
        return values

    def take(self, size, what, entry=None):
        end = self.pos + size
        if end > len(self.data):
            raise ContainerError(
                f"truncated {what}: expected {size} bytes at offset "
                f"{self.pos}, only {len(self.data) - self.pos} available",
                entry,
            )
        chunk = bytes(self.data[self.pos : end])
        self.pos = end
        return chunk


def read_container(data):
    """Decode container bytes.

    Parameters
    ----------
    data : bytes-like

    Returns
    -------
    TensorContainer

    Raises
    ------
    ContainerError
        On bad magic, unsupported version, truncated table or payload
        (the message carries the expected byte count), duplicate names or
        unknown dtype codes.

    Warns
    -----
    ContainerTrailingDataWarning
        When bytes remain after the last payload.

    """
    data = memoryview(bytes(data))
    reader = _Reader(data)

    magic, version, count = reader.unpack(_HEADER, "header")
    if magic != MAGIC:
        raise ContainerError(f"bad magic {bytes(magic)!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")

    table = []
    for index in range(count):
        where = f"table entry #{index}"
        (name_len,) = reader.unpack(_NAME_LEN, where)
        raw_name = reader.take(name_len, f"name of {where}")
        try:
            name = raw_name.decode("utf-8")
        except UnicodeDecodeError as err:
            raise ContainerError(f"{where} name is not valid UTF-8 ({err})")

        code, rank = reader.unpack(_DTYPE_RANK, "dtype/rank", name)
        if code not in DTYPE_CODES:
            raise ContainerError(f"dtype mismatch: unknown code {code}", name)
        shape = tuple(
            reader.unpack(_DIM, "dimension", name)[0] for _ in range(rank)
        )
        (offset,) = reader.unpack(_OFFSET, "payload offset", name)
        table.append((name, DTYPE_CODES[code], shape, offset))

    entries, end_of_data = {}, reader.pos
    for name, dtype, shape, offset in table:
        if name in entries:
            raise ContainerError("duplicate name", name)
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        available = max(len(data) - offset, 0)
        if nbytes > available:
            raise ContainerError(
                f"truncated payload: expected {nbytes} bytes at offset "
                f"{offset}, only {available} available",
                name,
            )
        payload = data[offset : offset + nbytes]
        entries[name] = np.frombuffer(payload, dtype=dtype).reshape(shape)
        end_of_data = max(end_of_data, offset + nbytes)

    if len(data) > end_of_data:
        warnings.warn(
            f"Ignoring {len(data) - end_of_data} trailing bytes",
            ContainerTrailingDataWarning,
        )

    return TensorContainer(entries)


# =============================================================================
# CONTAINER
# =============================================================================


class TensorContainer(DiffEqualityMixin, Mapping):
    """Ordered read-only mapping of entry name to numpy array.

    Parameters
    ----------
    entries : Mapping or iterable of (str, array-like)
        Arrays to hold. They are copied and made read-only; their dtype
        must be one of the container dtypes.

    """

    def __init__(self, entries=()):
        self._entries = {}
        for name, array in _iter_entries(entries):
            if name in self._entries:
                raise ContainerError("duplicate name", name)
            _, array = _coerce_entry(name, array)
            array = array.copy()
            array.flags.writeable = False
            self._entries[name] = array

    # IO ======================================================================

    @classmethod
    def from_bytes(cls, data):
        """Decode a container. See :py:func:`read_container`."""
        return read_container(data)

    def to_bytes(self):
        """Encode the container. See :py:func:`write_container`."""
        return write_container(self._entries)

    @classmethod
    def load(cls, path):
        """Read a ``.lka`` file."""
        return read_container(pathlib.Path(path).read_bytes())

    def save(self, path):
        """Write a ``.lka`` file atomically."""
        with atomic_write(path, "wb") as fp:
            fp.write(self.to_bytes())

    # ACCESS ==================================================================

    def __getitem__(self, name):
        """x.__getitem__(y) <==> x[y]."""
        return self._entries[name]

    def __iter__(self):
        """x.__iter__() <==> iter(x)."""
        return iter(self._entries)

    def __len__(self):
        """x.__len__() <==> len(x)."""
        return len(self._entries)

    def require(self, name, dtype=None, ndim=None):
        """Return an entry checking its presence, dtype and rank.

        Raises
        ------
        ContainerError
            If the entry is missing or its dtype/rank differ.

        """
        if name not in self._entries:
            raise ContainerError("missing entry", name)
        array = self._entries[name]
        if dtype is not None and array.dtype != np.dtype(dtype).newbyteorder(
            "<"
        ):
            raise ContainerError(
                f"dtype mismatch: expected {np.dtype(dtype)}, "
                f"found {array.dtype}",
                name,
            )
        if ndim is not None and array.ndim != ndim:
            raise ContainerError(
                f"expected rank {ndim}, found shape {array.shape}", name
            )
        return array

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare entry names (with their order) and arrays.

        ``rtol`` and ``atol`` apply to floating entries; ``equal_nan``
        treats NaN payloads as equal.

        """

        def entries_cmp(left, right):
            if list(left) != list(right):
                return False
            for name in left:
                lvalue, rvalue = left[name], right[name]
                if lvalue.shape != rvalue.shape:
                    return False
                if check_dtypes and lvalue.dtype != rvalue.dtype:
                    return False
                if not np.allclose(
                    lvalue, rvalue, rtol=rtol, atol=atol, equal_nan=equal_nan
                ):
                    return False
            return True

        return diff(self, other, _entries=entries_cmp)

    # REPR ====================================================================

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        content = ", ".join(
            f"{name}: {array.dtype}{list(array.shape)}"
            for name, array in self._entries.items()
        )
        return f"<TensorContainer {{{content}}}>"
