#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Driver-map assembly and cross-identity retargeting.

A driver map is a ``(45, H, W)`` float32 image. The live posed mesh only
decides *where* values land: every covered pixel carries the barycentric
interpolation of template-space attributes,

- channels 0-41: positional encoding of the normalised rest template;
- channels 42-44: expression deformation ``B_E(ψ)`` divided by σ.

Pixels off the mesh are 0 in every channel. Retargeting renders the
driver's expression and pose on the reference identity and camera.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import enum
import logging

import methodtools

import numpy as np

from .encoding import encode_template
from .plot import DriverMapPlotter
from ..container import TensorContainer
from ..core.clip import PoseParams
from ..core.methods import FDMethodABC
from ..model import evaluate_mesh
from ..render import interpolate_attribute, locate_points, rasterize
from ..utils import DiffEqualityMixin, diff, thread_map

# =============================================================================
# CONSTANTS
# =============================================================================

N_POSENC_CHANNELS = 42

N_DEFORMATION_CHANNELS = 3

N_CHANNELS = N_POSENC_CHANNELS + N_DEFORMATION_CHANNELS

#: Spatial size of :py:func:`raw_vector_broadcast`.
BROADCAST_GRID = (64, 64)

_HASH_WORDS = 8

logger = logging.getLogger(__name__)


# =============================================================================
# MODES
# =============================================================================


class DriverMapMode(enum.Enum):
    """Channel groups kept in a driver map.

    Ablation modes zero a channel group instead of dropping it, so every
    map has 45 channels.

    """

    FULL = "full"
    NO_DEFORMATION = "no_deformation"
    NO_POSENC = "no_posenc"

    @property
    def code(self):
        """Stable integer code stored in containers."""
        return _MODE_CODES[self]

    @classmethod
    def from_code(cls, code):
        """Inverse of :py:attr:`code`."""
        for mode, mode_code in _MODE_CODES.items():
            if mode_code == int(code):
                return mode
        raise ValueError(f"unknown driver map mode code {code!r}")

    @classmethod
    def parse(cls, mode):
        """Accept a mode, its name or its value."""
        if isinstance(mode, cls):
            return mode
        try:
            return cls(str(mode).lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(
                f"Invalid driver map mode {mode!r}. Choose from: {choices}"
            )


_MODE_CODES = {
    DriverMapMode.FULL: 0,
    DriverMapMode.NO_DEFORMATION: 1,
    DriverMapMode.NO_POSENC: 2,
}


# =============================================================================
# HASH WORDS
# =============================================================================


def hash_to_words(hexdigest):
    """SHA-256 hex digest as 8 little-endian int32 words."""
    raw = bytes.fromhex(hexdigest)
    if len(raw) != 4 * _HASH_WORDS:
        raise ValueError(f"expected a SHA-256 digest, found {hexdigest!r}")
    return np.frombuffer(raw, dtype="<i4").copy()


def words_to_hash(words):
    """Inverse of :py:func:`hash_to_words`."""
    return np.asarray(words, dtype="<i4").tobytes().hex()


# =============================================================================
# DRIVER MAP
# =============================================================================


class DriverMap(DiffEqualityMixin):
    """A rasterised conditioning image.

    Parameters
    ----------
    tensor : array-like of shape (45, H, W)
        Stored as read-only float32.
    mode : DriverMapMode or str
    sigma : float
        Normalisation of the deformation channels.
    coverage : array-like of shape (H, W), optional
        Pixels covered by the mesh. Inferred from non-zero values when
        omitted.
    meta : dict, optional
        Provenance (``ref_hash``, ``drv_hash``, ...); hex digests only.

    """

    def __init__(
        self, tensor, mode="full", sigma=1.0, coverage=None, meta=None
    ):
        tensor = np.array(tensor, dtype=np.float32)
        if tensor.ndim != 3 or tensor.shape[0] != N_CHANNELS:
            raise ValueError(
                f"expected a ({N_CHANNELS}, H, W) tensor, found {tensor.shape}"
            )
        if coverage is None:
            coverage = np.any(tensor != 0, axis=0)
        coverage = np.array(coverage, dtype=bool)
        if coverage.shape != tensor.shape[1:]:
            raise ValueError(
                f"coverage shape {coverage.shape} does not match the "
                f"image {tensor.shape[1:]}"
            )
        tensor.flags.writeable = False
        coverage.flags.writeable = False
        self._tensor = tensor
        self._coverage = coverage
        self._mode = DriverMapMode.parse(mode)
        self._sigma = float(sigma)
        meta = dict(meta or {})
        for key in meta:
            if not key.endswith("_hash"):
                raise ValueError(
                    f"meta keys must end with _hash, found {key!r}"
                )
        self._meta = meta

    # PROPERTIES ==============================================================

    @property
    def tensor(self):
        """``(45, H, W)`` float32 array."""
        return self._tensor

    @property
    def mode(self):
        """The :py:class:`DriverMapMode`."""
        return self._mode

    @property
    def sigma(self):
        """Deformation normalisation."""
        return self._sigma

    @property
    def coverage(self):
        """``(H, W)`` booleans of the pixels covered by the mesh."""
        return self._coverage

    @property
    def meta(self):
        """Copy of the provenance dict."""
        return dict(self._meta)

    @property
    def shape(self):
        """``(45, H, W)``."""
        return self._tensor.shape

    def with_meta(self, **meta):
        """Copy of the map with extra provenance digests."""
        merged = dict(self._meta, **meta)
        return DriverMap(
            self._tensor, self._mode, self._sigma, self._coverage, merged
        )

    @property
    def n_posenc_channels(self):
        """Number of positional-encoding channels."""
        return N_POSENC_CHANNELS

    @property
    def posenc(self):
        """``(42, H, W)`` positional-encoding channels."""
        return self._tensor[:N_POSENC_CHANNELS]

    @property
    def deformation(self):
        """``(3, H, W)`` normalised deformation channels."""
        return self._tensor[N_POSENC_CHANNELS:]

    @property
    def magnitude(self):
        """``(H, W)`` Euclidean norm of the deformation channels."""
        return np.linalg.norm(self.deformation.astype(float), axis=0)

    @methodtools.lru_cache(maxsize=None)
    @property
    def plot(self):
        """Plot accessor."""
        return DriverMapPlotter(self)

    # IO ======================================================================

    def to_container(self):
        """Container entries ``driver_map``, ``meta_*`` and ``coverage``."""
        entries = {
            "driver_map": self._tensor,
            "meta_mode": np.array(self._mode.code, dtype=np.int32),
            "meta_sigma": np.array(self._sigma, dtype=np.float64),
            "coverage": self._coverage.astype(np.int32),
        }
        for key in sorted(self._meta):
            entries[f"meta_{key}"] = hash_to_words(self._meta[key])
        return TensorContainer(entries)

    @classmethod
    def from_container(cls, container):
        """Inverse of :py:meth:`to_container`."""
        tensor = container.require("driver_map", np.float32, 3)
        mode = DriverMapMode.from_code(container.require("meta_mode", "i4"))
        sigma = float(container.require("meta_sigma", "f8"))
        coverage = None
        if "coverage" in container:
            coverage = container.require("coverage", "i4", 2) != 0
        meta = {
            name[len("meta_") :]: words_to_hash(container[name])
            for name in container
            if name.endswith("_hash") and name.startswith("meta_")
        }
        return cls(tensor, mode, sigma, coverage=coverage, meta=meta)

    def save(self, path):
        """Write a ``.lka`` container."""
        self.to_container().save(path)

    @classmethod
    def load(cls, path):
        """Read a ``.lka`` container."""
        return cls.from_container(TensorContainer.load(path))

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare tensors, coverage, mode and sigma."""

        def tensor_cmp(left, right):
            return left.shape == right.shape and bool(
                np.allclose(
                    left, right, rtol=rtol, atol=atol, equal_nan=equal_nan
                )
            )

        return diff(
            self,
            other,
            tensor=tensor_cmp,
            coverage=np.array_equal,
            mode=lambda left, right: left is right,
            sigma=np.isclose,
        )

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        _, height, width = self.shape
        return (
            f"<DriverMap {width}x{height} mode={self._mode.value!r} "
            f"coverage={int(self._coverage.sum())}>"
        )


# =============================================================================
# ATTRIBUTES
# =============================================================================


def head_faces(assets, faces, n_total):
    """Faces whose vertices all belong to the head (inner mouth included)."""
    mask = np.ones(n_total, dtype=bool)
    mask[: assets.n_vertices] = assets.head_vertex_mask
    return faces[np.all(mask[faces], axis=1)]


def vertex_attributes(assets, encoded, expr_deformation, mode="full"):
    """Per-vertex 45 channel attributes.

    Parameters
    ----------
    assets : FaceModelAssets
    encoded : EncodedTemplate
    expr_deformation : array of shape (N_total, 3)
        ``B_E(ψ)`` rows, zero for the inner mouth.
    mode : DriverMapMode or str

    Returns
    -------
    numpy.ndarray of shape (N_total, 45), float64

    """
    mode = DriverMapMode.parse(mode)
    expr_deformation = np.asarray(expr_deformation, dtype=float)
    if len(expr_deformation) != encoded.n_vertices:
        raise ValueError(
            f"{len(expr_deformation)} deformation rows for "
            f"{encoded.n_vertices} encoded vertices"
        )
    attributes = np.zeros((encoded.n_vertices, N_CHANNELS))
    if mode is not DriverMapMode.NO_POSENC:
        attributes[:, :N_POSENC_CHANNELS] = encoded.per_vertex_pe
    if mode is not DriverMapMode.NO_DEFORMATION:
        sigma = assets.expression_sigma
        attributes[:, N_POSENC_CHANNELS:] = expr_deformation / sigma
    return attributes


# =============================================================================
# BUILD
# =============================================================================


def build_driver_map(
    assets,
    encoded,
    shape,
    expression,
    pose,
    camera,
    mode="full",
    *,
    n_threads=None,
    return_raster=False,
):
    """Render the driver map of one parameter tuple.

    Parameters
    ----------
    assets : FaceModelAssets
    encoded : EncodedTemplate
        From :py:func:`encode_template` on the same assets.
    shape, expression : array-like
        β and ψ.
    pose : PoseParams
    camera : Camera
        Sets the resolution.
    mode : DriverMapMode or str, optional
    n_threads : int, optional
        Rasteriser threads.
    return_raster : bool, optional
        Also return the :py:class:`RasterBuffer`.

    Returns
    -------
    DriverMap

    """
    mode = DriverMapMode.parse(mode)
    pose = PoseParams() if pose is None else pose
    mesh = evaluate_mesh(assets, shape, expression, pose)
    faces = head_faces(assets, mesh.faces, mesh.n_vertices)
    raster = rasterize(mesh.vertices, faces, camera, n_threads=n_threads)

    attributes = vertex_attributes(
        assets, encoded, mesh.expr_deformation, mode
    )
    image = interpolate_attribute(raster, attributes)
    tensor = np.moveaxis(image, -1, 0).astype(np.float32)

    driver_map = DriverMap(
        tensor, mode, assets.expression_sigma, coverage=raster.coverage
    )
    if return_raster:
        return driver_map, raster
    return driver_map


def retarget(
    assets,
    encoded,
    shape_ref,
    camera_ref,
    expression_drv,
    pose_drv,
    mode="full",
    *,
    n_threads=None,
):
    """Driver map of the driver's expression and pose on the reference.

    Exactly ``build_driver_map(assets, encoded, shape_ref, expression_drv,
    pose_drv, camera_ref, mode)``.

    """
    return build_driver_map(
        assets,
        encoded,
        shape_ref,
        expression_drv,
        pose_drv,
        camera_ref,
        mode,
        n_threads=n_threads,
    )


def build_driver_map_sequence(
    assets, encoded, clip, mode="full", *, n_threads=None, progress=None
):
    """Driver maps of every frame of a clip bundle.

    Frames are rendered in parallel; ``progress`` is an optional callable
    invoked once per finished frame.

    """
    clip.check_assets(assets)

    def render(frame):
        driver_map = build_driver_map(
            assets,
            encoded,
            clip.shape,
            frame.expression,
            frame,
            clip.camera,
            mode,
            n_threads=1,
        )
        if progress is not None:
            progress()
        return driver_map

    logger.debug("Rendering %d frames", clip.n_frames)
    return thread_map(render, clip.frames, n_threads=n_threads)


def retarget_clip(
    assets, encoded, ref_clip, drv_clip, mode="full", *, n_threads=None
):
    """Retarget every driver frame onto the reference clip identity.

    Uses ``β`` and the camera of ``ref_clip`` and the per-frame ``ψ`` and
    pose of ``drv_clip``.

    """
    ref_clip.check_assets(assets)
    drv_clip.check_assets(assets)
    substituted = drv_clip.replace(
        shape=ref_clip.shape, camera=ref_clip.camera
    )
    return build_driver_map_sequence(
        assets, encoded, substituted, mode, n_threads=n_threads
    )


# =============================================================================
# SAMPLING AND BROADCAST
# =============================================================================


def sample_driver_values(
    assets, encoded, shape, expression, pose, camera, uv, mode="full"
):
    """Driver-map values at sub-pixel positions.

    Uses the same visibility as :py:func:`build_driver_map` but evaluates
    the interpolation at ``uv`` instead of at pixel centres; a query at a
    projected vertex returns that vertex's attributes when it is visible.

    Returns
    -------
    values : (Q, 45) float32 array
        Zero where no face is hit.
    face_index : (Q,) int array
    depth : (Q,) float array

    """
    pose = PoseParams() if pose is None else pose
    mesh = evaluate_mesh(assets, shape, expression, pose)
    faces = head_faces(assets, mesh.faces, mesh.n_vertices)
    face_index, barycentric, depth = locate_points(
        mesh.vertices, faces, camera, uv
    )
    attributes = vertex_attributes(
        assets, encoded, mesh.expr_deformation, mode
    )
    values = np.zeros((len(face_index), N_CHANNELS))
    hit = face_index >= 0
    tri = faces[face_index[hit]]
    values[hit] = np.einsum("qk,qkc->qc", barycentric[hit], attributes[tri])
    return values.astype(np.float32), face_index, depth


def raw_vector_broadcast(
    shape, expression, pose, grid=BROADCAST_GRID, *, assets=None
):
    """Tile the raw parameter vector over a spatial grid.

    Parameters
    ----------
    shape, expression : array-like
        β and ψ.
    pose : PoseParams or array-like
        A pose (flattened to its 15 rotation values) or a flat vector.
    grid : tuple of int, optional
        ``(height, width)``.
    assets : FaceModelAssets, optional
        When given, β must hold ``n_beta`` values, ψ ``n_psi`` values and
        the pose three rotation values per joint.

    Returns
    -------
    numpy.ndarray of shape (n_beta + n_psi + n_pose, height, width)
        float32; every spatial position holds the same vector.

    Raises
    ------
    ValueError
        If ``assets`` is given and a vector has the wrong length.

    """
    if isinstance(pose, PoseParams):
        pose = pose.pose_vector()
    parts = [
        np.asarray(part, dtype=float).ravel()
        for part in (shape, expression, pose)
    ]
    if assets is not None:
        expected = (assets.n_beta, assets.n_psi, 3 * assets.n_joints)
        names = ("shape", "expression", "pose")
        for name, part, length in zip(names, parts, expected):
            if len(part) != length:
                raise ValueError(
                    f"{name} length mismatch: expected {length}, "
                    f"found {len(part)}"
                )
    vector = np.concatenate(parts).astype(np.float32)
    height, width = grid
    return np.broadcast_to(
        vector[:, None, None], (len(vector), height, width)
    ).copy()


# =============================================================================
# BUILDER
# =============================================================================


class DriverMapBuilder(FDMethodABC):
    """Driver-map renderer bound to a mode.

    Parameters
    ----------
    mode : DriverMapMode or str, optional
        Channel groups to keep. Default ``"full"``.
    n_threads : int, optional
        Worker threads; see :py:func:`facedrive.utils.thread_count`.

    """

    _facedrive_kind = "driver_map_builder"
    _facedrive_parameters = ["mode", "n_threads"]

    def __init__(self, mode="full", n_threads=None):
        self._mode = DriverMapMode.parse(mode)
        if n_threads is not None and int(n_threads) < 1:
            raise ValueError(f"n_threads must be >= 1, found {n_threads}")
        self._n_threads = n_threads

    @property
    def mode(self):
        """Channel groups kept."""
        return self._mode

    @property
    def n_threads(self):
        """Worker thread cap."""
        return self._n_threads

    def encode(self, assets):
        """See :py:func:`encode_template`."""
        return encode_template(assets)

    def build(self, assets, encoded, shape, expression, pose, camera):
        """See :py:func:`build_driver_map`."""
        return build_driver_map(
            assets,
            encoded,
            shape,
            expression,
            pose,
            camera,
            self._mode,
            n_threads=self._n_threads,
        )

    def build_clip(self, assets, encoded, clip):
        """See :py:func:`build_driver_map_sequence`."""
        return build_driver_map_sequence(
            assets, encoded, clip, self._mode, n_threads=self._n_threads
        )

    def retarget(self, assets, encoded, ref_clip, drv_clip):
        """See :py:func:`retarget_clip`."""
        return retarget_clip(
            assets,
            encoded,
            ref_clip,
            drv_clip,
            self._mode,
            n_threads=self._n_threads,
        )
