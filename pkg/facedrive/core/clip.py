#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Per-frame face parameters and clip bundles.

A clip bundle is the fitted description of a talking-head clip: one
identity vector and one camera shared by every frame, plus per-frame
expression and rotations. Bundles are stored as UTF-8 JSON::

    {
      "shape": [...n_beta floats],
      "camera": {"fx": .., "fy": .., "cx": .., "cy": ..,
                 "rotation": [[3x3]], "translation": [3],
                 "width": .., "height": ..},
      "fps": 25.0,
      "frames": [
        {"expression": [...], "global_rotation": [3], "translation": [3],
         "neck_rotation": [3], "jaw_rotation": [3],
         "eye_rotations": [[3], [3]]},
        ...
      ],
      "extensions": {...}      # optional, preserved but not interpreted
    }

"""

# =============================================================================
# IMPORTS
# =============================================================================

import dataclasses
import hashlib
import json
import pathlib
from dataclasses import dataclass, field

import numpy as np

from .assets import expression_coefficient_scale
from ..render.camera import Camera
from ..utils import DiffEqualityMixin, atomic_write, diff

# =============================================================================
# CONSTANTS
# =============================================================================

#: Order of the rotations in :py:meth:`FrameParams.pose_vector`.
POSE_ROTATIONS = ("global", "neck", "jaw", "eye_l", "eye_r")

_FULL_TURN = 2.0 * np.pi

_ROTATION_FIELDS = ("global_rotation", "neck_rotation", "jaw_rotation")

_FRAME_KEYS = (
    "expression",
    "global_rotation",
    "translation",
    "neck_rotation",
    "jaw_rotation",
    "eye_rotations",
)

_SHAPE_RMS = 0.004


# =============================================================================
# ERRORS
# =============================================================================


class ClipSchemaError(ValueError):
    """A clip bundle document does not follow the JSON schema.

    Parameters
    ----------
    path : str
        JSON path of the offending value, e.g. ``frames[3].expression``.
    message : str

    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


# =============================================================================
# FRAME PARAMETERS
# =============================================================================


def _frozen_vector(value, name, shape):
    array = np.array(value, dtype=float)
    if array.shape != shape:
        raise ValueError(
            f"{name} must have shape {shape}, found {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} has non-finite entries")
    array.flags.writeable = False
    return array


def _check_axis_angle(array, name):
    magnitude = np.linalg.norm(np.atleast_2d(array), axis=-1).max()
    if magnitude >= _FULL_TURN:
        raise ValueError(
            f"{name} has an axis-angle magnitude {magnitude:.6g} >= 2*pi"
        )


def _zeros3():
    return np.zeros(3)


def _zeros23():
    return np.zeros((2, 3))


@dataclass(frozen=True, eq=False, repr=False)
class PoseParams:
    """Rigid part of a frame: rotations (axis-angle radians) and translation.

    The neck is applied inside skinning, the global rotation and the
    translation move the whole skinned mesh.

    """

    global_rotation: np.ndarray = field(default_factory=_zeros3)
    translation: np.ndarray = field(default_factory=_zeros3)
    neck_rotation: np.ndarray = field(default_factory=_zeros3)
    jaw_rotation: np.ndarray = field(default_factory=_zeros3)
    eye_rotations: np.ndarray = field(default_factory=_zeros23)

    def __post_init__(self):
        """Coerce to read-only arrays and validate."""
        setter = object.__setattr__
        for name in _ROTATION_FIELDS + ("translation",):
            setter(self, name, _frozen_vector(getattr(self, name), name, (3,)))
        eyes = _frozen_vector(self.eye_rotations, "eye_rotations", (2, 3))
        setter(self, "eye_rotations", eyes)
        for name in _ROTATION_FIELDS + ("eye_rotations",):
            _check_axis_angle(getattr(self, name), name)

    def pose_vector(self):
        """θ as 15 values: global, neck, jaw, left eye, right eye."""
        return np.concatenate(
            [
                self.global_rotation,
                self.neck_rotation,
                self.jaw_rotation,
                self.eye_rotations.ravel(),
            ]
        )

    @property
    def is_rest(self):
        """True when every rotation and the translation are exactly 0."""
        return not any(
            np.any(getattr(self, name))
            for name in _ROTATION_FIELDS + ("translation", "eye_rotations")
        )

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        degrees = np.rad2deg(np.linalg.norm(self.global_rotation))
        return f"<PoseParams global={degrees:.3g}deg>"


@dataclass(frozen=True, eq=False, repr=False)
class FrameParams(PoseParams):
    """Expression coefficients plus the pose of one frame.

    Parameters
    ----------
    expression : array-like of shape (n_psi,)
        ψ coefficients.
    global_rotation, translation, neck_rotation, jaw_rotation : 3-vectors
        Axis-angle rotations (radians, magnitude < 2π) and translation in
        model units. Zero by default.
    eye_rotations : array-like of shape (2, 3)
        Left and right eyeball axis-angle rotations.

    """

    expression: np.ndarray = None

    def __post_init__(self):
        """Coerce to read-only arrays and validate."""
        super().__post_init__()
        if self.expression is None:
            raise TypeError("FrameParams requires an expression vector")
        expression = np.array(self.expression, dtype=float)
        expression = _frozen_vector(
            expression, "expression", (expression.size,)
        )
        object.__setattr__(self, "expression", expression)

    @classmethod
    def neutral(cls, n_psi):
        """Zero expression in the rest pose."""
        return cls(expression=np.zeros(n_psi))

    @property
    def n_psi(self):
        """Expression vector length."""
        return len(self.expression)

    @property
    def pose(self):
        """The :py:class:`PoseParams` part of the frame."""
        return PoseParams(
            **{
                name: getattr(self, name)
                for name in _FRAME_KEYS
                if name != "expression"
            }
        )

    def replace(self, **kwargs):
        """Copy of the frame with some fields replaced."""
        return dataclasses.replace(self, **kwargs)

    def to_dict(self):
        """JSON-compatible representation."""
        return {name: getattr(self, name).tolist() for name in _FRAME_KEYS}

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        norm = np.linalg.norm(self.expression)
        return f"<FrameParams n_psi={self.n_psi} |psi|={norm:.4g}>"


# =============================================================================
# CLIP BUNDLE
# =============================================================================


@dataclass(frozen=True, eq=False, repr=False)
class ClipBundle(DiffEqualityMixin):
    """Fitted parameters of a clip.

    Parameters
    ----------
    shape : array-like of shape (n_beta,)
        Identity coefficients β shared by every frame.
    frames : sequence of FrameParams
        At least one frame; all with the same expression length.
    camera : Camera
        Camera shared by every frame.
    fps : float, optional
        Frame rate. Default 25.
    extensions : dict, optional
        Extra JSON data (alpha matte references, provenance, ...) kept
        verbatim on round-trip.

    """

    shape: np.ndarray
    frames: tuple
    camera: Camera
    fps: float = 25.0
    extensions: dict = field(default_factory=dict)

    def __post_init__(self):
        """Coerce and validate."""
        setter = object.__setattr__
        shape = np.array(self.shape, dtype=float)
        setter(self, "shape", _frozen_vector(shape, "shape", (shape.size,)))

        frames = tuple(self.frames)
        if not frames:
            raise ValueError("a clip needs at least one frame")
        for index, frame in enumerate(frames):
            if not isinstance(frame, FrameParams):
                raise TypeError(
                    f"frames[{index}] must be FrameParams, found "
                    f"{type(frame).__name__}"
                )
            if frame.n_psi != frames[0].n_psi:
                raise ValueError(
                    f"frames[{index}] has {frame.n_psi} expression "
                    f"coefficients, frames[0] has {frames[0].n_psi}"
                )
        setter(self, "frames", frames)

        if not isinstance(self.camera, Camera):
            raise TypeError(
                f"camera must be a Camera, found {type(self.camera).__name__}"
            )
        fps = float(self.fps)
        if not np.isfinite(fps) or fps <= 0:
            raise ValueError(f"fps must be positive, found {self.fps!r}")
        setter(self, "fps", fps)
        setter(self, "extensions", dict(self.extensions or {}))

    # SIZES ===================================================================

    @property
    def n_frames(self):
        """Frame count."""
        return len(self.frames)

    @property
    def n_beta(self):
        """Identity vector length."""
        return len(self.shape)

    @property
    def n_psi(self):
        """Expression vector length."""
        return self.frames[0].n_psi

    def __len__(self):
        """x.__len__() <==> len(x)."""
        return self.n_frames

    @property
    def expressions(self):
        """``(T, n_psi)`` expression matrix."""
        return np.stack([frame.expression for frame in self.frames])

    def check_assets(self, assets):
        """Raise ValueError when β or ψ lengths disagree with ``assets``."""
        if self.n_beta != assets.n_beta or self.n_psi != assets.n_psi:
            raise ValueError(
                f"clip has n_beta={self.n_beta} n_psi={self.n_psi}, assets "
                f"expect n_beta={assets.n_beta} n_psi={assets.n_psi}"
            )

    def replace(self, **kwargs):
        """Copy of the clip with some fields replaced."""
        return dataclasses.replace(self, **kwargs)

    # IO ======================================================================

    def to_dict(self):
        """JSON-compatible representation."""
        data = {
            "shape": self.shape.tolist(),
            "camera": self.camera.to_dict(),
            "fps": self.fps,
            "frames": [frame.to_dict() for frame in self.frames],
        }
        if self.extensions:
            data["extensions"] = self.extensions
        return data

    def to_json(self, indent=None):
        """Serialise to a JSON string."""
        return json.dumps(self.to_dict(), indent=indent)

    def hash(self):
        """SHA-256 hex digest of the canonical JSON encoding."""
        canonical = json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data, *, n_beta=None, n_psi=None):
        """Parse a decoded JSON document.

        Parameters
        ----------
        data : dict
        n_beta, n_psi : int, optional
            Expected identity and expression lengths.

        Raises
        ------
        ClipSchemaError
            With the JSON path of the first problem found.

        """
        return _parse_clip(data, n_beta=n_beta, n_psi=n_psi)

    @classmethod
    def from_json(cls, text, *, n_beta=None, n_psi=None):
        """Parse a JSON string."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ClipSchemaError("", f"invalid JSON ({err})")
        return cls.from_dict(data, n_beta=n_beta, n_psi=n_psi)

    def save(self, path):
        """Write the bundle as JSON, atomically."""
        with atomic_write(path, "w", encoding="utf-8") as fp:
            fp.write(self.to_json(indent=1))

    @classmethod
    def load(cls, path, *, n_beta=None, n_psi=None):
        """Read a JSON bundle."""
        text = pathlib.Path(path).read_text(encoding="utf-8")
        return cls.from_json(text, n_beta=n_beta, n_psi=n_psi)

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare parameters, camera, frame rate and extensions."""

        def close(left, right):
            return left.shape == right.shape and bool(
                np.allclose(
                    left, right, rtol=rtol, atol=atol, equal_nan=equal_nan
                )
            )

        def frames_cmp(left, right):
            if len(left) != len(right):
                return False
            return all(
                close(getattr(lf, name), getattr(rf, name))
                for lf, rf in zip(left, right)
                for name in _FRAME_KEYS
            )

        def camera_cmp(left, right):
            return left.aequals(
                right, rtol=rtol, atol=atol, equal_nan=equal_nan
            )

        return diff(
            self,
            other,
            shape=close,
            frames=frames_cmp,
            camera=camera_cmp,
            fps=np.isclose,
            extensions=lambda left, right: left == right,
        )

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return (
            f"<ClipBundle frames={self.n_frames} n_beta={self.n_beta} "
            f"n_psi={self.n_psi} fps={self.fps:g}>"
        )


def load_clip_bundle(path, *, n_beta=None, n_psi=None):
    """Read a clip bundle JSON file. See :py:meth:`ClipBundle.load`."""
    return ClipBundle.load(path, n_beta=n_beta, n_psi=n_psi)


def save_clip_bundle(bundle, path):
    """Write a clip bundle JSON file. See :py:meth:`ClipBundle.save`."""
    bundle.save(path)


# =============================================================================
# PARSING
# =============================================================================


def _get(data, key, path):
    if not isinstance(data, dict):
        raise ClipSchemaError(path, "expected an object")
    if key not in data:
        raise ClipSchemaError(f"{path}.{key}" if path else key, "missing")
    return data[key]


def _array(value, path, shape):
    try:
        array = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ClipSchemaError(path, "expected numbers")
    if array.shape != shape:
        raise ClipSchemaError(
            path, f"expected shape {shape}, found {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise ClipSchemaError(path, "non-finite value")
    return array


def _vector(value, path, length=None):
    if not isinstance(value, list):
        raise ClipSchemaError(path, "expected a list")
    if length is not None and len(value) != length:
        raise ClipSchemaError(
            path, f"length mismatch: expected {length}, found {len(value)}"
        )
    return _array(value, path, (len(value),))


def _parse_camera(data, path):
    values = {}
    for key in ("fx", "fy", "cx", "cy", "width", "height"):
        value = _get(data, key, path)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ClipSchemaError(f"{path}.{key}", "expected a number")
        values[key] = value
    rotation = _get(data, "rotation", path)
    values["rotation"] = _array(rotation, f"{path}.rotation", (3, 3))
    translation = _get(data, "translation", path)
    values["translation"] = _vector(translation, f"{path}.translation", 3)
    try:
        return Camera(**values)
    except ValueError as err:
        raise ClipSchemaError(path, str(err))


def _parse_frame(data, path, n_psi):
    values = {}
    expression = _get(data, "expression", path)
    values["expression"] = _vector(expression, f"{path}.expression", n_psi)
    for key in _ROTATION_FIELDS + ("translation",):
        values[key] = _vector(_get(data, key, path), f"{path}.{key}", 3)
    eyes = _get(data, "eye_rotations", path)
    values["eye_rotations"] = _array(eyes, f"{path}.eye_rotations", (2, 3))
    try:
        return FrameParams(**values)
    except ValueError as err:
        raise ClipSchemaError(path, str(err))


def _parse_clip(data, n_beta, n_psi):
    shape = _vector(_get(data, "shape", ""), "shape", n_beta)
    camera = _parse_camera(_get(data, "camera", ""), "camera")

    fps = _get(data, "fps", "")
    if isinstance(fps, bool) or not isinstance(fps, (int, float)) or fps <= 0:
        raise ClipSchemaError(
            "fps", f"expected a positive number, found {fps!r}"
        )

    raw_frames = _get(data, "frames", "")
    if not isinstance(raw_frames, list) or not raw_frames:
        raise ClipSchemaError("frames", "expected a non-empty list")
    frames = []
    for index, raw in enumerate(raw_frames):
        frame = _parse_frame(raw, f"frames[{index}]", n_psi)
        # every frame must agree with the first one
        n_psi = frame.n_psi
        frames.append(frame)

    extensions = data.get("extensions", {})
    if not isinstance(extensions, dict):
        raise ClipSchemaError("extensions", "expected an object")

    return ClipBundle(
        shape=shape,
        frames=frames,
        camera=camera,
        fps=fps,
        extensions=extensions,
    )


# =============================================================================
# SYNTHETIC CLIPS
# =============================================================================


def _oscillation(random, n_channels, times, low_hz, high_hz):
    """Smooth unit-amplitude sinusoids, one per channel, ``(T, C)``."""
    frequency = random.uniform(low_hz, high_hz, n_channels)
    phase = random.uniform(0.0, 2.0 * np.pi, n_channels)
    return np.sin(2.0 * np.pi * frequency * times[:, None] + phase)


def generate_synthetic_clip(
    assets,
    seed=0,
    n_frames=16,
    fps=25.0,
    width=64,
    height=64,
    *,
    expressiveness=None,
):
    """Smooth talking-head-like parameter trajectories.

    Each expression coefficient follows a sinusoid of 0.2 to 1 Hz with a
    random phase; the clip amplitude (``expressiveness``) scales all of
    them. The head sways with a few degrees of yaw and pitch, the jaw opens
    and closes, and the eyes drift slightly.

    Parameters
    ----------
    assets : FaceModelAssets
        Provides the β/ψ sizes and the expression coefficient scale.
    seed : int or numpy.random.SeedSequence
    n_frames : int
    fps : float
    width, height : int
        Resolution of the :py:meth:`Camera.default` camera.
    expressiveness : float, optional
        Expression amplitude multiplier; drawn from U(0.2, 1.6) when
        omitted.

    Returns
    -------
    ClipBundle

    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, found {n_frames}")
    random = np.random.default_rng(seed)
    times = np.arange(n_frames) / float(fps)

    if expressiveness is None:
        expressiveness = random.uniform(0.2, 1.6)
    psi_scale = expression_coefficient_scale(assets.n_vertices, assets.n_psi)
    weights = random.standard_normal(assets.n_psi)
    expression = _oscillation(random, assets.n_psi, times, 0.2, 1.0)
    expression *= expressiveness * psi_scale * weights

    beta_scale = expression_coefficient_scale(
        assets.n_vertices, assets.n_beta, rms=_SHAPE_RMS
    )
    shape = random.standard_normal(assets.n_beta) * beta_scale

    sway = np.deg2rad(random.uniform(1.0, 6.0, 2))
    head = _oscillation(random, 2, times, 0.1, 0.5) * sway
    global_rotation = np.column_stack([head, np.zeros(n_frames)])
    neck = _oscillation(random, 3, times, 0.1, 0.5) * np.deg2rad(1.5)
    jaw_open = 0.5 * (1.0 + _oscillation(random, 1, times, 0.5, 2.0))
    jaw = np.column_stack(
        [jaw_open[:, 0] * random.uniform(0.02, 0.12), np.zeros((n_frames, 2))]
    )
    eyes = _oscillation(random, 6, times, 0.2, 1.0) * np.deg2rad(3.0)
    eyes[:, [2, 5]] = 0.0
    translation = _oscillation(random, 3, times, 0.1, 0.3) * 0.002

    frames = [
        FrameParams(
            expression=expression[index],
            global_rotation=global_rotation[index],
            translation=translation[index],
            neck_rotation=neck[index],
            jaw_rotation=jaw[index],
            eye_rotations=eyes[index].reshape(2, 3),
        )
        for index in range(n_frames)
    ]
    return ClipBundle(
        shape=shape,
        frames=frames,
        camera=Camera.default(width=width, height=height),
        fps=fps,
    )


def generate_synthetic_corpus(assets, n_clips, n_frames=16, seed=0, **kwargs):
    """Independent synthetic clips, one child seed each.

    Extra keyword arguments go to :py:func:`generate_synthetic_clip`.

    """
    if n_clips < 1:
        raise ValueError(f"n_clips must be >= 1, found {n_clips}")
    children = np.random.SeedSequence(seed).spawn(n_clips)
    return [
        generate_synthetic_clip(
            assets, seed=child, n_frames=n_frames, **kwargs
        )
        for child in children
    ]
