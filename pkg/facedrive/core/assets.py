#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Face-model assets and their seeded synthetic generator.

:py:class:`FaceModelAssets` holds everything the forward model needs: the
template mesh, the identity / expression / pose-corrective blendshape
bases, the skinning weights and the kinematic tree. Assets are stored on
disk as a ``.lka`` container.

:py:func:`generate_synthetic_assets` builds a closed sphere-like head with
column-orthonormal random bases and a five-joint rig (root, neck, jaw and
both eyes), so the whole pipeline runs without licensed model files.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
from dataclasses import dataclass

import numpy as np

from scipy import linalg
from scipy.spatial import ConvexHull

from ..container import TensorContainer
from ..utils import DiffEqualityMixin, array_allclose, diff

# =============================================================================
# CONSTANTS
# =============================================================================

#: Normalisation scalar of the expression deformation channels.
DEFAULT_EXPRESSION_SIGMA = 0.0104

#: Joint layout of the five-joint head rig.
HEAD_JOINT_NAMES = ("root", "neck", "jaw", "eye_l", "eye_r")

_HEAD_JOINT_PARENTS = (-1, 0, 1, 1, 1)

#: Half-axes of the synthetic head ellipsoid (x: width, y: height, z: depth).
SYNTHETIC_HEAD_RADII = np.array([0.075, 0.095, 0.085])

# rest joint targets, in unit-sphere coordinates before the ellipsoid scale
_JOINT_TARGETS = {
    "neck": (0.0, -0.75, -0.15),
    "jaw": (0.0, -0.35, 0.25),
    "eye_l": (0.35, 0.25, 0.7),
    "eye_r": (-0.35, 0.25, 0.7),
}

_MOUTH_DIRECTION = np.array([0.0, -0.45, 0.89])

_NECK_CAP_Y = -0.9

_ASSET_ENTRIES = {
    "template_vertices": "<f8",
    "faces": "<i4",
    "shape_basis": "<f8",
    "expr_basis": "<f8",
    "pose_basis": "<f8",
    "blend_weights": "<f8",
    "joint_regressor": "<f8",
    "joint_parents": "<i4",
    "head_vertex_mask": "<i4",
    "inner_mouth_count": "<i4",
    "lip_vertex_index": "<i4",
    "expression_sigma": "<f8",
}

_FIELD_DTYPES = {
    "template_vertices": np.float64,
    "faces": np.intp,
    "shape_basis": np.float64,
    "expr_basis": np.float64,
    "pose_basis": np.float64,
    "blend_weights": np.float64,
    "joint_regressor": np.float64,
    "joint_parents": np.intp,
    "head_vertex_mask": bool,
    "inner_mouth_count": int,
    "lip_vertex_index": int,
    "expression_sigma": float,
}

logger = logging.getLogger(__name__)


# =============================================================================
# ASSETS
# =============================================================================


def _readonly(array, dtype):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False, repr=False)
class FaceModelAssets(DiffEqualityMixin):
    """Template, bases, skinning data and topology of a face model.

    Parameters
    ----------
    template_vertices : array of shape (N_v, 3)
        Neutral template ``T``, model units.
    faces : array of shape (N_f, 3)
        Triangle vertex indices.
    shape_basis : array of shape (N_v, 3, n_beta)
        Identity basis ``S``.
    expr_basis : array of shape (N_v, 3, n_psi)
        Expression basis ``E``.
    pose_basis : array of shape (N_v, 3, 9 * (K - 1))
        Pose-corrective basis ``P``, driven by the flattened ``R_k - I`` of
        the non-root joints.
    blend_weights : array of shape (N_v, K)
        Row-stochastic skinning weights ``W``.
    joint_regressor : array of shape (K, N_v)
        Linear map from shaped rest vertices to rest joint locations.
    joint_parents : array of shape (K,)
        Parent of each joint; ``-1`` for the root. Parents precede their
        children.
    head_vertex_mask : array of shape (N_v,)
        Vertices that belong to the rendered head.
    inner_mouth_count : int
        Number of procedural inner-mouth vertices appended by the model.
    lip_vertex_index : int
        Anchor vertex used to place the inner mouth.
    expression_sigma : float
        Scalar that normalises the expression deformation channels.

    """

    template_vertices: np.ndarray
    faces: np.ndarray
    shape_basis: np.ndarray
    expr_basis: np.ndarray
    pose_basis: np.ndarray
    blend_weights: np.ndarray
    joint_regressor: np.ndarray
    joint_parents: np.ndarray
    head_vertex_mask: np.ndarray
    inner_mouth_count: int = 0
    lip_vertex_index: int = 0
    expression_sigma: float = DEFAULT_EXPRESSION_SIGMA

    def __post_init__(self):
        """Coerce the arrays and validate the invariants."""
        for name, dtype in _FIELD_DTYPES.items():
            value = getattr(self, name)
            if dtype in (int, float):
                value = dtype(value)
            else:
                value = _readonly(value, dtype)
            object.__setattr__(self, name, value)
        self.validate()

    # SIZES ===================================================================

    @property
    def n_vertices(self):
        """Number of template vertices (without the inner mouth)."""
        return len(self.template_vertices)

    @property
    def n_total_vertices(self):
        """Number of vertices of an evaluated mesh."""
        return self.n_vertices + self.inner_mouth_count

    @property
    def n_faces(self):
        """Number of template faces."""
        return len(self.faces)

    @property
    def n_beta(self):
        """Size of the identity coefficient vector."""
        return self.shape_basis.shape[-1]

    @property
    def n_psi(self):
        """Size of the expression coefficient vector."""
        return self.expr_basis.shape[-1]

    @property
    def n_pose(self):
        """Size of the pose-corrective feature vector."""
        return self.pose_basis.shape[-1]

    @property
    def n_joints(self):
        """Number of joints of the kinematic tree."""
        return len(self.joint_parents)

    @property
    def joint_names(self):
        """Joint names, head rig first and ``extra_<i>`` afterwards."""
        names = list(HEAD_JOINT_NAMES[: self.n_joints])
        names.extend(
            f"extra_{idx}" for idx in range(self.n_joints - len(names))
        )
        return tuple(names)

    @property
    def jaw_joint_index(self):
        """Joint carrying the jaw rotation (the root if there is no jaw)."""
        return 2 if self.n_joints > 2 else 0

    # VALIDATION ==============================================================

    def validate(self, atol=1e-6):
        """Check shapes and invariants, raising ``ValueError`` on failure.

        - faces reference valid vertices;
        - ``joint_parents`` is a rooted tree listed parents-first;
        - every row of ``W`` is non-negative and sums to 1 within ``atol``;
        - bases are finite.

        """
        n_v = self.n_vertices
        template_shape = self.template_vertices.shape
        if len(template_shape) != 2 or template_shape[1] != 3:
            raise ValueError(
                "template_vertices must have shape (N_v, 3), found "
                f"{template_shape}"
            )
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValueError(
                f"faces must have shape (N_f, 3), found {self.faces.shape}"
            )
        if self.faces.size and (
            self.faces.min() < 0 or self.faces.max() >= n_v
        ):
            raise ValueError(
                f"faces reference vertices outside [0, {n_v})"
            )

        for name in ("shape_basis", "expr_basis", "pose_basis"):
            basis = getattr(self, name)
            if basis.ndim != 3 or basis.shape[:2] != (n_v, 3):
                raise ValueError(
                    f"{name} must have shape ({n_v}, 3, n), found "
                    f"{basis.shape}"
                )
            if not np.all(np.isfinite(basis)):
                raise ValueError(f"{name} has non-finite entries")

        parents = self.joint_parents
        n_joints = len(parents)
        if n_joints < 1 or parents[0] != -1:
            raise ValueError("joint_parents must start with the root (-1)")
        for joint, parent in enumerate(parents[1:], start=1):
            if not 0 <= parent < joint:
                raise ValueError(
                    f"joint {joint} has parent {parent}; parents must "
                    "precede their children"
                )

        if self.blend_weights.shape != (n_v, n_joints):
            raise ValueError(
                f"blend_weights must have shape ({n_v}, {n_joints}), "
                f"found {self.blend_weights.shape}"
            )
        if np.any(self.blend_weights < 0):
            raise ValueError("blend_weights must be non-negative")
        row_error = np.abs(self.blend_weights.sum(axis=1) - 1.0).max()
        if row_error > atol:
            raise ValueError(
                f"blend_weights rows must sum to 1 (max error {row_error:g})"
            )

        if self.joint_regressor.shape != (n_joints, n_v):
            raise ValueError(
                f"joint_regressor must have shape ({n_joints}, {n_v}), "
                f"found {self.joint_regressor.shape}"
            )
        if self.pose_basis.shape[-1] not in (0, 9 * (n_joints - 1)):
            raise ValueError(
                f"pose_basis must have 9 * (K - 1) = {9 * (n_joints - 1)} "
                f"columns, found {self.pose_basis.shape[-1]}"
            )
        if self.head_vertex_mask.shape != (n_v,):
            raise ValueError(
                f"head_vertex_mask must have shape ({n_v},), found "
                f"{self.head_vertex_mask.shape}"
            )
        if self.inner_mouth_count < 0 or self.inner_mouth_count in (1, 2):
            raise ValueError(
                "inner_mouth_count must be 0 or at least 3, found "
                f"{self.inner_mouth_count}"
            )
        if not 0 <= self.lip_vertex_index < n_v:
            raise ValueError(
                f"lip_vertex_index {self.lip_vertex_index} out of range "
                f"[0, {n_v})"
            )
        if not self.expression_sigma > 0:
            raise ValueError(
                f"expression_sigma must be > 0, found {self.expression_sigma}"
            )

    # IO ======================================================================

    def to_container(self):
        """Convert to a :py:class:`~facedrive.container.TensorContainer`."""
        entries = {}
        for name, dtype in _ASSET_ENTRIES.items():
            entries[name] = np.asarray(getattr(self, name)).astype(dtype)
        return TensorContainer(entries)

    @classmethod
    def from_container(cls, container):
        """Build assets from a container written by :py:meth:`to_container`.

        Raises
        ------
        facedrive.container.ContainerError
            If an entry is missing or has the wrong dtype.

        """
        values = {
            name: container.require(name, dtype=dtype)
            for name, dtype in _ASSET_ENTRIES.items()
        }
        for name in ("inner_mouth_count", "lip_vertex_index"):
            values[name] = int(values[name])
        values["expression_sigma"] = float(values["expression_sigma"])
        values["head_vertex_mask"] = values["head_vertex_mask"] != 0
        return cls(**values)

    def save(self, path):
        """Write the assets to a ``.lka`` file."""
        self.to_container().save(path)

    @classmethod
    def load(cls, path):
        """Read assets from a ``.lka`` file."""
        return cls.from_container(TensorContainer.load(path))

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare every field of the assets."""

        def arrays_cmp(left, right):
            return array_allclose(
                left,
                right,
                rtol=rtol,
                atol=atol,
                equal_nan=equal_nan,
                check_dtypes=check_dtypes,
            )

        members = dict.fromkeys(_ASSET_ENTRIES, arrays_cmp)
        return diff(self, other, **members)

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return (
            f"<FaceModelAssets n_vertices={self.n_vertices} "
            f"n_faces={self.n_faces} n_beta={self.n_beta} "
            f"n_psi={self.n_psi} n_joints={self.n_joints} "
            f"inner_mouth_count={self.inner_mouth_count}>"
        )


# =============================================================================
# PROCEDURAL MESHES
# =============================================================================


def _orient_outward(vertices, faces):
    """Flip faces whose normal points towards the mesh centroid."""
    centroid = vertices.mean(axis=0)
    tri = vertices[faces]
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    outward = np.einsum("ij,ij->i", normals, tri.mean(axis=1) - centroid)
    faces = faces.copy()
    flip = outward < 0
    faces[flip] = faces[flip][:, ::-1]
    return faces


def icosphere(subdivisions=0):
    """Unit icosphere with ``10 * 4**subdivisions + 2`` vertices.

    Returns
    -------
    vertices : array of shape (N, 3)
    faces : array of shape (F, 3)
        Wound counter-clockwise seen from outside.

    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    # fmt: off
    vertices = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    # fmt: on
    vertices = [np.array(v) / np.linalg.norm(v) for v in vertices]

    for _ in range(int(subdivisions)):
        midpoints = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                middle = vertices[a] + vertices[b]
                vertices.append(middle / np.linalg.norm(middle))
                midpoints[key] = len(vertices) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined

    vertices = np.array(vertices)
    return vertices, _orient_outward(vertices, np.array(faces, dtype=np.intp))


def fibonacci_sphere(n_points):
    """Unit sphere sampled on a Fibonacci spiral, triangulated by its hull.

    Returns
    -------
    vertices : array of shape (n_points, 3)
    faces : array of shape (2 * n_points - 4, 3)

    """
    index = np.arange(n_points) + 0.5
    y = 1.0 - 2.0 * index / n_points
    ring = np.sqrt(1.0 - y * y)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    angle = golden * index
    vertices = np.column_stack([ring * np.cos(angle), y, ring * np.sin(angle)])
    hull = ConvexHull(vertices)
    faces = np.asarray(hull.simplices, dtype=np.intp)
    return vertices, _orient_outward(vertices, faces)


def sphere_mesh(n_vertices):
    """Closed unit-sphere mesh with exactly ``n_vertices`` vertices.

    Icosphere counts (12, 42, 162, 642, ...) produce a subdivided
    icosahedron; other counts fall back to :py:func:`fibonacci_sphere`.

    """
    if n_vertices < 12:
        raise ValueError(f"n_vertices must be >= 12, found {n_vertices}")
    level = np.log((n_vertices - 2) / 10.0) / np.log(4.0)
    if (n_vertices - 2) % 10 == 0 and np.isclose(level, round(level)):
        return icosphere(int(round(level)))
    return fibonacci_sphere(n_vertices)


# =============================================================================
# SYNTHETIC ASSETS
# =============================================================================


def _orthonormal_basis(random, n_vertices, n_columns):
    """Column-orthonormal (3 N_v, n) basis reshaped to (N_v, 3, n)."""
    if n_columns == 0:
        return np.zeros((n_vertices, 3, 0))
    gaussian = random.standard_normal((3 * n_vertices, n_columns))
    q, r = linalg.qr(gaussian, mode="economic")
    # fix the sign ambiguity of the factorisation
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return q.reshape(n_vertices, 3, n_columns)


def expression_coefficient_scale(
    n_vertices, n_psi, rms=DEFAULT_EXPRESSION_SIGMA
):
    """Coefficient std giving a per-component deformation RMS of ``rms``.

    With a column-orthonormal basis, ``n`` coefficients of variance ``s^2``
    produce ``3 N_v`` offset components of variance ``n s^2 / (3 N_v)``.

    """
    return rms * np.sqrt(3.0 * n_vertices / n_psi)


def _joint_layout(n_joints, radii):
    names = list(HEAD_JOINT_NAMES[:n_joints])
    parents = list(_HEAD_JOINT_PARENTS[:n_joints])
    targets = [None] + [
        np.array(_JOINT_TARGETS[name]) * radii for name in names[1:]
    ]
    previous = 0
    for extra in range(n_joints - len(names)):
        parents.append(previous)
        targets.append(np.array([0.0, 0.3 + 0.15 * extra, 0.0]) * radii)
        previous = len(parents) - 1
    return parents, targets


def generate_synthetic_assets(
    seed=0,
    n_vertices=5023,
    n_beta=150,
    n_psi=65,
    n_joints=5,
    *,
    inner_mouth_count=200,
    sigma_samples=256,
):
    """Build deterministic synthetic face-model assets.

    The template is a sphere-like ellipsoid of ~0.1 model units facing
    ``+z`` with ``y`` up. Bases come from the QR factorisation of seeded
    Gaussian matrices, so each one is column-orthonormal. The joint
    regressor uses Gaussian kernels around fixed rig locations (uniform
    weights for the root) and the skinning weights are an inverse-distance
    soft assignment to the regressed joints.

    Parameters
    ----------
    seed : int
        Seed of the ``numpy`` generator. Equal seeds and sizes give
        bit-identical assets.
    n_vertices : int
        Template vertex count (>= 12).
    n_beta, n_psi : int
        Identity and expression basis sizes.
    n_joints : int
        Joint count (>= 2). The first five follow the head rig
        root/neck/jaw/eye_l/eye_r; extra joints chain off the root.
    inner_mouth_count : int, optional
        Procedural inner-mouth vertex count (0 or >= 3).
    sigma_samples : int, optional
        Expression draws used to measure ``expression_sigma``.

    Returns
    -------
    FaceModelAssets

    """
    n_vertices, n_joints = int(n_vertices), int(n_joints)
    if n_vertices < 12:
        raise ValueError(f"n_vertices must be >= 12, found {n_vertices}")
    if n_joints < 2:
        raise ValueError(f"n_joints must be >= 2, found {n_joints}")
    if n_beta < 1 or n_psi < 1:
        raise ValueError(
            f"n_beta and n_psi must be >= 1, found {n_beta} and {n_psi}"
        )
    n_pose = 9 * (n_joints - 1)
    widest = max(n_beta, n_psi, n_pose)
    if widest > 3 * n_vertices:
        raise ValueError(
            f"a basis with {widest} columns can not be orthonormal over "
            f"{3 * n_vertices} coordinates"
        )

    random = np.random.default_rng(seed)
    radii = SYNTHETIC_HEAD_RADII

    unit_vertices, faces = sphere_mesh(n_vertices)
    template = unit_vertices * radii

    shape_basis = _orthonormal_basis(random, n_vertices, n_beta)
    expr_basis = _orthonormal_basis(random, n_vertices, n_psi)
    pose_basis = _orthonormal_basis(random, n_vertices, n_pose)

    parents, targets = _joint_layout(n_joints, radii)
    bandwidth = 0.35 * radii.mean()
    regressor = np.empty((n_joints, n_vertices))
    regressor[0] = 1.0 / n_vertices
    for joint, target in enumerate(targets[1:], start=1):
        sq_dist = np.sum((template - target) ** 2, axis=1)
        kernel = np.exp(-sq_dist / (2.0 * bandwidth**2))
        regressor[joint] = kernel / kernel.sum()

    joints = regressor @ template
    distances = np.linalg.norm(template[:, None] - joints[None], axis=-1)
    weights = (1.0 / (distances + 0.25 * radii.mean())) ** 4
    weights /= weights.sum(axis=1, keepdims=True)

    head_mask = unit_vertices[:, 1] > _NECK_CAP_Y
    mouth = _MOUTH_DIRECTION / np.linalg.norm(_MOUTH_DIRECTION)
    lip_index = int(np.argmin(np.linalg.norm(unit_vertices - mouth, axis=1)))

    scale = expression_coefficient_scale(n_vertices, n_psi)
    psi_samples = random.standard_normal((n_psi, sigma_samples)) * scale
    offsets = expr_basis.reshape(-1, n_psi) @ psi_samples
    sigma = float(np.std(offsets))

    logger.debug(
        "Synthetic assets: %d vertices, %d faces, sigma=%.6f",
        n_vertices,
        len(faces),
        sigma,
    )

    return FaceModelAssets(
        template_vertices=template,
        faces=faces,
        shape_basis=shape_basis,
        expr_basis=expr_basis,
        pose_basis=pose_basis,
        blend_weights=weights,
        joint_regressor=regressor,
        joint_parents=np.array(parents),
        head_vertex_mask=head_mask,
        inner_mouth_count=inner_mouth_count,
        lip_vertex_index=lip_index,
        expression_sigma=sigma,
    )
