#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Parametric face forward map.

The posed mesh of identity ``β``, expression ``ψ`` and pose ``θ`` is::

    shaped = T + B_S(β)
    J      = regressor @ shaped
    T_P    = shaped + B_P(θ) + B_E(ψ)
    posed  = R_global · LBS(T_P, J, θ, W) + t

The expression deformation ``Δ_expr = B_E(ψ)`` is evaluated in template
space before skinning, so it does not depend on ``β`` nor on ``θ``.

"""

# =============================================================================
# IMPORTS
# =============================================================================

from dataclasses import dataclass

import methodtools

import numpy as np

from .inner_mouth import extend_inner_mouth
from ..core.clip import PoseParams
from ..core.rotation import Rotation, axis_angle_to_matrix

# =============================================================================
# CONSTANTS
# =============================================================================

_EYE = np.eye(3)

_WEIGHT_ATOL = 1e-6


# =============================================================================
# POSED MESH
# =============================================================================


@dataclass(frozen=True, eq=False)
class PosedMesh:
    """Output of :py:func:`evaluate_mesh`.

    Parameters
    ----------
    vertices : array of shape (N_total, 3)
        Posed world-space vertices, template first and inner mouth last.
    faces : array of shape (F_total, 3)
        Template faces followed by the inner-mouth faces.
    expr_deformation : array of shape (N_total, 3)
        ``B_E(ψ)``; rows of the inner-mouth vertices are zero.
    joints_posed : array of shape (K, 3)
        World-space posed joint locations.
    joint_transforms : array of shape (K, 4, 4)
        Rest-to-world transform of each joint, global motion included.
    rest_joints : array of shape (K, 3)
        Joints regressed from the shaped rest vertices.
    rest_vertices : array of shape (N_v, 3)
        Posed template ``T_P`` before skinning.
    shaped_vertices : array of shape (N_v, 3)
        Identity-shaped template ``T + B_S(β)``.

    """

    vertices: np.ndarray
    faces: np.ndarray
    expr_deformation: np.ndarray
    joints_posed: np.ndarray
    joint_transforms: np.ndarray
    rest_joints: np.ndarray
    rest_vertices: np.ndarray
    shaped_vertices: np.ndarray

    @property
    def n_vertices(self):
        """Total vertex count, inner mouth included."""
        return len(self.vertices)

    @property
    def n_template_vertices(self):
        """Vertex count of the skinned template."""
        return len(self.rest_vertices)

    @property
    def n_inner_mouth(self):
        """Appended inner-mouth vertex count."""
        return self.n_vertices - self.n_template_vertices


# =============================================================================
# BLENDSHAPES
# =============================================================================


def _coefficients(values, expected, name):
    values = np.asarray(values, dtype=float)
    if values.shape != (expected,):
        raise ValueError(
            f"{name} must have {expected} coefficients, found shape "
            f"{values.shape}"
        )
    return values


def _blend(basis, coefficients):
    n_vertices, _, n_coefficients = basis.shape
    flat = basis.reshape(3 * n_vertices, n_coefficients) @ coefficients
    return flat.reshape(n_vertices, 3)


def shape_offset(assets, shape):
    """Identity offsets ``B_S(β) = S β``, shape ``(N_v, 3)``."""
    shape = _coefficients(shape, assets.n_beta, "shape")
    return _blend(assets.shape_basis, shape)


def expression_offset(assets, expression):
    """Expression offsets ``B_E(ψ) = E ψ``, shape ``(N_v, 3)``."""
    expression = _coefficients(expression, assets.n_psi, "expression")
    return _blend(assets.expr_basis, expression)


def joint_rotation_matrices(assets, pose):
    """Local rotation of every joint, shape ``(K, 3, 3)``.

    The root is the identity (the global rotation is applied after
    skinning); neck, jaw and eyes take their pose rotations and any extra
    joint stays at rest.

    """
    local = np.zeros((assets.n_joints, 3))
    by_name = {
        "neck": pose.neck_rotation,
        "jaw": pose.jaw_rotation,
        "eye_l": pose.eye_rotations[0],
        "eye_r": pose.eye_rotations[1],
    }
    for index, name in enumerate(assets.joint_names):
        if name in by_name:
            local[index] = by_name[name]
    return axis_angle_to_matrix(local)


def pose_feature(rotations):
    """Flattened ``R_k - I`` of the non-root joints."""
    rotations = np.asarray(rotations, dtype=float)
    return (rotations[1:] - _EYE).ravel()


def pose_corrective_offset(assets, pose):
    """Pose-corrective offsets ``B_P(θ) = P f(θ)``, shape ``(N_v, 3)``.

    Parameters
    ----------
    assets : FaceModelAssets
    pose : PoseParams or array-like of shape (n_pose,)
        A pose, or directly the feature vector of :py:func:`pose_feature`.

    """
    if isinstance(pose, PoseParams):
        feature = pose_feature(joint_rotation_matrices(assets, pose))
        if not assets.n_pose:
            feature = feature[:0]
    else:
        feature = _coefficients(pose, assets.n_pose, "pose feature")
    return _blend(assets.pose_basis, feature)


def regress_joints(assets, shaped_vertices):
    """Rest joint locations ``regressor @ shaped_vertices``, ``(K, 3)``."""
    shaped_vertices = np.asarray(shaped_vertices, dtype=float)
    if shaped_vertices.shape != (assets.n_vertices, 3):
        raise ValueError(
            f"expected ({assets.n_vertices}, 3) vertices, found "
            f"{shaped_vertices.shape}"
        )
    return assets.joint_regressor @ shaped_vertices


# =============================================================================
# SKINNING
# =============================================================================


def _as_matrices(joint_rotations):
    if isinstance(joint_rotations, np.ndarray):
        return joint_rotations.astype(float)
    matrices = [
        rotation.as_matrix() if isinstance(rotation, Rotation) else rotation
        for rotation in joint_rotations
    ]
    return np.asarray(matrices, dtype=float)


def _rigid(rotation, translation):
    transform = np.eye(4)
    transform[:3, :3] = rotation
    transform[:3, 3] = translation
    return transform


def skinning_transforms(joints, joint_rotations, parents):
    """Rest-to-posed transforms ``A_k = G_k [I | -J_k]``, ``(K, 4, 4)``.

    ``G_k`` chains ``[R_k | J_k - J_parent]`` from the root, whose own
    transform is ``[R_0 | J_0]``.

    """
    chain = np.empty((len(parents), 4, 4))
    for joint, parent in enumerate(parents):
        if parent < 0:
            local = _rigid(joint_rotations[joint], joints[joint])
            chain[joint] = local
        else:
            offset = joints[joint] - joints[parent]
            local = _rigid(joint_rotations[joint], offset)
            chain[joint] = chain[parent] @ local
    rest_to_posed = chain.copy()
    moved = np.einsum("kij,kj->ki", chain[:, :3, :3], joints)
    rest_to_posed[:, :3, 3] -= moved
    return rest_to_posed


def linear_blend_skinning(
    vertices_rest,
    joints,
    joint_rotations,
    blend_weights,
    parents=None,
    return_transforms=False,
):
    """Pose rest vertices with linear blend skinning.

    Parameters
    ----------
    vertices_rest : array-like of shape (N, 3)
    joints : array-like of shape (K, 3)
        Rest joint locations.
    joint_rotations : sequence of K Rotation or array of shape (K, 3, 3)
        Local joint rotations.
    blend_weights : array-like of shape (N, K)
        Non-negative rows summing to 1 within 1e-6.
    parents : array-like of shape (K,), optional
        Parent of each joint (``-1`` for the root), parents first. By
        default joint 0 is the root and every other joint hangs from it.
    return_transforms : bool, optional
        Also return the ``(K, 4, 4)`` per-joint transforms.

    Returns
    -------
    numpy.ndarray of shape (N, 3)
        With all rotations exactly the identity the input is returned
        unchanged (as a copy).

    """
    vertices_rest = np.asarray(vertices_rest, dtype=float)
    joints = np.asarray(joints, dtype=float)
    weights = np.asarray(blend_weights, dtype=float)
    rotations = _as_matrices(joint_rotations)
    n_joints = len(joints)

    if parents is None:
        parents = [-1] + [0] * (n_joints - 1)
    parents = np.asarray(parents, dtype=int)

    if rotations.shape != (n_joints, 3, 3) or len(parents) != n_joints:
        raise ValueError(
            f"expected {n_joints} joint rotations and parents, found "
            f"{rotations.shape} and {parents.shape}"
        )
    if weights.shape != (len(vertices_rest), n_joints):
        raise ValueError(
            f"blend_weights must have shape ({len(vertices_rest)}, "
            f"{n_joints}), found {weights.shape}"
        )
    if np.any(weights < 0) or not np.allclose(
        weights.sum(axis=1), 1.0, rtol=0, atol=_WEIGHT_ATOL
    ):
        raise ValueError(
            "blend_weights rows must be non-negative and sum to 1"
        )

    if np.array_equal(rotations, np.broadcast_to(_EYE, rotations.shape)):
        posed = vertices_rest.copy()
        transforms = np.broadcast_to(np.eye(4), (n_joints, 4, 4)).copy()
    else:
        transforms = skinning_transforms(joints, rotations, parents)
        blended = np.einsum("vk,kij->vij", weights, transforms[:, :3, :])
        posed = (
            np.einsum("vij,vj->vi", blended[:, :, :3], vertices_rest)
            + blended[:, :, 3]
        )

    if return_transforms:
        return posed, transforms
    return posed


# =============================================================================
# FORWARD MAP
# =============================================================================


def _global_transform(pose):
    rotation = axis_angle_to_matrix(pose.global_rotation)
    return _rigid(rotation, pose.translation)


def evaluate_mesh(assets, shape, expression, pose=None, *, inner_mouth=True):
    """Evaluate the face model.

    Parameters
    ----------
    assets : FaceModelAssets
    shape : array-like of shape (n_beta,)
        Identity coefficients β.
    expression : array-like of shape (n_psi,)
        Expression coefficients ψ.
    pose : PoseParams, optional
        Rotations and translation; rest pose by default. A
        :py:class:`FrameParams` is accepted as well.
    inner_mouth : bool, optional
        Append the inner-mouth vertices (when the assets declare them).

    Returns
    -------
    PosedMesh

    """
    pose = PoseParams() if pose is None else pose
    if not isinstance(pose, PoseParams):
        raise TypeError(
            f"pose must be PoseParams, found {type(pose).__name__}"
        )

    shaped = assets.template_vertices + shape_offset(assets, shape)
    deformation = expression_offset(assets, expression)
    rest_joints = regress_joints(assets, shaped)

    rotations = joint_rotation_matrices(assets, pose)
    rest_vertices = shaped + pose_corrective_offset(assets, pose)
    rest_vertices = rest_vertices + deformation

    skinned, transforms = linear_blend_skinning(
        rest_vertices,
        rest_joints,
        rotations,
        assets.blend_weights,
        parents=assets.joint_parents,
        return_transforms=True,
    )

    # rigid head motion after skinning
    if np.any(pose.global_rotation) or np.any(pose.translation):
        world = _global_transform(pose)
        vertices = skinned @ world[:3, :3].T + world[:3, 3]
        transforms = world @ transforms
    else:
        vertices = skinned

    joints_posed = (
        np.einsum("kij,kj->ki", transforms[:, :3, :3], rest_joints)
        + transforms[:, :3, 3]
    )

    mesh = PosedMesh(
        vertices=vertices,
        faces=assets.faces,
        expr_deformation=deformation,
        joints_posed=joints_posed,
        joint_transforms=transforms,
        rest_joints=rest_joints,
        rest_vertices=rest_vertices,
        shaped_vertices=shaped,
    )
    if inner_mouth and assets.inner_mouth_count:
        mesh = extend_inner_mouth(assets, mesh)
    return mesh


def template_with_inner_mouth(assets):
    """Rest vertices for β = 0, ψ = 0 in the rest pose, inner mouth included.

    These are the template-space coordinates that get positionally encoded.

    """
    mesh = evaluate_mesh(
        assets, np.zeros(assets.n_beta), np.zeros(assets.n_psi)
    )
    return mesh.vertices


# =============================================================================
# FACE MODEL
# =============================================================================


class FaceModel:
    """Face model bound to a set of assets.

    Thin object-oriented front end over the module functions; it caches
    the rest template extended with the inner mouth.

    Parameters
    ----------
    assets : FaceModelAssets

    """

    def __init__(self, assets):
        self._assets = assets

    @property
    def assets(self):
        """The bound :py:class:`FaceModelAssets`."""
        return self._assets

    def shape_offset(self, shape):
        """See :py:func:`shape_offset`."""
        return shape_offset(self._assets, shape)

    def expression_offset(self, expression):
        """See :py:func:`expression_offset`."""
        return expression_offset(self._assets, expression)

    def __call__(self, shape, expression, pose=None):
        """See :py:func:`evaluate_mesh`."""
        return evaluate_mesh(self._assets, shape, expression, pose)

    def evaluate_frame(self, clip, index):
        """Mesh of frame ``index`` of a clip bundle."""
        frame = clip.frames[index]
        return evaluate_mesh(self._assets, clip.shape, frame.expression, frame)

    @methodtools.lru_cache(maxsize=None)
    @property
    def rest_template(self):
        """β = 0 rest mesh with the inner mouth (read-only vertices)."""
        vertices = template_with_inner_mouth(self._assets)
        vertices.flags.writeable = False
        return vertices

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return f"<FaceModel {self._assets!r}>"
