#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Procedural inner-mouth cavity.

A half-sphere of ``inner_mouth_count`` vertices closes the mouth opening.
Its rest placement comes from two points of the identity-shaped rest mesh,
the jaw joint ``J`` and the anchor lip vertex ``L``::

    centre = (J + L) / 2
    radius = |L - J| / 2
    d      = (L - J) / |L - J|

and the cap bulges from the centre away from ``d``. The vertices are not
skinned: they rigidly follow the world transform of the jaw joint, and
their expression deformation is zero.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import dataclasses

import numpy as np

from scipy import spatial

from ..core.rotation import axis_angle_to_matrix

# =============================================================================
# CONSTANTS
# =============================================================================

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


# =============================================================================
# CONSTRUCTION
# =============================================================================


def _frame(direction):
    """Two unit vectors completing ``direction`` to a right-handed frame."""
    for axis in np.eye(3):
        first = axis - axis.dot(direction) * direction
        norm = np.linalg.norm(first)
        if norm > 1e-6:
            first = first / norm
            return first, np.cross(direction, first)
    raise ValueError("direction must be a non-zero vector")


def hemisphere(n_points):
    """Unit half-sphere cap around ``-z`` and its triangulation.

    Points follow a Fibonacci spiral; the faces triangulate the projection
    of the cap on the ``xy`` plane, so the rim stays open.

    Returns
    -------
    points : (n, 3) array
    faces : (m, 3) int array

    """
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, found {n_points}")
    index = np.arange(n_points)
    height = (index + 0.5) / n_points
    ring = np.sqrt(1.0 - height**2)
    angle = index * _GOLDEN_ANGLE
    disk = np.column_stack([ring * np.cos(angle), ring * np.sin(angle)])
    points = np.column_stack([disk, -height])
    faces = spatial.Delaunay(disk).simplices.astype(np.intp)
    return points, faces


def inner_mouth_rest(assets, shaped_vertices, rest_joints):
    """Rest positions and faces of the inner mouth.

    Parameters
    ----------
    assets : FaceModelAssets
    shaped_vertices : (N_v, 3) array
        Identity-shaped rest vertices.
    rest_joints : (K, 3) array

    Returns
    -------
    vertices : (inner_mouth_count, 3) array
    faces : (m, 3) int array
        Indices relative to the first inner-mouth vertex.

    """
    if not 0 <= assets.lip_vertex_index < len(shaped_vertices):
        raise ValueError(
            f"lip_vertex_index {assets.lip_vertex_index} out of range for "
            f"{len(shaped_vertices)} vertices"
        )
    jaw = rest_joints[assets.jaw_joint_index]
    lip = shaped_vertices[assets.lip_vertex_index]
    axis = lip - jaw
    length = np.linalg.norm(axis)
    if length == 0:
        raise ValueError("lip anchor and jaw joint coincide")
    direction = axis / length
    first, second = _frame(direction)

    unit, faces = hemisphere(assets.inner_mouth_count)
    basis = np.stack([first, second, direction])
    centre = 0.5 * (jaw + lip)
    vertices = centre + 0.5 * length * (unit @ basis)
    return vertices, faces


def _jaw_transform(assets, mesh, jaw_rotation):
    jaw = assets.jaw_joint_index
    if jaw_rotation is None:
        return mesh.joint_transforms[jaw]

    parent = assets.joint_parents[jaw]
    if parent < 0:
        parent_transform = np.eye(4)
    else:
        parent_transform = mesh.joint_transforms[parent]
    rotation = axis_angle_to_matrix(jaw_rotation)
    joint = mesh.rest_joints[jaw]
    local = np.eye(4)
    local[:3, :3] = rotation
    local[:3, 3] = joint - rotation @ joint
    return parent_transform @ local


def extend_inner_mouth(assets, mesh, jaw_rotation=None):
    """Append the inner-mouth vertices and faces to a posed mesh.

    Parameters
    ----------
    assets : FaceModelAssets
    mesh : PosedMesh
        Mesh without inner mouth.
    jaw_rotation : array-like of shape (3,), optional
        Override of the jaw rotation the cavity follows. By default it
        follows the jaw joint transform stored in ``mesh``.

    Returns
    -------
    PosedMesh
        ``mesh`` itself when the assets declare no inner mouth.

    """
    if not assets.inner_mouth_count:
        return mesh
    if mesh.n_inner_mouth:
        raise ValueError("mesh already carries an inner mouth")

    rest, faces = inner_mouth_rest(
        assets, mesh.shaped_vertices, mesh.rest_joints
    )
    transform = _jaw_transform(assets, mesh, jaw_rotation)
    posed = rest @ transform[:3, :3].T + transform[:3, 3]

    n_template = mesh.n_template_vertices
    return dataclasses.replace(
        mesh,
        vertices=np.concatenate([mesh.vertices, posed]),
        faces=np.concatenate([mesh.faces, faces + n_template]),
        expr_deformation=np.concatenate(
            [mesh.expr_deformation, np.zeros_like(rest)]
        ),
    )
