#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.model.inner_mouth

"""


# =============================================================================
# IMPORTS
# =============================================================================

import dataclasses

import numpy as np

import pytest

from facedrive.core import PoseParams
from facedrive.model import face_model, inner_mouth


# =============================================================================
# TESTS
# =============================================================================


def test_hemisphere_is_a_unit_cap():
    points, faces = inner_mouth.hemisphere(50)
    assert points.shape == (50, 3)
    np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
    assert np.all(points[:, 2] < 0)
    assert faces.min() >= 0 and faces.max() < 50


def test_hemisphere_too_few_points():
    with pytest.raises(ValueError, match=">= 3"):
        inner_mouth.hemisphere(2)


def test_inner_mouth_rest_construction(make_assets):
    assets = make_assets()
    shaped = assets.template_vertices
    joints = face_model.regress_joints(assets, shaped)
    vertices, faces = inner_mouth.inner_mouth_rest(assets, shaped, joints)

    jaw = joints[assets.jaw_joint_index]
    lip = shaped[assets.lip_vertex_index]
    centre = 0.5 * (jaw + lip)
    radius = 0.5 * np.linalg.norm(lip - jaw)
    direction = (lip - jaw) / (2 * radius)

    assert vertices.shape == (assets.inner_mouth_count, 3)
    np.testing.assert_allclose(
        np.linalg.norm(vertices - centre, axis=1), radius
    )
    assert np.all((vertices - centre) @ direction <= 0)
    assert faces.max() < assets.inner_mouth_count


def test_inner_mouth_rest_bad_anchor(make_assets):
    assets = make_assets()
    shaped = assets.template_vertices[: assets.lip_vertex_index]
    joints = face_model.regress_joints(assets, assets.template_vertices)
    with pytest.raises(ValueError, match="out of range"):
        inner_mouth.inner_mouth_rest(assets, shaped, joints)


def test_extend_inner_mouth_zero_count_is_noop(make_assets):
    assets = make_assets(inner_mouth_count=0)
    mesh = face_model.evaluate_mesh(
        assets, np.zeros(assets.n_beta), np.zeros(assets.n_psi)
    )
    assert inner_mouth.extend_inner_mouth(assets, mesh) is mesh
    assert mesh.n_vertices == assets.n_vertices


def test_extend_inner_mouth_layout(make_assets):
    assets = make_assets()
    psi = np.full(assets.n_psi, 0.05)
    mesh = face_model.evaluate_mesh(assets, np.zeros(assets.n_beta), psi)

    n_v = assets.n_vertices
    assert mesh.n_vertices == n_v + assets.inner_mouth_count
    assert mesh.n_inner_mouth == assets.inner_mouth_count
    assert not np.any(mesh.expr_deformation[n_v:])
    assert np.any(mesh.expr_deformation[:n_v])
    assert mesh.faces[assets.n_faces :].min() >= n_v


def test_extend_inner_mouth_twice_fails(make_assets):
    assets = make_assets()
    mesh = face_model.evaluate_mesh(
        assets, np.zeros(assets.n_beta), np.zeros(assets.n_psi)
    )
    with pytest.raises(ValueError, match="already"):
        inner_mouth.extend_inner_mouth(assets, mesh)


def test_inner_mouth_follows_jaw_rigidly(make_assets):
    assets = make_assets()
    beta, psi = np.zeros(assets.n_beta), np.zeros(assets.n_psi)
    n_v = assets.n_vertices

    rest = face_model.evaluate_mesh(assets, beta, psi)
    opened = face_model.evaluate_mesh(
        assets, beta, psi, PoseParams(jaw_rotation=[0.3, 0.0, 0.0])
    )

    jaw = opened.joint_transforms[assets.jaw_joint_index]
    expected = rest.vertices[n_v:] @ jaw[:3, :3].T + jaw[:3, 3]
    np.testing.assert_allclose(opened.vertices[n_v:], expected, atol=1e-12)
    assert not np.allclose(opened.vertices[n_v:], rest.vertices[n_v:])


def test_extend_inner_mouth_jaw_override(make_assets):
    assets = make_assets()
    beta, psi = np.zeros(assets.n_beta), np.zeros(assets.n_psi)
    closed = face_model.evaluate_mesh(assets, beta, psi, inner_mouth=False)
    opened = face_model.evaluate_mesh(
        assets, beta, psi, PoseParams(jaw_rotation=[0.3, 0.0, 0.0])
    )

    extended = inner_mouth.extend_inner_mouth(
        assets, closed, jaw_rotation=[0.3, 0.0, 0.0]
    )
    n_v = assets.n_vertices
    np.testing.assert_allclose(
        extended.vertices[n_v:], opened.vertices[n_v:], atol=1e-12
    )
    assert dataclasses.is_dataclass(extended)
