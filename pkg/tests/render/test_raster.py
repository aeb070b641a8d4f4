#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.render.raster

"""


# =============================================================================
# IMPORTS
# =============================================================================

import numpy as np

from PIL import Image

import pytest

from facedrive.model import FaceModel
from facedrive.render import (
    Camera,
    depth_image,
    face_index_image,
    interpolate_attribute,
    locate_points,
    rasterize,
    write_pgm,
)


# =============================================================================
# HELPERS
# =============================================================================


def unit_camera(size=8):
    """Identity extrinsics; pixel = x / z + size / 2."""
    return Camera(
        fx=1.0, fy=1.0, cx=size / 2, cy=size / 2, width=size, height=size
    )


def square(depth=1.0, half=4.0):
    """Two triangles covering ``[-half, half]^2`` on the plane z=depth."""
    vertices = np.array(
        [
            [-half, -half, depth],
            [half, -half, depth],
            [-half, half, depth],
            [half, half, depth],
        ]
    )
    faces = np.array([[0, 1, 2], [1, 3, 2]])
    return vertices, faces


# =============================================================================
# TESTS
# =============================================================================


def test_rasterize_square_full_coverage():
    vertices, faces = square()
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    assert raster.shape == (8, 8)
    assert raster.coverage.all()
    np.testing.assert_allclose(raster.depth, 1.0)
    assert set(np.unique(raster.face_index)) == {0, 1}


def test_rasterize_shared_edge_top_left_rule():
    vertices, faces = square()
    camera = unit_camera()
    first = rasterize(vertices, faces[:1], camera, n_threads=1).coverage
    second = rasterize(vertices, faces[1:], camera, n_threads=1).coverage

    # the diagonal pixel centres lie exactly on the shared edge
    assert not (first & second).any()
    assert (first | second).all()


def test_rasterize_winding_does_not_matter():
    vertices, faces = square()
    camera = unit_camera()
    ccw = rasterize(vertices, faces, camera, n_threads=1)
    cw = rasterize(vertices, faces[:, ::-1], camera, n_threads=1)
    np.testing.assert_array_equal(ccw.face_index, cw.face_index)


def test_rasterize_background_defaults():
    vertices, faces = square(half=1.0)
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    background = ~raster.coverage
    assert background.any()
    assert (raster.face_index[background] == -1).all()
    assert np.isinf(raster.depth[background]).all()
    assert (raster.barycentric[background] == 0).all()


def test_rasterize_two_planes_depth_test():
    front_v, front_f = square(depth=1.0, half=1.0)
    back_v, back_f = square(depth=2.0, half=8.0)
    vertices = np.vstack([back_v, front_v])
    faces = np.vstack([back_f, front_f + len(back_v)])

    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    front = raster.face_index >= 2
    assert raster.coverage.all()
    assert front[3:5, 3:5].all()
    assert front.sum() == 4
    np.testing.assert_allclose(raster.depth[front], 1.0)
    np.testing.assert_allclose(raster.depth[~front], 2.0)


def test_rasterize_depth_tie_lowest_face_wins():
    vertices, _ = square()
    vertices = np.vstack([vertices, vertices])
    faces = np.array([[4, 5, 6], [0, 1, 2]])
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    assert set(np.unique(raster.face_index[raster.coverage])) == {0}


def test_rasterize_near_plane_discards_triangle():
    vertices = np.array(
        [[-4.0, -4.0, 1.0], [4.0, -4.0, 1.0], [0.0, 4.0, -1.0]]
    )
    raster = rasterize(vertices, [[0, 1, 2]], unit_camera(), n_threads=1)
    assert not raster.coverage.any()


def test_rasterize_degenerate_triangle():
    vertices = np.array([[0.0, 0.0, 1.0], [1.0, 1.0, 1.0], [2.0, 2.0, 1.0]])
    raster = rasterize(vertices, [[0, 1, 2]], unit_camera(), n_threads=1)
    assert not raster.coverage.any()


def test_rasterize_barycentric_partition_of_unity(make_assets, make_camera):
    assets = make_assets()
    raster = rasterize(
        assets.template_vertices, assets.faces, make_camera(), n_threads=1
    )
    covered = raster.coverage
    assert covered.any()
    np.testing.assert_allclose(raster.barycentric[covered].sum(axis=1), 1.0)
    assert (raster.barycentric[covered] >= -1e-12).all()


def test_rasterize_perspective_correct():
    vertices = np.array(
        [[-4.0, -4.0, 1.0], [8.0, -4.0, 2.0], [-4.0, 12.0, 3.0]]
    )
    camera = unit_camera()
    raster = rasterize(vertices, [[0, 1, 2]], camera, n_threads=1)
    covered = raster.coverage
    assert covered.sum() > 10

    # interpolated camera-space depth is the z-buffer value
    depth = interpolate_attribute(raster, vertices[:, 2])[..., 0]
    np.testing.assert_allclose(depth[covered], raster.depth[covered])

    # interpolated positions project back onto the pixel centres
    position = interpolate_attribute(raster, vertices)[covered]
    uv = camera.project(position).uv
    rows, cols = np.nonzero(covered)
    np.testing.assert_allclose(uv, np.column_stack([cols, rows]) + 0.5)


@pytest.mark.parametrize("n_threads", [2, 3, 7])
def test_rasterize_thread_count_is_deterministic(
    make_assets, make_camera, n_threads
):
    assets = make_assets()
    camera = make_camera(width=37, height=41)
    single = rasterize(assets.template_vertices, assets.faces, camera, 1)
    multi = rasterize(
        assets.template_vertices, assets.faces, camera, n_threads
    )
    np.testing.assert_array_equal(multi.face_index, single.face_index)
    np.testing.assert_array_equal(multi.depth, single.depth)
    np.testing.assert_array_equal(multi.barycentric, single.barycentric)


def test_rasterize_chunking_is_invisible(monkeypatch, make_assets):
    from facedrive.render import raster as raster_module

    assets = make_assets()
    camera = Camera.default(width=32, height=32)
    full = rasterize(assets.template_vertices, assets.faces, camera, 1)
    monkeypatch.setattr(raster_module, "CANDIDATE_CHUNK", 64)
    chunked = rasterize(assets.template_vertices, assets.faces, camera, 1)
    np.testing.assert_array_equal(chunked.face_index, full.face_index)
    np.testing.assert_array_equal(chunked.barycentric, full.barycentric)


def test_rasterize_mesh_silhouette(make_assets, make_camera):
    assets = make_assets()
    mesh = FaceModel(assets)(np.zeros(assets.n_beta), np.zeros(assets.n_psi))
    raster = rasterize(mesh.vertices, mesh.faces, make_camera(), n_threads=1)

    # head centred in the image and fully inside the canvas
    assert raster.coverage[24, 24]
    assert not raster.coverage[0].any()
    assert not raster.coverage[:, 0].any()


@pytest.mark.parametrize(
    "vertices, faces, match",
    [
        (np.zeros((3, 2)), [[0, 1, 2]], "vertices must have shape"),
        (np.zeros((3, 3)), [[0, 1]], "faces must have shape"),
        (np.zeros((3, 3)), [[0, 1, 3]], "out of range"),
        (np.zeros((3, 3)), [[-1, 1, 2]], "out of range"),
    ],
)
def test_rasterize_invalid(vertices, faces, match):
    with pytest.raises(ValueError, match=match):
        rasterize(vertices, faces, unit_camera())


def test_interpolate_attribute_invalid_rows():
    vertices, faces = square()
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    with pytest.raises(ValueError, match=r"expected values of shape \(4, C\)"):
        interpolate_attribute(raster, np.zeros((3, 2)))


def test_interpolate_attribute_constant():
    vertices, faces = square(half=2.0)
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    image = interpolate_attribute(raster, np.tile([[1.0, -2.0]], (4, 1)))
    assert image.shape == (8, 8, 2)
    np.testing.assert_allclose(image[raster.coverage], [[1.0, -2.0]])
    assert (image[~raster.coverage] == 0).all()


def test_locate_points_matches_raster(make_assets, make_camera):
    assets = make_assets()
    camera = make_camera(width=24, height=24)
    raster = rasterize(assets.template_vertices, assets.faces, camera, 1)

    rows, cols = np.mgrid[0:24, 0:24]
    uv = np.column_stack([cols.ravel(), rows.ravel()]) + 0.5
    face, bary, depth = locate_points(
        assets.template_vertices, assets.faces, camera, uv
    )
    np.testing.assert_array_equal(face, raster.face_index.ravel())
    np.testing.assert_allclose(bary, raster.barycentric.reshape(-1, 3))
    np.testing.assert_allclose(depth, raster.depth.ravel())


def test_locate_points_miss():
    vertices, faces = square(half=1.0)
    face, bary, depth = locate_points(
        vertices, faces, unit_camera(), [[0.1, 0.1]]
    )
    assert face.tolist() == [-1]
    assert np.isinf(depth).all()
    assert (bary == 0).all()


def test_face_index_image():
    vertices, faces = square(half=2.0)
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    image = face_index_image(raster)
    assert image.dtype == np.uint16
    assert (image[~raster.coverage] == 0).all()
    np.testing.assert_array_equal(
        image[raster.coverage], raster.face_index[raster.coverage] + 1
    )


def test_depth_image():
    vertices = np.array(
        [[-4.0, -4.0, 1.0], [4.0, -4.0, 2.0], [-4.0, 4.0, 3.0]]
    )
    raster = rasterize(vertices, [[0, 1, 2]], unit_camera(), n_threads=1)
    image = depth_image(raster)
    assert image.dtype == np.uint8
    assert (image[~raster.coverage] == 0).all()
    assert image[raster.coverage].min() >= 1
    assert image.max() == 255


def test_depth_image_flat():
    vertices, faces = square()
    raster = rasterize(vertices, faces, unit_camera(), n_threads=1)
    assert (depth_image(raster) == 255).all()


@pytest.mark.parametrize("dtype", [np.uint8, np.uint16])
def test_write_pgm(tmp_path, dtype):
    image = (np.arange(12).reshape(3, 4) * 20).astype(dtype)
    path = tmp_path / "image.pgm"
    write_pgm(path, image)

    assert path.read_bytes().startswith(b"P5")
    with Image.open(path) as loaded:
        assert loaded.size == (4, 3)
        np.testing.assert_array_equal(
            np.asarray(loaded).astype(int), image.astype(int)
        )


@pytest.mark.parametrize(
    "image, match",
    [
        (np.zeros((2, 2, 3), dtype=np.uint8), "expected a 2D image"),
        (np.zeros((2, 2), dtype=float), "unsupported image dtype"),
    ],
)
def test_write_pgm_invalid(tmp_path, image, match):
    with pytest.raises(ValueError, match=match):
        write_pgm(tmp_path / "image.pgm", image)
