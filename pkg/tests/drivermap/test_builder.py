#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.drivermap.builder

"""


# =============================================================================
# IMPORTS
# =============================================================================

import hashlib

import numpy as np

import pytest

from facedrive.container import TensorContainer
from facedrive.core import FrameParams, PoseParams
from facedrive.drivermap import builder
from facedrive.model import evaluate_mesh
from facedrive.render import interpolate_attribute, rasterize


# =============================================================================
# HELPERS
# =============================================================================


def frame_map(assets, encoded, clip, index, mode="full", camera=None):
    frame = clip.frames[index]
    return builder.build_driver_map(
        assets,
        encoded,
        clip.shape,
        frame.expression,
        frame,
        clip.camera if camera is None else camera,
        mode,
        n_threads=1,
    )


def digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# =============================================================================
# MODES AND HASHES
# =============================================================================


@pytest.mark.parametrize(
    "value, expected",
    [
        ("full", builder.DriverMapMode.FULL),
        ("NO_POSENC", builder.DriverMapMode.NO_POSENC),
        (builder.DriverMapMode.NO_DEFORMATION,) * 2,
    ],
)
def test_DriverMapMode_parse(value, expected):
    assert builder.DriverMapMode.parse(value) is expected


def test_DriverMapMode_parse_invalid():
    with pytest.raises(ValueError, match="Invalid driver map mode 'raw'"):
        builder.DriverMapMode.parse("raw")


def test_DriverMapMode_codes():
    for mode in builder.DriverMapMode:
        assert builder.DriverMapMode.from_code(mode.code) is mode
    with pytest.raises(ValueError, match="unknown driver map mode code"):
        builder.DriverMapMode.from_code(9)


def test_hash_words_roundtrip():
    hexdigest = digest("facedrive")
    words = builder.hash_to_words(hexdigest)
    assert words.dtype == np.dtype("<i4")
    assert words.shape == (8,)
    assert builder.words_to_hash(words) == hexdigest


def test_hash_to_words_invalid():
    with pytest.raises(ValueError, match="expected a SHA-256 digest"):
        builder.hash_to_words("abcd")


# =============================================================================
# DRIVER MAP
# =============================================================================


def test_DriverMap_channel_counts():
    assert builder.N_POSENC_CHANNELS == 42
    assert builder.N_DEFORMATION_CHANNELS == 3
    assert builder.N_CHANNELS == 45


def test_DriverMap_coerces_and_freezes():
    tensor = np.zeros((45, 4, 5))
    tensor[44, 1, 2] = 2.0
    driver_map = builder.DriverMap(tensor, "no_posenc", sigma=0.5)

    assert driver_map.tensor.dtype == np.float32
    assert not driver_map.tensor.flags.writeable
    assert driver_map.shape == (45, 4, 5)
    assert driver_map.mode is builder.DriverMapMode.NO_POSENC
    assert driver_map.coverage.sum() == 1
    assert driver_map.coverage[1, 2]
    assert driver_map.posenc.shape == (42, 4, 5)
    assert driver_map.deformation.shape == (3, 4, 5)
    assert driver_map.magnitude[1, 2] == 2.0
    assert repr(driver_map) == "<DriverMap 5x4 mode='no_posenc' coverage=1>"


@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"tensor": np.zeros((44, 4, 4))}, r"expected a \(45, H, W\)"),
        ({"coverage": np.zeros((3, 4))}, "coverage shape"),
        ({"meta": {"ref": "00"}}, "must end with _hash"),
        ({"mode": "nope"}, "Invalid driver map mode"),
    ],
)
def test_DriverMap_invalid(kwargs, match):
    params = {"tensor": np.zeros((45, 4, 4))}
    params.update(kwargs)
    with pytest.raises(ValueError, match=match):
        builder.DriverMap(**params)


def test_DriverMap_with_meta():
    driver_map = builder.DriverMap(np.zeros((45, 2, 2)))
    tagged = driver_map.with_meta(ref_hash=digest("a"))
    tagged = tagged.with_meta(drv_hash=digest("b"))

    assert driver_map.meta == {}
    assert tagged.meta == {"ref_hash": digest("a"), "drv_hash": digest("b")}
    assert tagged == driver_map


def test_DriverMap_container_roundtrip(tmp_path, make_assets, make_clip):
    assets = make_assets()
    clip = make_clip()
    encoded = builder.encode_template(assets)
    driver_map = frame_map(assets, encoded, clip, 1).with_meta(
        ref_hash=clip.hash(), drv_hash=digest("driver")
    )

    container = driver_map.to_container()
    assert set(container) == {
        "driver_map",
        "meta_mode",
        "meta_sigma",
        "coverage",
        "meta_drv_hash",
        "meta_ref_hash",
    }
    assert container["meta_ref_hash"].dtype == np.dtype("<i4")

    path = tmp_path / "frame_0001.lka"
    driver_map.save(path)
    loaded = builder.DriverMap.load(path)

    np.testing.assert_array_equal(loaded.tensor, driver_map.tensor)
    np.testing.assert_array_equal(loaded.coverage, driver_map.coverage)
    assert loaded.mode is driver_map.mode
    assert loaded.sigma == driver_map.sigma
    assert loaded.meta == driver_map.meta
    assert loaded.meta["ref_hash"] == clip.hash()


def test_DriverMap_from_container_without_coverage():
    tensor = np.zeros((45, 3, 3), dtype=np.float32)
    tensor[0, 1, 1] = 1.0
    container = TensorContainer(
        {
            "driver_map": tensor,
            "meta_mode": np.array(0, dtype=np.int32),
            "meta_sigma": np.array(1.0),
        }
    )
    driver_map = builder.DriverMap.from_container(container)
    assert driver_map.coverage.sum() == 1


def test_DriverMap_diff():
    left = builder.DriverMap(np.zeros((45, 2, 2)))
    right = builder.DriverMap(np.ones((45, 2, 2)), mode="no_posenc")
    result = left.diff(right)
    assert {"tensor", "coverage", "mode"} <= set(result.members_diff)
    assert left != right


# =============================================================================
# ATTRIBUTES
# =============================================================================


def test_vertex_attributes_modes(make_assets, make_encoded):
    assets = make_assets()
    encoded = make_encoded()
    random = np.random.default_rng(0)
    deformation = random.normal(size=(encoded.n_vertices, 3))
    sigma = assets.expression_sigma

    full = builder.vertex_attributes(assets, encoded, deformation)
    np.testing.assert_array_equal(full[:, :42], encoded.per_vertex_pe)
    np.testing.assert_allclose(full[:, 42:], deformation / sigma)

    no_pe = builder.vertex_attributes(
        assets, encoded, deformation, "no_posenc"
    )
    assert (no_pe[:, :42] == 0).all()
    np.testing.assert_array_equal(no_pe[:, 42:], full[:, 42:])

    no_def = builder.vertex_attributes(
        assets, encoded, deformation, "no_deformation"
    )
    assert (no_def[:, 42:] == 0).all()
    np.testing.assert_array_equal(no_def[:, :42], full[:, :42])


def test_vertex_attributes_row_mismatch(make_assets, make_encoded):
    with pytest.raises(ValueError, match="deformation rows"):
        builder.vertex_attributes(
            make_assets(), make_encoded(), np.zeros((3, 3))
        )


def test_head_faces(make_assets):
    assets = make_assets()
    mesh = evaluate_mesh(assets, np.zeros(assets.n_beta), np.zeros(12))
    faces = builder.head_faces(assets, mesh.faces, mesh.n_vertices)

    assert 0 < len(faces) <= len(mesh.faces)
    template_faces = faces[np.all(faces < assets.n_vertices, axis=1)]
    assert assets.head_vertex_mask[template_faces].all()
    # the inner mouth is never masked out
    assert (faces >= assets.n_vertices).any()


# =============================================================================
# BUILD
# =============================================================================


def test_build_driver_map_layout(make_assets, make_encoded, make_clip):
    assets = make_assets()
    clip = make_clip()
    driver_map = frame_map(assets, make_encoded(), clip, 2)

    assert driver_map.shape == (45, 48, 48)
    assert driver_map.mode is builder.DriverMapMode.FULL
    assert driver_map.sigma == assets.expression_sigma
    assert driver_map.coverage.any()
    assert (driver_map.tensor[:, ~driver_map.coverage] == 0).all()
    posenc = driver_map.posenc[:, driver_map.coverage]
    assert np.all(np.abs(posenc) <= 1.0 + 1e-6)


def test_build_driver_map_matches_interpolation(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    clip = make_clip()
    frame = clip.frames[0]
    driver_map, raster = builder.build_driver_map(
        assets,
        encoded,
        clip.shape,
        frame.expression,
        frame,
        clip.camera,
        return_raster=True,
    )

    mesh = evaluate_mesh(assets, clip.shape, frame.expression, frame)
    expected = interpolate_attribute(
        raster,
        builder.vertex_attributes(assets, encoded, mesh.expr_deformation),
    )
    np.testing.assert_allclose(
        driver_map.tensor, np.moveaxis(expected, -1, 0), atol=1e-6
    )
    np.testing.assert_array_equal(driver_map.coverage, raster.coverage)


def test_build_driver_map_neutral_has_no_deformation(
    make_assets, make_encoded, make_camera
):
    assets = make_assets()
    driver_map = builder.build_driver_map(
        assets,
        make_encoded(),
        np.zeros(assets.n_beta),
        np.zeros(assets.n_psi),
        None,
        make_camera(),
    )
    assert driver_map.coverage.any()
    assert (driver_map.deformation == 0).all()
    assert (driver_map.magnitude == 0).all()


def test_build_driver_map_modes(make_assets, make_encoded, make_clip):
    assets = make_assets()
    encoded = make_encoded()
    clip = make_clip(seed=3)
    full = frame_map(assets, encoded, clip, 1)
    no_pe = frame_map(assets, encoded, clip, 1, mode="no_posenc")
    no_def = frame_map(assets, encoded, clip, 1, mode="no_deformation")

    for driver_map in (no_pe, no_def):
        assert driver_map.shape == (45, 48, 48)
        np.testing.assert_array_equal(driver_map.coverage, full.coverage)

    assert (no_pe.tensor[:42] == 0).all()
    np.testing.assert_array_equal(no_pe.tensor[42:], full.tensor[42:])
    assert (no_def.tensor[42:] == 0).all()
    np.testing.assert_array_equal(no_def.tensor[:42], full.tensor[:42])


def test_build_driver_map_expression_moves_only_deformation(
    make_assets, make_encoded, make_camera
):
    assets = make_assets()
    encoded = make_encoded()
    camera = make_camera()
    shape = np.zeros(assets.n_beta)
    pose = PoseParams()
    expression = np.zeros(assets.n_psi)
    expression[0] = 2.0 * assets.expression_sigma

    neutral = builder.build_driver_map(
        assets, encoded, shape, np.zeros(assets.n_psi), pose, camera
    )
    moved = builder.build_driver_map(
        assets, encoded, shape, expression, pose, camera
    )
    assert moved.magnitude.max() > 0
    assert neutral.magnitude.max() == 0


def test_retarget_same_clip_is_identity(make_assets, make_encoded, make_clip):
    assets = make_assets()
    encoded = make_encoded()
    clip = make_clip()
    frame = clip.frames[3]

    retargeted = builder.retarget(
        assets,
        encoded,
        clip.shape,
        clip.camera,
        frame.expression,
        frame,
        n_threads=1,
    )
    expected = frame_map(assets, encoded, clip, 3)
    assert retargeted.tensor.tobytes() == expected.tensor.tobytes()


def test_retarget_clip_uses_reference_identity(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    ref = make_clip(seed=1, n_frames=2)
    drv = make_clip(seed=2, n_frames=3, width=32, height=32)

    maps = builder.retarget_clip(assets, encoded, ref, drv, n_threads=1)
    assert len(maps) == drv.n_frames

    for index, driver_map in enumerate(maps):
        frame = drv.frames[index]
        expected = builder.build_driver_map(
            assets,
            encoded,
            ref.shape,
            frame.expression,
            frame,
            ref.camera,
            n_threads=1,
        )
        assert driver_map.shape == (45, 48, 48)
        assert driver_map.tensor.tobytes() == expected.tensor.tobytes()


def test_retarget_clip_self_matches_sequence(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    clip = make_clip(n_frames=3)

    retargeted = builder.retarget_clip(assets, encoded, clip, clip)
    rendered = builder.build_driver_map_sequence(assets, encoded, clip)
    for left, right in zip(retargeted, rendered):
        assert left.tensor.tobytes() == right.tensor.tobytes()


def test_build_driver_map_sequence_progress(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    clip = make_clip(n_frames=3)
    ticks = []
    maps = builder.build_driver_map_sequence(
        assets, make_encoded(), clip, progress=lambda: ticks.append(1)
    )
    assert len(maps) == 3
    assert len(ticks) == 3


def test_build_driver_map_sequence_wrong_assets(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    clip = make_clip(assets=make_assets(n_psi=8))
    with pytest.raises(ValueError, match="assets expect"):
        builder.build_driver_map_sequence(assets, make_encoded(), clip)


# =============================================================================
# SAMPLING AND BROADCAST
# =============================================================================


def test_sample_driver_values_at_pixel_centres(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    clip = make_clip(width=24, height=24)
    frame = clip.frames[1]
    driver_map = frame_map(assets, encoded, clip, 1)

    rows, cols = np.nonzero(driver_map.coverage)
    uv = np.column_stack([cols, rows]) + 0.5
    values, face_index, depth = builder.sample_driver_values(
        assets,
        encoded,
        clip.shape,
        frame.expression,
        frame,
        clip.camera,
        uv,
    )
    assert (face_index >= 0).all()
    assert np.isfinite(depth).all()
    np.testing.assert_allclose(
        values, driver_map.tensor[:, rows, cols].T, atol=1e-6
    )


def test_sample_driver_values_at_visible_vertex(
    make_assets, make_encoded, make_camera
):
    assets = make_assets()
    encoded = make_encoded()
    camera = make_camera()
    shape = np.zeros(assets.n_beta)
    expression = np.zeros(assets.n_psi)
    mesh = evaluate_mesh(assets, shape, expression)

    # the vertex closest to the camera is always visible
    nearest = int(np.argmax(mesh.vertices[: assets.n_vertices, 2]))
    uv = camera.project(mesh.vertices[[nearest]]).uv
    values, face_index, _ = builder.sample_driver_values(
        assets, encoded, shape, expression, None, camera, uv
    )
    assert face_index[0] >= 0
    np.testing.assert_allclose(
        values[0, :42], encoded.per_vertex_pe[nearest], atol=1e-5
    )


def test_vertex_attributes_independent_of_shape_and_pose(
    make_assets, make_encoded, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    expression = make_clip(seed=0, n_frames=1).frames[0].expression

    digests = set()
    for seed in range(1, 11):
        clip = make_clip(seed=seed, n_frames=1)
        mesh = evaluate_mesh(assets, clip.shape, expression, clip.frames[0])
        attributes = builder.vertex_attributes(
            assets, encoded, mesh.expr_deformation
        )
        digests.add(hashlib.sha256(attributes.tobytes()).hexdigest())
    assert len(digests) == 1


def test_sample_driver_values_independent_of_shape(
    make_assets, make_encoded, make_camera, make_clip
):
    assets = make_assets()
    encoded = make_encoded()
    camera = make_camera()
    frame = make_clip(seed=0, n_frames=1).frames[0]
    head = np.flatnonzero(assets.head_vertex_mask)

    samples = []
    for seed in (1, 2):
        shape = make_clip(seed=seed, n_frames=1).shape
        mesh = evaluate_mesh(assets, shape, frame.expression, frame)
        faces = builder.head_faces(assets, mesh.faces, mesh.n_vertices)
        projection = camera.project(mesh.vertices[head])
        uv = projection.uv
        values, face_index, depth = builder.sample_driver_values(
            assets, encoded, shape, frame.expression, frame, camera, uv
        )
        # visible: the nearest hit is a face around the vertex itself
        owner = (faces[face_index] == head[:, None]).any(axis=1)
        visible = (
            (face_index >= 0)
            & owner
            & np.isclose(depth, projection.depth, rtol=0, atol=1e-7)
        )
        samples.append((values, visible))

    (values_a, visible_a), (values_b, visible_b) = samples
    both = visible_a & visible_b
    assert both.sum() >= 10
    assert values_a.shape[1] == builder.N_CHANNELS == 45
    np.testing.assert_allclose(values_a[both], values_b[both], atol=1e-4)
    np.testing.assert_allclose(
        values_a[both, :42], encoded.per_vertex_pe[head[both]], atol=1e-4
    )


def test_raw_vector_broadcast(make_assets):
    assets = make_assets()
    frame = FrameParams(
        expression=np.arange(assets.n_psi, dtype=float),
        jaw_rotation=[0.1, 0.0, 0.0],
    )
    shape = np.linspace(-1, 1, assets.n_beta)
    grid = builder.raw_vector_broadcast(
        shape, frame.expression, frame, assets=assets
    )

    length = assets.n_beta + assets.n_psi + 15
    assert grid.shape == (length,) + builder.BROADCAST_GRID
    assert grid.dtype == np.float32
    expected = np.concatenate([shape, frame.expression, frame.pose_vector()])
    np.testing.assert_allclose(grid[:, 10, 20], expected, rtol=1e-6)
    assert (grid == grid[:, :1, :1]).all()


def test_raw_vector_broadcast_flat_pose():
    grid = builder.raw_vector_broadcast([1.0], [2.0, 3.0], [4.0], (2, 3))
    assert grid.shape == (4, 2, 3)
    np.testing.assert_array_equal(grid[:, 1, 2], [1.0, 2.0, 3.0, 4.0])
    assert grid.flags.writeable


@pytest.mark.parametrize(
    "field, shape, expression, pose",
    [
        ("shape", 9, 12, 15),
        ("expression", 10, 11, 15),
        ("pose", 10, 12, 14),
    ],
)
def test_raw_vector_broadcast_length_mismatch(
    make_assets, field, shape, expression, pose
):
    assets = make_assets()
    with pytest.raises(ValueError, match=f"{field} length mismatch"):
        builder.raw_vector_broadcast(
            np.zeros(shape),
            np.zeros(expression),
            np.zeros(pose),
            assets=assets,
        )


# =============================================================================
# BUILDER
# =============================================================================


def test_DriverMapBuilder(make_assets, make_clip):
    assets = make_assets()
    clip = make_clip(n_frames=2)
    method = builder.DriverMapBuilder(mode="no_deformation", n_threads=1)

    assert repr(method) == (
        "DriverMapBuilder(mode=<DriverMapMode.NO_DEFORMATION: "
        "'no_deformation'>, n_threads=1)"
    )
    encoded = method.encode(assets)
    frame = clip.frames[0]
    single = method.build(
        assets, encoded, clip.shape, frame.expression, frame, clip.camera
    )
    maps = method.build_clip(assets, encoded, clip)
    retargeted = method.retarget(assets, encoded, clip, clip)

    assert single.mode is builder.DriverMapMode.NO_DEFORMATION
    assert single.tensor.tobytes() == maps[0].tensor.tobytes()
    assert retargeted[1].tensor.tobytes() == maps[1].tensor.tobytes()


def test_DriverMapBuilder_invalid():
    with pytest.raises(ValueError, match="Invalid driver map mode"):
        builder.DriverMapBuilder(mode="posenc_only")
    with pytest.raises(ValueError, match="n_threads must be >= 1"):
        builder.DriverMapBuilder(n_threads=0)


def test_DriverMapBuilder_copy():
    method = builder.DriverMapBuilder()
    copied = method.copy(mode="no_posenc")
    assert copied.mode is builder.DriverMapMode.NO_POSENC
    assert method.get_parameters() == {
        "mode": builder.DriverMapMode.FULL,
        "n_threads": None,
    }
