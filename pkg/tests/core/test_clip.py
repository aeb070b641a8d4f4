#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""test for facedrive.core.clip

"""


# =============================================================================
# IMPORTS
# =============================================================================

import json

import numpy as np

import pytest

from facedrive.core import clip as fclip
from facedrive.render import Camera


# =============================================================================
# FRAME PARAMETERS
# =============================================================================


def test_FrameParams_defaults_are_rest():
    frame = fclip.FrameParams.neutral(4)
    assert frame.is_rest
    assert frame.n_psi == 4
    assert frame.pose_vector().shape == (15,)
    assert not frame.expression.flags.writeable


def test_FrameParams_pose_vector_order():
    frame = fclip.FrameParams(
        expression=[0.0],
        global_rotation=[1, 0, 0],
        neck_rotation=[0, 2, 0],
        jaw_rotation=[0, 0, 3],
        eye_rotations=[[4, 0, 0], [0, 5, 0]],
    )
    np.testing.assert_array_equal(
        frame.pose_vector(),
        [1, 0, 0, 0, 2, 0, 0, 0, 3, 4, 0, 0, 0, 5, 0],
    )
    assert isinstance(frame.pose, fclip.PoseParams)
    assert not frame.is_rest


def test_FrameParams_requires_expression():
    with pytest.raises(TypeError, match="expression"):
        fclip.FrameParams()


def test_FrameParams_rejects_full_turn():
    with pytest.raises(ValueError, match="2\\*pi"):
        fclip.FrameParams(expression=[0.0], jaw_rotation=[7.0, 0, 0])


def test_FrameParams_rejects_bad_shape():
    with pytest.raises(ValueError, match="eye_rotations"):
        fclip.FrameParams(expression=[0.0], eye_rotations=[0, 0, 0])


# =============================================================================
# CLIP BUNDLE
# =============================================================================


def test_ClipBundle_json_roundtrip(make_clip, tmp_path):
    clip = make_clip(n_frames=5)
    path = tmp_path / "clip.json"
    fclip.save_clip_bundle(clip, path)
    loaded = fclip.load_clip_bundle(path, n_beta=10, n_psi=12)

    assert loaded.aequals(clip, rtol=0, atol=0)
    assert loaded.hash() == clip.hash()
    assert set(json.loads(path.read_text())) == {
        "shape",
        "camera",
        "fps",
        "frames",
    }


def test_ClipBundle_extensions_kept(make_clip):
    clip = make_clip().replace(extensions={"alpha": "matte_%04d.png"})
    loaded = fclip.ClipBundle.from_json(clip.to_json())
    assert loaded.extensions == {"alpha": "matte_%04d.png"}
    assert loaded.hash() == clip.hash()
    assert clip.hash() != make_clip().hash()


def test_ClipBundle_hash_changes_with_content(make_clip):
    clip = make_clip()
    frames = list(clip.frames)
    frames[0] = frames[0].replace(translation=[0.0, 0.0, 1e-9])
    assert clip.replace(frames=frames).hash() != clip.hash()


def test_ClipBundle_sizes(make_clip):
    clip = make_clip(n_frames=3)
    assert len(clip) == clip.n_frames == 3
    assert clip.n_beta == 10 and clip.n_psi == 12
    assert clip.expressions.shape == (3, 12)
    assert repr(clip) == "<ClipBundle frames=3 n_beta=10 n_psi=12 fps=25>"


def test_ClipBundle_check_assets(make_clip, make_assets):
    clip = make_clip()
    clip.check_assets(make_assets())
    with pytest.raises(ValueError, match="assets expect"):
        clip.check_assets(make_assets(n_psi=5))


def test_ClipBundle_validation():
    camera = Camera.default(8, 8)
    frames = [fclip.FrameParams.neutral(3)]
    with pytest.raises(ValueError, match="at least one frame"):
        fclip.ClipBundle(shape=[0.0], frames=[], camera=camera)
    with pytest.raises(ValueError, match="expression"):
        fclip.ClipBundle(
            shape=[0.0],
            frames=frames + [fclip.FrameParams.neutral(2)],
            camera=camera,
        )
    with pytest.raises(TypeError, match="Camera"):
        fclip.ClipBundle(shape=[0.0], frames=frames, camera=None)
    with pytest.raises(ValueError, match="fps"):
        fclip.ClipBundle(shape=[0.0], frames=frames, camera=camera, fps=0)


# =============================================================================
# SCHEMA ERRORS
# =============================================================================


def _document(make_clip):
    return json.loads(make_clip(n_frames=4).to_json())


def test_ClipBundle_schema_wrong_expression_length(make_clip):
    data = _document(make_clip)
    data["frames"][3]["expression"] = data["frames"][3]["expression"][:-1]
    with pytest.raises(fclip.ClipSchemaError) as err:
        fclip.ClipBundle.from_dict(data, n_psi=12)
    assert err.value.path == "frames[3].expression"


def test_ClipBundle_schema_missing_key(make_clip):
    data = _document(make_clip)
    del data["frames"][1]["jaw_rotation"]
    with pytest.raises(fclip.ClipSchemaError, match="missing") as err:
        fclip.ClipBundle.from_dict(data)
    assert err.value.path == "frames[1].jaw_rotation"


def test_ClipBundle_schema_shape_length(make_clip):
    data = _document(make_clip)
    with pytest.raises(fclip.ClipSchemaError, match="length mismatch") as err:
        fclip.ClipBundle.from_dict(data, n_beta=150)
    assert err.value.path == "shape"


def test_ClipBundle_schema_bad_camera(make_clip):
    data = _document(make_clip)
    data["camera"]["fx"] = "wide"
    with pytest.raises(fclip.ClipSchemaError) as err:
        fclip.ClipBundle.from_dict(data)
    assert err.value.path == "camera.fx"


def test_ClipBundle_schema_invalid_json():
    with pytest.raises(fclip.ClipSchemaError, match="invalid JSON"):
        fclip.ClipBundle.from_json("{")


def test_ClipSchemaError_is_value_error():
    assert issubclass(fclip.ClipSchemaError, ValueError)


# =============================================================================
# SYNTHETIC CLIPS
# =============================================================================


def test_generate_synthetic_clip_deterministic(make_assets):
    assets = make_assets()
    left = fclip.generate_synthetic_clip(assets, seed=3, n_frames=6)
    right = fclip.generate_synthetic_clip(assets, seed=3, n_frames=6)
    assert left.hash() == right.hash()
    assert left.camera.resolution == (64, 64)


def test_generate_synthetic_clip_expressiveness(make_assets):
    assets = make_assets()
    calm = fclip.generate_synthetic_clip(assets, seed=1, expressiveness=0.0)
    assert not np.any(calm.expressions)


def test_generate_synthetic_corpus(make_assets):
    corpus = fclip.generate_synthetic_corpus(make_assets(), 3, n_frames=2)
    assert len(corpus) == 3
    assert len({clip.hash() for clip in corpus}) == 3
    assert all(clip.n_frames == 2 for clip in corpus)


def test_generate_synthetic_corpus_invalid(make_assets):
    with pytest.raises(ValueError, match="n_clips"):
        fclip.generate_synthetic_corpus(make_assets(), 0)
