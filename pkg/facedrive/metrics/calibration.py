#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Empirical reference points for HEF.

An absolute HEF value is hard to read on its own. The calibration harness
measures it on frame pairs of a corpus whose relationship is known, at
single-frame granularity:

- ``self``: a frame against itself, exactly 0;
- ``near_frame``: two frames at most ``near_window`` apart in one clip;
- ``no_skill``: random frames of two different clips;
- ``ceiling``: the most neutral frame of the corpus against the frame that
  reaches the given percentile of the per-clip maximum expression norm;
- ``global_max``: the most neutral frame against the most expressive one.

Random pairs come from a counter-based generator and are drawn before any
evaluation, so the result does not depend on the thread schedule.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
import warnings

import numpy as np

import pandas as pd

from .hef import EmptyMaskError, hef_frame
from ..core import FDMethodABC
from ..drivermap import encode_template
from ..utils import Bunch, thread_map

# =============================================================================
# CONSTANTS
# =============================================================================

ANCHORS = ("self", "near_frame", "no_skill", "ceiling", "global_max")

#: Default window of the near-frame anchor, in frames.
DEFAULT_NEAR_WINDOW = 2

#: Default percentile of the per-clip maximum expression norm.
DEFAULT_PERCENTILE = 99.0

#: Reference HEF levels measured on a large talking-head corpus, with
#: their reading. Used when the calibrated corpus lacks an anchor.
REFERENCE_LEVELS = (
    ("self", 0.0, "identical expression"),
    ("near_frame", 0.03, "within natural frame-to-frame variation"),
    ("no_skill", 0.103, "no better than an unrelated expression"),
    ("ceiling", 0.181, "as far as neutral is from very expressive"),
)

logger = logging.getLogger(__name__)


# =============================================================================
# WARNINGS
# =============================================================================


class CalibrationUnavailableWarning(UserWarning):
    """The corpus is too small to form some anchor."""


# =============================================================================
# REPORT
# =============================================================================


class CalibrationReport:
    """Table of calibration anchors.

    Parameters
    ----------
    anchors : pandas.DataFrame
        Indexed by anchor name with the columns ``mean, std, sem, n,
        available``.
    extra : dict, optional
        Pair indices and configuration.

    """

    _COLUMNS = ("mean", "std", "sem", "n", "available")

    def __init__(self, anchors, extra=None):
        missing = set(self._COLUMNS).difference(anchors.columns)
        if missing:
            raise ValueError(f"anchor table lacks columns {sorted(missing)}")
        self._anchors = anchors.copy()
        self._extra = Bunch("extra", dict(extra or {}))

    @property
    def extra_(self):
        """Additional information about the calibration."""
        return self._extra

    e_ = extra_

    @property
    def available(self):
        """Names of the anchors that could be formed."""
        frame = self._anchors
        return tuple(frame.index[frame["available"]])

    def __getitem__(self, anchor):
        """Mean HEF of an anchor (NaN when unavailable)."""
        return float(self._anchors.loc[anchor, "mean"])

    def to_frame(self):
        """The anchor table with the reference levels alongside."""
        frame = self._anchors.copy()
        reference = {name: level for name, level, _ in REFERENCE_LEVELS}
        meaning = {name: text for name, _, text in REFERENCE_LEVELS}
        frame["reference"] = [reference.get(n, np.nan) for n in frame.index]
        frame["meaning"] = [meaning.get(n, "") for n in frame.index]
        return frame

    def is_ordered(self):
        """Whether the available anchors are non-decreasing.

        The order checked is ``self, near_frame, no_skill, ceiling``.

        """
        values = [
            self[name]
            for name in ("self", "near_frame", "no_skill", "ceiling")
            if name in self.available
        ]
        return bool(np.all(np.diff(values) >= 0))

    def interpret(self, value):
        """Reading of an HEF value against the anchors.

        Levels measured on this corpus replace the reference levels when
        available. Returns the meaning of the highest level not above
        ``value``; values above the ceiling are flagged as such.

        """
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"HEF values are non-negative, found {value}")

        levels = []
        for name, reference, meaning in REFERENCE_LEVELS:
            level = self[name] if name in self.available else reference
            levels.append((level, meaning))

        reading = levels[0][1]
        for level, meaning in levels:
            if value >= level:
                reading = meaning
        if value > levels[-1][0]:
            reading = "beyond the neutral-versus-expressive ceiling"
        return reading

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        table = self._anchors.to_string(float_format="{:.4f}".format)
        return f"{table}\n[Calibration: {len(self.available)} anchors]"


# =============================================================================
# PAIRS
# =============================================================================


def _philox(seed):
    return np.random.Generator(np.random.Philox(seed))


def _near_pairs(corpus, n_pairs, window, random):
    eligible = [i for i, clip in enumerate(corpus) if clip.n_frames > 1]
    if not eligible:
        return []
    pairs = []
    for _ in range(n_pairs):
        clip = eligible[random.integers(len(eligible))]
        n_frames = corpus[clip].n_frames
        offset = int(random.integers(1, min(window, n_frames - 1) + 1))
        first = int(random.integers(n_frames - offset))
        pairs.append(((clip, first), (clip, first + offset)))
    return pairs


def _cross_pairs(corpus, n_pairs, random):
    if len(corpus) < 2:
        return []
    pairs = []
    for _ in range(n_pairs):
        target, pred = random.choice(len(corpus), size=2, replace=False)
        pairs.append(
            (
                (int(target), int(random.integers(corpus[target].n_frames))),
                (int(pred), int(random.integers(corpus[pred].n_frames))),
            )
        )
    return pairs


def _extreme_frames(corpus, percentile):
    """Most neutral frame, percentile-expressive frame, most expressive."""
    norms = [np.linalg.norm(clip.expressions, axis=1) for clip in corpus]
    flat = [
        (norm, clip, frame)
        for clip, clip_norms in enumerate(norms)
        for frame, norm in enumerate(clip_norms)
    ]
    _, neutral_clip, neutral_frame = min(flat)
    _, top_clip, top_frame = max(flat)

    maxima = np.array([clip_norms.max() for clip_norms in norms])
    level = np.percentile(maxima, percentile)
    chosen = int(np.argmin(np.abs(maxima - level)))
    return (
        (neutral_clip, neutral_frame),
        (chosen, int(np.argmax(norms[chosen]))),
        (top_clip, top_frame),
    )


# =============================================================================
# CALIBRATION
# =============================================================================


def _summarize(values):
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    n = len(values)
    if not n:
        return {"mean": np.nan, "std": np.nan, "sem": np.nan, "n": 0}
    std = float(values.std(ddof=1)) if n > 1 else 0.0
    return {
        "mean": float(values.mean()),
        "std": std,
        "sem": std / np.sqrt(n),
        "n": n,
    }


def hef_calibrate(
    assets,
    encoded,
    corpus,
    n_pairs=256,
    seed=0,
    *,
    near_window=DEFAULT_NEAR_WINDOW,
    percentile=DEFAULT_PERCENTILE,
    n_threads=None,
):
    """Measure the HEF anchors of a clip corpus.

    Parameters
    ----------
    assets : FaceModelAssets
    encoded : EncodedTemplate
    corpus : sequence of ClipBundle
        Non-empty.
    n_pairs : int, optional
        Pairs drawn for the random anchors (and self pairs evaluated).
    seed : int, optional
        Key of the counter-based pair generator.
    near_window : int, optional
        Maximum frame distance of the near-frame anchor.
    percentile : float, optional
        Percentile of the per-clip maximum ``|ψ|`` defining the ceiling.
    n_threads : int, optional

    Returns
    -------
    CalibrationReport

    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("the calibration corpus is empty")
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be >= 1, found {n_pairs}")
    if near_window < 1:
        raise ValueError(f"near_window must be >= 1, found {near_window}")
    if not 0 <= percentile <= 100:
        raise ValueError(f"percentile must be in [0, 100], found {percentile}")
    for clip in corpus:
        clip.check_assets(assets)

    random = _philox(seed)
    all_frames = [
        (clip, frame)
        for clip in range(len(corpus))
        for frame in range(corpus[clip].n_frames)
    ]
    n_self = min(n_pairs, len(all_frames))
    chosen = random.choice(len(all_frames), size=n_self, replace=False)
    self_pairs = [(all_frames[i], all_frames[i]) for i in sorted(chosen)]

    pairs = {
        "self": self_pairs,
        "near_frame": _near_pairs(corpus, n_pairs, near_window, random),
        "no_skill": _cross_pairs(corpus, n_pairs, random),
        "ceiling": [],
        "global_max": [],
    }
    if len(all_frames) > 1:
        neutral, expressive, top = _extreme_frames(corpus, percentile)
        if expressive != neutral:
            pairs["ceiling"] = [(neutral, expressive)]
        if top != neutral:
            pairs["global_max"] = [(neutral, top)]

    def score(pair):
        (target_clip, target_frame), (pred_clip, pred_frame) = pair
        target = corpus[target_clip]
        try:
            return hef_frame(
                assets,
                encoded,
                target.shape,
                target.frames[target_frame],
                corpus[pred_clip].frames[pred_frame],
                target.camera,
                n_threads=1,
            )
        except EmptyMaskError:
            return np.nan

    flat = [(name, pair) for name in ANCHORS for pair in pairs[name]]
    logger.debug("Calibrating HEF on %d frame pairs", len(flat))
    scores = thread_map(
        lambda item: score(item[1]), flat, n_threads=n_threads
    )

    rows = {}
    for name in ANCHORS:
        values = [s for (anchor, _), s in zip(flat, scores) if anchor == name]
        row = _summarize(values)
        row["available"] = row["n"] > 0
        rows[name] = row

    unavailable = [name for name, row in rows.items() if not row["available"]]
    if unavailable:
        warnings.warn(
            f"corpus too small for the anchors {unavailable}",
            CalibrationUnavailableWarning,
        )

    anchors = pd.DataFrame.from_dict(rows, orient="index")
    anchors.index.name = "anchor"
    extra = {
        "pairs": {name: list(pairs[name]) for name in ANCHORS},
        "n_pairs": n_pairs,
        "seed": seed,
        "near_window": near_window,
        "percentile": percentile,
    }
    return CalibrationReport(anchors, extra)


class HEFCalibrator(FDMethodABC):
    """HEF calibration harness bound to its configuration.

    Parameters
    ----------
    assets : FaceModelAssets
    n_pairs : int, optional
    seed : int, optional
    near_window : int, optional
    percentile : float, optional
    n_threads : int, optional

    """

    _facedrive_kind = "calibrator"
    _facedrive_parameters = [
        "assets",
        "n_pairs",
        "seed",
        "near_window",
        "percentile",
        "n_threads",
    ]

    def __init__(
        self,
        assets,
        n_pairs=256,
        seed=0,
        near_window=DEFAULT_NEAR_WINDOW,
        percentile=DEFAULT_PERCENTILE,
        n_threads=None,
    ):
        if int(n_pairs) < 1:
            raise ValueError(f"n_pairs must be >= 1, found {n_pairs}")
        if int(near_window) < 1:
            raise ValueError(f"near_window must be >= 1, found {near_window}")
        self._assets = assets
        self._n_pairs = int(n_pairs)
        self._seed = int(seed)
        self._near_window = int(near_window)
        self._percentile = float(percentile)
        self._n_threads = n_threads
        self._encoded = encode_template(assets)

    @property
    def assets(self):
        """Face model assets."""
        return self._assets

    @property
    def n_pairs(self):
        """Random pairs per anchor."""
        return self._n_pairs

    @property
    def seed(self):
        """Pair generator key."""
        return self._seed

    @property
    def near_window(self):
        """Near-frame window in frames."""
        return self._near_window

    @property
    def percentile(self):
        """Ceiling percentile."""
        return self._percentile

    @property
    def n_threads(self):
        """Worker thread cap."""
        return self._n_threads

    def calibrate(self, corpus):
        """See :py:func:`hef_calibrate`."""
        return hef_calibrate(
            self._assets,
            self._encoded,
            corpus,
            self._n_pairs,
            self._seed,
            near_window=self._near_window,
            percentile=self._percentile,
            n_threads=self._n_threads,
        )
