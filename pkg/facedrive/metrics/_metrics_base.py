#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Core functionalities shared by the motion-fidelity metrics."""

# =============================================================================
# IMPORTS
# =============================================================================

import abc

import matplotlib.pyplot as plt

import methodtools

import numpy as np

import pandas as pd

import seaborn as sns

from ..core import FDMethodABC
from ..utils import (
    AccessorABC,
    Bunch,
    DiffEqualityMixin,
    diff,
    dict_allclose,
    doc_inherit,
)

# =============================================================================
# CONSTANTS
# =============================================================================

#: Version of the CSV / JSON report layout written by the CLI.
REPORT_SCHEMA_VERSION = 1


# =============================================================================
# PLOTTER
# =============================================================================


class MetricReportPlotter(AccessorABC):
    """MetricReport plot utilities.

    Kind of plot to produce:

    - 'line' : per-frame values (default).
    - 'hist' : histogram of the per-frame values.
    - 'box' : box plot of the per-frame values.

    """

    _default_kind = "line"
    _kinds = ("line", "hist", "box")

    def __init__(self, report):
        self._report = report

    def _label(self, ax):
        ax.set_title(f"{self._report.metric} ({self._report.sample_id})")
        return ax

    def line(self, **kwargs):
        """Draw the per-frame values against the frame index."""
        frame = self._report.to_frame()
        kwargs.setdefault("marker", "o")
        ax = sns.lineplot(x="frame", y="value", data=frame, **kwargs)
        ax.axhline(self._report.mean, color="k", linestyle="--", lw=1)
        return self._label(ax)

    def hist(self, **kwargs):
        """Draw the distribution of the per-frame values."""
        ax = sns.histplot(self._report.to_series().dropna(), **kwargs)
        return self._label(ax)

    def box(self, **kwargs):
        """Draw a box plot of the per-frame values."""
        kwargs.setdefault("ax", plt.gca())
        ax = sns.boxplot(y=self._report.to_series().dropna(), **kwargs)
        return self._label(ax)


# =============================================================================
# REPORT
# =============================================================================


class MetricReport(DiffEqualityMixin):
    """Per-frame values of a metric on one sample and their aggregates.

    Parameters
    ----------
    metric : str
        Metric name, e.g. ``"hpf"``.
    values : array-like
        One value per frame. NaN marks frames without a score.
    sample_id : str, optional
        Name of the evaluated clip.
    extra : dict, optional
        Additional information produced by the metric.

    """

    def __init__(self, metric, values, sample_id="sample", extra=None):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or not len(values):
            raise ValueError(
                "expected a non-empty 1D array of values, "
                f"found {values.shape}"
            )
        self._metric = str(metric)
        self._sample_id = str(sample_id)
        self._extra = Bunch("extra", dict(extra or {}))
        self._series = pd.Series(
            values,
            index=pd.RangeIndex(len(values), name="frame"),
            name=self._metric,
            copy=True,
        )

    # PROPERTIES ==============================================================

    @property
    def metric(self):
        """Name of the metric."""
        return self._metric

    @property
    def sample_id(self):
        """Name of the evaluated sample."""
        return self._sample_id

    @property
    def values(self):
        """Per-frame values as a numpy array."""
        return self._series.to_numpy(copy=True)

    @property
    def extra_(self):
        """Additional information about the report.

        Note
        ----
        ``e_`` is an alias for this property

        """
        return self._extra

    e_ = extra_

    @property
    def n(self):
        """Number of frames with a score."""
        return int(self._series.count())

    @property
    def mean(self):
        """Arithmetic mean over the frames with a score."""
        if not self.n:
            return float("nan")
        return float(np.nanmean(self._series.to_numpy()))

    @property
    def std(self):
        """Sample standard deviation (0 for a single frame)."""
        if self.n < 2:
            return 0.0
        return float(np.nanstd(self._series.to_numpy(), ddof=1))

    def __len__(self):
        """Number of frames, with or without score."""
        return len(self._series)

    @methodtools.lru_cache(maxsize=None)
    @property
    def plot(self):
        """Plot accessor."""
        return MetricReportPlotter(self)

    # UTILS ===================================================================

    def to_series(self):
        """The per-frame values as `pandas.Series`."""
        return self._series.copy(deep=True)

    def to_frame(self):
        """Long table with the columns ``sample_id, frame, value``."""
        return pd.DataFrame(
            {
                "sample_id": self._sample_id,
                "frame": self._series.index.to_numpy(),
                "value": self._series.to_numpy(),
            }
        )

    def summary(self):
        """JSON-compatible aggregate: ``metric, mean, std, n``."""
        return {
            "metric": self._metric,
            "mean": self.mean,
            "std": self.std,
            "n": self.n,
        }

    @staticmethod
    def aggregate(reports):
        """Dataset-level aggregate of several reports of the same metric.

        The mean and standard deviation are taken over the per-sample
        means; ``n`` is the number of samples.

        """
        reports = list(reports)
        if not reports:
            raise ValueError("no reports to aggregate")
        metrics = {report.metric for report in reports}
        if len(metrics) != 1:
            raise ValueError(f"reports mix metrics {sorted(metrics)}")

        means = np.array([report.mean for report in reports])
        valid = means[~np.isnan(means)]
        return {
            "metric": metrics.pop(),
            "mean": float(valid.mean()) if len(valid) else float("nan"),
            "std": float(valid.std(ddof=1)) if len(valid) > 1 else 0.0,
            "n": int(len(valid)),
        }

    # CMP =====================================================================

    @doc_inherit(DiffEqualityMixin.diff)
    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        def array_allclose(left_value, right_value):
            return left_value.shape == right_value.shape and np.allclose(
                left_value,
                right_value,
                rtol=rtol,
                atol=atol,
                equal_nan=equal_nan,
            )

        def extra_allclose(left_value, right_value):
            return dict_allclose(
                left_value.to_dict(),
                right_value.to_dict(),
                rtol=rtol,
                atol=atol,
                equal_nan=equal_nan,
            )

        members = {
            "metric": np.array_equal,
            "sample_id": np.array_equal,
            "values": array_allclose,
            "extra_": extra_allclose,
        }
        return diff(self, other, **members)

    # REPR ====================================================================

    def __repr__(self):
        """report.__repr__() <==> repr(report)."""
        df = self._series.to_frame().T
        string = df.to_string(show_dimensions=False)
        return (
            f"{string}\n[Metric: {self._metric}, sample: {self._sample_id}, "
            f"mean: {self.mean:.6g}]"
        )


# =============================================================================
# METRIC ABC
# =============================================================================


class MetricABC(FDMethodABC):
    """Abstract class of every clip-level metric.

    Subclasses implement ``_evaluate_clips`` returning the per-frame values
    and a dict of extra information.

    """

    _facedrive_abstract_class = True
    _facedrive_kind = "metric"

    #: Name written in the reports.
    _metric_name = None

    def __init_subclass__(cls):
        """Validate that the subclass names its metric."""
        super().__init_subclass__()
        if vars(cls).get("_facedrive_abstract_class", False):
            return
        if cls._metric_name is None:
            raise TypeError(f"{cls} must redefine '_metric_name'")

    @abc.abstractmethod
    def _evaluate_clips(self, target, pred):
        """Per-frame values and extra information of a pair of clips."""
        raise NotImplementedError()

    def evaluate(self, target, pred, sample_id="sample"):
        """Score ``pred`` against ``target``.

        Parameters
        ----------
        target : ClipBundle
            Reference (driving) parameters.
        pred : ClipBundle
            Parameters fitted to the generated clip.
        sample_id : str, optional

        Returns
        -------
        MetricReport

        """
        if target.n_frames != pred.n_frames:
            raise ValueError(
                f"frame count mismatch: target has {target.n_frames} "
                f"frames, prediction has {pred.n_frames}"
            )
        values, extra = self._evaluate_clips(target, pred)
        return MetricReport(
            self._metric_name, values, sample_id=sample_id, extra=extra
        )
