#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Motion-fidelity metrics: head pose and expression follow."""

# =============================================================================
# IMPORTS
# =============================================================================

from ._metrics_base import (
    MetricABC,
    MetricReport,
    MetricReportPlotter,
    REPORT_SCHEMA_VERSION,
)
from .calibration import (
    ANCHORS,
    CalibrationReport,
    CalibrationUnavailableWarning,
    HEFCalibrator,
    REFERENCE_LEVELS,
    hef_calibrate,
)
from .hef import (
    EmptyMaskError,
    ExpressionFollow,
    articulated_displacement,
    hef,
    hef_frame,
    hef_values,
    hef_vertex_residual,
)
from .hpf import (
    DELTA_CONVENTIONS,
    HeadPoseFollow,
    PoseTrajectory,
    compose_head_rotation,
    delta_rotations,
    geodesic_degrees,
    hpf,
    hpf_values,
)


__all__ = [
    "MetricABC",
    "MetricReport",
    "MetricReportPlotter",
    "REPORT_SCHEMA_VERSION",
    "ANCHORS",
    "CalibrationReport",
    "CalibrationUnavailableWarning",
    "HEFCalibrator",
    "REFERENCE_LEVELS",
    "hef_calibrate",
    "EmptyMaskError",
    "ExpressionFollow",
    "articulated_displacement",
    "hef",
    "hef_frame",
    "hef_values",
    "hef_vertex_residual",
    "DELTA_CONVENTIONS",
    "HeadPoseFollow",
    "PoseTrajectory",
    "compose_head_rotation",
    "delta_rotations",
    "geodesic_degrees",
    "hpf",
    "hpf_values",
]
