#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Noise schedules, forward noising and DDIM sampling."""

# =============================================================================
# IMPORTS
# =============================================================================

from .sampler import (
    DDIMSampler,
    GuidanceConfig,
    SPACINGS,
    TERMINAL_MODES,
    cfg_combine,
    ddim_sample,
    ddim_step,
    ddim_timesteps,
)
from .schedule import (
    DEFAULT_BETA_END,
    DEFAULT_BETA_START,
    DEFAULT_TRAIN_STEPS,
    NoiseSchedule,
    SHIFT_MODES,
    add_noise,
    enforce_zero_terminal_snr,
    linear_schedule,
    sample_frame_timesteps,
    shift_log_snr,
    shift_ratio,
    temporal_shift,
)


__all__ = [
    "DDIMSampler",
    "GuidanceConfig",
    "SPACINGS",
    "TERMINAL_MODES",
    "cfg_combine",
    "ddim_sample",
    "ddim_step",
    "ddim_timesteps",
    "DEFAULT_BETA_END",
    "DEFAULT_BETA_START",
    "DEFAULT_TRAIN_STEPS",
    "NoiseSchedule",
    "SHIFT_MODES",
    "add_noise",
    "enforce_zero_terminal_snr",
    "linear_schedule",
    "sample_frame_timesteps",
    "shift_log_snr",
    "shift_ratio",
    "temporal_shift",
]
