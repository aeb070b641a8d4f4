#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Deterministic DDIM sampling with classifier-free guidance.

The denoiser is any callable ``denoiser(z, t, conditional) -> eps`` with
``conditional=None`` for the unconditional branch; no network ships with
this package.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
from dataclasses import dataclass

import numpy as np

from .schedule import (
    DEFAULT_BETA_END,
    DEFAULT_BETA_START,
    DEFAULT_TRAIN_STEPS,
    SHIFT_MODES,
    enforce_zero_terminal_snr,
    linear_schedule,
    temporal_shift,
)
from ..core import FDMethodABC

# =============================================================================
# CONSTANTS
# =============================================================================

SPACINGS = ("trailing", "leading", "linspace")

#: ``"zero"``: ``ẑ_0 = 0`` at a pure-noise step; ``"raise"``: error.
TERMINAL_MODES = ("zero", "raise")

logger = logging.getLogger(__name__)


# =============================================================================
# GUIDANCE
# =============================================================================


def cfg_combine(eps_uncond, eps_cond, scale):
    """Classifier-free guidance ``eps_u + s (eps_c - eps_u)``.

    Evaluated as ``(1 - s) eps_u + s eps_c`` so ``s = 0`` and ``s = 1``
    return the endpoints exactly.

    """
    eps_uncond = np.asarray(eps_uncond, dtype=np.float64)
    eps_cond = np.asarray(eps_cond, dtype=np.float64)
    if eps_uncond.shape != eps_cond.shape:
        raise ValueError(
            "guidance branches differ in shape: "
            f"{eps_uncond.shape} != {eps_cond.shape}"
        )
    scale = float(scale)
    return (1.0 - scale) * eps_uncond + scale * eps_cond


@dataclass(frozen=True)
class GuidanceConfig:
    """Classifier-free guidance settings.

    Parameters
    ----------
    scale : float, optional
        Guidance scale ``s >= 0``. Default 2.
    dropout : float, optional
        Probability of dropping the condition at training time.

    """

    scale: float = 2.0
    dropout: float = 0.1

    def __post_init__(self):
        if not self.scale >= 0:
            raise ValueError(f"scale must be >= 0, found {self.scale}")
        if not 0 <= self.dropout <= 1:
            raise ValueError(
                f"dropout must be in [0, 1], found {self.dropout}"
            )

    def dropout_mask(self, batch, seed=0):
        """Boolean mask of the batch elements trained unconditionally."""
        random = np.random.default_rng(seed)
        return random.random(int(batch)) < self.dropout


# =============================================================================
# TIMESTEPS
# =============================================================================


def ddim_timesteps(n_train, n_inference, spacing="trailing"):
    """Descending inference timesteps.

    Parameters
    ----------
    n_train : int
        Training timesteps of the schedule.
    n_inference : int
        Sampling steps, ``1 <= n_inference <= n_train``.
    spacing : {"trailing", "leading", "linspace"}, optional
        ``"trailing"`` starts at ``n_train - 1`` (the pure-noise step of a
        zero-terminal schedule); ``"leading"`` starts at 0 and strides by
        ``n_train // n_inference``; ``"linspace"`` spreads evenly over
        ``[0, n_train - 1]``.

    Returns
    -------
    numpy.ndarray of int
        Strictly decreasing.

    """
    if not 1 <= n_inference <= n_train:
        raise ValueError(
            f"n_inference must be in [1, {n_train}], found {n_inference}"
        )
    if spacing == "trailing":
        ratio = n_train / n_inference
        steps = np.round(np.arange(n_train, 0, -ratio)).astype(np.int64) - 1
    elif spacing == "leading":
        ratio = n_train // n_inference
        steps = (np.arange(n_inference) * ratio)[::-1].astype(np.int64)
    elif spacing == "linspace":
        steps = np.linspace(0, n_train - 1, n_inference)
        steps = np.round(steps)[::-1].astype(np.int64)
    else:
        raise ValueError(
            f"Invalid spacing {spacing!r}. Choose from: {', '.join(SPACINGS)}"
        )
    return steps[:n_inference].copy()


# =============================================================================
# DDIM
# =============================================================================


def ddim_step(z_t, eps_pred, schedule, t, t_prev, *, terminal="zero"):
    """One deterministic DDIM update (``η = 0``).

    Parameters
    ----------
    z_t, eps_pred : array-like
        Current latent and predicted noise, same shape.
    schedule : NoiseSchedule
    t : int
        Current timestep.
    t_prev : int
        Target timestep, ``t_prev < t``; ``-1`` denotes the clean sample
        (``ᾱ = 1``).
    terminal : {"zero", "raise"}, optional
        Handling of a pure-noise step (``ᾱ_t = 0``) where
        ``ẑ_0 = (z_t - sqrt(1 - ᾱ_t) eps) / sqrt(ᾱ_t)`` is undefined.
        ``"zero"`` uses ``ẑ_0 = 0``, so the step returns
        ``sqrt(1 - ᾱ_prev) eps_pred``; ``"raise"`` raises ValueError.

    Returns
    -------
    z_prev : numpy.ndarray
    z0_hat : numpy.ndarray

    """
    if terminal not in TERMINAL_MODES:
        raise ValueError(
            f"Invalid terminal mode {terminal!r}. "
            f"Choose from: {', '.join(TERMINAL_MODES)}"
        )
    if not -1 <= t_prev < t < schedule.n_steps:
        raise ValueError(
            f"expected -1 <= t_prev < t < {schedule.n_steps}, "
            f"found t={t}, t_prev={t_prev}"
        )
    z_t = np.asarray(z_t, dtype=np.float64)
    eps_pred = np.asarray(eps_pred, dtype=np.float64)
    if z_t.shape != eps_pred.shape:
        raise ValueError(
            f"latent and noise shapes differ: {z_t.shape} != {eps_pred.shape}"
        )

    alpha = schedule.alphas_cumprod[t]
    alpha_prev = 1.0 if t_prev < 0 else schedule.alphas_cumprod[t_prev]

    if alpha == 0:
        if terminal == "raise":
            raise ValueError(f"z0 is undefined at the pure-noise step t={t}")
        z0_hat = np.zeros_like(z_t)
    else:
        z0_hat = (z_t - np.sqrt(1.0 - alpha) * eps_pred) / np.sqrt(alpha)

    z_prev = (
        np.sqrt(alpha_prev) * z0_hat + np.sqrt(1.0 - alpha_prev) * eps_pred
    )
    return z_prev, z0_hat


def ddim_sample(
    denoiser,
    z_T,
    schedule,
    timesteps,
    conditional=None,
    guidance=None,
    *,
    terminal="zero",
    callback=None,
):
    """Run the deterministic DDIM loop.

    Parameters
    ----------
    denoiser : callable
        ``denoiser(z, t, conditional) -> eps``.
    z_T : array-like
        Starting latent at ``timesteps[0]``.
    schedule : NoiseSchedule
    timesteps : sequence of int
        Strictly decreasing; the loop ends at the clean sample.
    conditional : object, optional
        Passed through to the denoiser.
    guidance : GuidanceConfig or float, optional
        Enables classifier-free guidance when given together with a
        conditional. A float is the guidance scale.
    terminal : {"zero", "raise"}, optional
        See :py:func:`ddim_step`.
    callback : callable, optional
        ``callback(step, t, z_prev, z0_hat)`` after every update.

    Returns
    -------
    numpy.ndarray
        The final clean estimate.

    """
    timesteps = [int(t) for t in timesteps]
    if not timesteps:
        raise ValueError("no timesteps to sample")
    if np.any(np.diff(timesteps) >= 0):
        raise ValueError("timesteps must be strictly decreasing")
    if isinstance(guidance, (int, float)):
        guidance = GuidanceConfig(scale=float(guidance))

    z = np.array(z_T, dtype=np.float64)
    for step, t in enumerate(timesteps):
        t_prev = timesteps[step + 1] if step + 1 < len(timesteps) else -1
        if guidance is not None and conditional is not None:
            eps = cfg_combine(
                denoiser(z, t, None),
                denoiser(z, t, conditional),
                guidance.scale,
            )
        else:
            eps = denoiser(z, t, conditional)
        z, z0_hat = ddim_step(z, eps, schedule, t, t_prev, terminal=terminal)
        if callback is not None:
            callback(step, t, z, z0_hat)
    logger.debug("DDIM finished after %d steps", len(timesteps))
    return z


# =============================================================================
# SAMPLER
# =============================================================================


class DDIMSampler(FDMethodABC):
    """Deterministic DDIM sampler bound to its schedule.

    Parameters
    ----------
    n_inference : int, optional
        Sampling steps. Default 50.
    n_train : int, optional
        Training timesteps of the linear schedule.
    beta_start, beta_end : float, optional
        Linear schedule endpoints.
    zero_terminal : bool, optional
        Rescale the schedule to zero terminal SNR.
    n_gen : int, optional
        Jointly generated frames; shifts the schedule by
        ``sqrt(1 / n_gen)`` when given.
    shift_mode : {"log_snr", "alpha"}, optional
    spacing : {"trailing", "leading", "linspace"}, optional
    guidance_scale : float, optional
        Classifier-free guidance scale used when a conditional is passed.
    terminal : {"zero", "raise"}, optional

    """

    _facedrive_kind = "sampler"
    _facedrive_parameters = [
        "n_inference",
        "n_train",
        "beta_start",
        "beta_end",
        "zero_terminal",
        "n_gen",
        "shift_mode",
        "spacing",
        "guidance_scale",
        "terminal",
    ]

    def __init__(
        self,
        n_inference=50,
        n_train=DEFAULT_TRAIN_STEPS,
        beta_start=DEFAULT_BETA_START,
        beta_end=DEFAULT_BETA_END,
        zero_terminal=True,
        n_gen=None,
        shift_mode="log_snr",
        spacing="trailing",
        guidance_scale=2.0,
        terminal="zero",
    ):
        if shift_mode not in SHIFT_MODES:
            raise ValueError(f"Invalid shift mode {shift_mode!r}")
        if terminal not in TERMINAL_MODES:
            raise ValueError(f"Invalid terminal mode {terminal!r}")

        self._n_inference = int(n_inference)
        self._n_train = int(n_train)
        self._beta_start = float(beta_start)
        self._beta_end = float(beta_end)
        self._zero_terminal = bool(zero_terminal)
        self._n_gen = n_gen
        self._shift_mode = shift_mode
        self._spacing = spacing
        self._terminal = terminal
        self._guidance = GuidanceConfig(scale=guidance_scale)

        schedule = linear_schedule(n_train, beta_start, beta_end)
        if zero_terminal:
            schedule = enforce_zero_terminal_snr(schedule)
        if n_gen is not None:
            schedule = temporal_shift(schedule, n_gen, mode=shift_mode)
        self._schedule = schedule
        self._timesteps = ddim_timesteps(n_train, n_inference, spacing)

    # PROPERTIES ==============================================================

    @property
    def n_inference(self):
        """Sampling steps."""
        return self._n_inference

    @property
    def n_train(self):
        """Training timesteps."""
        return self._n_train

    @property
    def beta_start(self):
        """First per-step noise rate."""
        return self._beta_start

    @property
    def beta_end(self):
        """Last per-step noise rate."""
        return self._beta_end

    @property
    def zero_terminal(self):
        """Whether the schedule ends in pure noise."""
        return self._zero_terminal

    @property
    def n_gen(self):
        """Jointly generated frames, or None."""
        return self._n_gen

    @property
    def shift_mode(self):
        """Temporal shift mode."""
        return self._shift_mode

    @property
    def spacing(self):
        """Timestep spacing."""
        return self._spacing

    @property
    def guidance_scale(self):
        """Classifier-free guidance scale."""
        return self._guidance.scale

    @property
    def terminal(self):
        """Pure-noise step handling."""
        return self._terminal

    @property
    def schedule(self):
        """The effective :py:class:`NoiseSchedule`."""
        return self._schedule

    @property
    def timesteps(self):
        """Copy of the inference timesteps."""
        return self._timesteps.copy()

    # API =====================================================================

    def sample(self, denoiser, z_T, conditional=None, callback=None):
        """See :py:func:`ddim_sample`."""
        return ddim_sample(
            denoiser,
            z_T,
            self._schedule,
            self._timesteps,
            conditional=conditional,
            guidance=self._guidance,
            terminal=self._terminal,
            callback=callback,
        )
