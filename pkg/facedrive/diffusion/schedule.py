#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Noise schedules of a variance-preserving diffusion process.

A schedule is the table of cumulative signal rates ``ᾱ_t``; the forward
process is ``z_t = sqrt(ᾱ_t) z_0 + sqrt(1 - ᾱ_t) ε``. All the math runs in
float64.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
from dataclasses import dataclass

import numpy as np

from scipy import special

from ..utils import DiffEqualityMixin, diff

# =============================================================================
# CONSTANTS
# =============================================================================

DEFAULT_TRAIN_STEPS = 1000

DEFAULT_BETA_START = 0.00085

DEFAULT_BETA_END = 0.012

SHIFT_MODES = ("log_snr", "alpha")

logger = logging.getLogger(__name__)


# =============================================================================
# SCHEDULE
# =============================================================================


@dataclass(frozen=True, eq=False, repr=False)
class NoiseSchedule(DiffEqualityMixin):
    """Cumulative signal rates of the training timesteps.

    Parameters
    ----------
    alphas_cumprod : array-like of shape (N,)
        Strictly decreasing values in ``[0, 1]``. Only the last entry may
        be 0.
    shift_ratio : float, optional
        Accumulated shift ratio applied to the schedule (1 when unshifted).

    """

    alphas_cumprod: np.ndarray
    shift_ratio: float = 1.0

    def __post_init__(self):
        alphas = np.array(self.alphas_cumprod, dtype=np.float64)
        if alphas.ndim != 1 or not len(alphas):
            raise ValueError(
                f"expected a non-empty 1D table, found {alphas.shape}"
            )
        if not np.all(np.isfinite(alphas)):
            raise ValueError("alphas_cumprod has non-finite entries")
        if alphas.min() < 0 or alphas.max() > 1:
            raise ValueError("alphas_cumprod must lie in [0, 1]")
        if np.any(np.diff(alphas) >= 0):
            raise ValueError("alphas_cumprod must be strictly decreasing")
        if np.any(alphas[:-1] == 0):
            raise ValueError("only the terminal entry may be 0")
        if self.shift_ratio <= 0:
            raise ValueError(
                f"shift_ratio must be positive, found {self.shift_ratio}"
            )
        alphas.flags.writeable = False
        object.__setattr__(self, "alphas_cumprod", alphas)
        object.__setattr__(self, "shift_ratio", float(self.shift_ratio))

    # PROPERTIES ==============================================================

    @property
    def n_steps(self):
        """Number of training timesteps."""
        return len(self.alphas_cumprod)

    @property
    def zero_terminal(self):
        """True when the last timestep is pure noise."""
        return bool(self.alphas_cumprod[-1] == 0)

    @property
    def betas(self):
        """Per-step noise rates ``1 - ᾱ_t / ᾱ_{t-1}``."""
        alphas = self.alphas_cumprod
        previous = np.concatenate([[1.0], alphas[:-1]])
        return 1.0 - alphas / previous

    @property
    def snr(self):
        """Signal-to-noise ratio ``ᾱ / (1 - ᾱ)`` (inf where ``ᾱ = 1``)."""
        alphas = self.alphas_cumprod
        with np.errstate(divide="ignore"):
            return alphas / (1.0 - alphas)

    @property
    def log_snr(self):
        """Natural log of :py:attr:`snr`."""
        return special.logit(self.alphas_cumprod)

    def __len__(self):
        """Number of training timesteps."""
        return self.n_steps

    def __getitem__(self, t):
        """``ᾱ_t``."""
        return self.alphas_cumprod[t]

    # CMP =====================================================================

    def diff(
        self, other, rtol=1e-05, atol=1e-08, equal_nan=True, check_dtypes=False
    ):
        """Compare the tables and the shift ratios."""

        def array_allclose(left, right):
            return left.shape == right.shape and bool(
                np.allclose(
                    left, right, rtol=rtol, atol=atol, equal_nan=equal_nan
                )
            )

        return diff(
            self,
            other,
            alphas_cumprod=array_allclose,
            shift_ratio=np.isclose,
        )

    def __repr__(self):
        """x.__repr__() <==> repr(x)."""
        return (
            f"<NoiseSchedule n_steps={self.n_steps} "
            f"alpha_0={self.alphas_cumprod[0]:.6g} "
            f"alpha_T={self.alphas_cumprod[-1]:.6g} "
            f"shift_ratio={self.shift_ratio:.4g}>"
        )


# =============================================================================
# CONSTRUCTION AND CORRECTIONS
# =============================================================================


def linear_schedule(
    n_steps=DEFAULT_TRAIN_STEPS,
    beta_start=DEFAULT_BETA_START,
    beta_end=DEFAULT_BETA_END,
):
    """Linearly increasing per-step noise rates.

    ``β_t`` interpolates ``beta_start .. beta_end`` and
    ``ᾱ_t = prod_{s <= t} (1 - β_s)``.

    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, found {n_steps}")
    if not 0 < beta_start < beta_end < 1:
        raise ValueError(
            "expected 0 < beta_start < beta_end < 1, "
            f"found {beta_start}, {beta_end}"
        )
    betas = np.linspace(beta_start, beta_end, int(n_steps), dtype=np.float64)
    return NoiseSchedule(np.cumprod(1.0 - betas))


def enforce_zero_terminal_snr(schedule):
    """Rescale ``sqrt(ᾱ)`` so the last timestep is pure noise.

    ``sqrt(ᾱ)`` is shifted and scaled affinely: the terminal value becomes
    exactly 0 and the first value is kept. A schedule that already ends at
    0 is returned unchanged.

    """
    if schedule.zero_terminal:
        return schedule
    if schedule.n_steps < 2:
        raise ValueError("zero terminal SNR needs at least two timesteps")

    root = np.sqrt(schedule.alphas_cumprod)
    first, last = root[0], root[-1]
    rescaled = (root - last) * (first / (first - last))
    rescaled[-1] = 0.0
    logger.debug("Zero terminal SNR: sqrt(alpha_T) %.6g -> 0", last)
    return NoiseSchedule(rescaled**2, shift_ratio=schedule.shift_ratio)


def shift_ratio(n_gen):
    """Temporal shift ratio ``sqrt(1 / n_gen)``."""
    if n_gen < 1:
        raise ValueError(f"n_gen must be >= 1, found {n_gen}")
    return float(np.sqrt(1.0 / n_gen))


def shift_log_snr(schedule, ratio):
    """Multiply the SNR of every timestep by ``ratio**2``.

    The shift adds ``2 ln(ratio)`` to the log-SNR; entries at exactly 0 or
    1 have no finite log-SNR and pass through unchanged.

    """
    ratio = float(ratio)
    if ratio <= 0:
        raise ValueError(f"ratio must be positive, found {ratio}")
    if ratio == 1.0:
        return schedule

    alphas = schedule.alphas_cumprod
    inner = (alphas > 0) & (alphas < 1)
    shifted = alphas.copy()
    shifted[inner] = special.expit(
        special.logit(alphas[inner]) + 2.0 * np.log(ratio)
    )
    return NoiseSchedule(shifted, shift_ratio=schedule.shift_ratio * ratio)


def temporal_shift(schedule, n_gen, mode="log_snr"):
    """Shift a schedule towards noise for ``n_gen`` jointly generated frames.

    Parameters
    ----------
    schedule : NoiseSchedule
    n_gen : int
        Number of generated frames; the ratio is ``sqrt(1 / n_gen)``.
    mode : {"log_snr", "alpha"}, optional
        ``"log_snr"`` multiplies the SNR by ``ratio**2``; ``"alpha"``
        multiplies ``ᾱ`` itself by ``ratio**2``.

    Returns
    -------
    NoiseSchedule
        Its ``shift_ratio`` records the applied ratio.

    """
    if mode not in SHIFT_MODES:
        raise ValueError(
            f"Invalid shift mode {mode!r}. "
            f"Choose from: {', '.join(SHIFT_MODES)}"
        )
    ratio = shift_ratio(n_gen)
    if ratio == 1.0:
        return schedule
    if mode == "log_snr":
        return shift_log_snr(schedule, ratio)
    return NoiseSchedule(
        schedule.alphas_cumprod * ratio**2,
        shift_ratio=schedule.shift_ratio * ratio,
    )


# =============================================================================
# FORWARD PROCESS
# =============================================================================


def _coefficient(values, t, ndim):
    t = np.asarray(t)
    if not np.issubdtype(t.dtype, np.integer):
        raise TypeError(f"timesteps must be integers, found {t.dtype}")
    if np.any(t < 0) or np.any(t >= len(values)):
        raise ValueError(
            f"timestep out of range [0, {len(values)}): {t.min()}..{t.max()}"
        )
    coefficient = values[t]
    return coefficient.reshape(t.shape + (1,) * (ndim - t.ndim))


def add_noise(z0, eps, schedule, t):
    """Forward-noise ``z0`` to timestep ``t``.

    Parameters
    ----------
    z0, eps : array-like
        Same shape.
    schedule : NoiseSchedule
    t : int or array of int
        A timestep, or one per leading index of ``z0`` (e.g. a
        ``(batch, frames)`` grid).

    Returns
    -------
    numpy.ndarray
        ``sqrt(ᾱ_t) z0 + sqrt(1 - ᾱ_t) eps``.

    """
    z0 = np.asarray(z0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if z0.shape != eps.shape:
        raise ValueError(
            f"z0 and eps shapes differ: {z0.shape} != {eps.shape}"
        )
    alphas = _coefficient(schedule.alphas_cumprod, t, z0.ndim)
    return np.sqrt(alphas) * z0 + np.sqrt(1.0 - alphas) * eps


def sample_frame_timesteps(
    batch, n_frames, n_steps=DEFAULT_TRAIN_STEPS, seed=0
):
    """Independent uniform timesteps on a ``(batch, n_frames)`` grid."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, found {n_steps}")
    random = np.random.default_rng(seed)
    return random.integers(0, n_steps, size=(batch, n_frames))
