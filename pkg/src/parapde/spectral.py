"""Power-spectral-density transforms for noise-robust model scoring.

Model selection compares the regression target and the model prediction in
representations that suppress noise: the per-step profile is mapped to its
one-sided periodogram, optionally integrated over frequency to a single
scalar per step.  Validation data for the subset search can additionally be
restricted to high-power temporal frequencies, discarding bins that carry
mostly noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, FilterError
from .preprocessing import CandidateLibrary

IDENTITY = "identity"
PSD_INTEGRATED = "psd_integrated"


@dataclass(frozen=True)
class Psd:
    """One-sided power spectral density (density scaling, boxcar window)."""

    frequencies: np.ndarray
    power: np.ndarray


@dataclass(frozen=True)
class TransformedSeries:
    """The transform T applied stepwise: one scalar per step for the PSD
    transform, the flattened raw samples for the identity transform."""

    values: np.ndarray
    transform_id: str


@dataclass(frozen=True)
class FrequencyMask:
    """Retained temporal-frequency bins of an rfft along the step axis.

    ``weights`` carry the one-sided doubling (2 for interior bins, 1 for DC
    and Nyquist) so that summing ``weight * |bin|^2`` over all bins equals
    ``n_steps`` times the time-domain sum of squares.
    """

    retained_indices: np.ndarray
    percentile: float
    weights: np.ndarray
    n_steps: int

    def dft_rows(self) -> np.ndarray:
        """Rows of the DFT matrix for the retained bins, shape (n_kept, n_steps)."""
        steps = np.arange(self.n_steps)
        return np.exp(
            -2j * np.pi * self.retained_indices[:, None] * steps[None, :] / self.n_steps
        )


def _one_sided_weights(n: int) -> np.ndarray:
    n_f = n // 2 + 1
    w = np.full(n_f, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return w


def periodogram(signal: np.ndarray, sample_spacing: float, detrend: bool = False) -> Psd:
    """One-sided periodogram with density scaling.

    ``power[k] = (2 / (fs * n)) |DFT(signal)[k]|^2`` for interior bins,
    un-doubled at DC and Nyquist; summing ``power * df`` over bins recovers
    the signal's mean square exactly (Parseval).
    """
    x = np.asarray(signal, dtype=float)
    n = x.size
    if n < 4:
        raise ConfigError(f"periodogram needs at least 4 samples, got {n}")
    if detrend:
        x = x - x.mean()
    fs = 1.0 / sample_spacing
    spec = np.fft.rfft(x)
    power = _one_sided_weights(n) * np.abs(spec) ** 2 / (fs * n)
    freqs = np.fft.rfftfreq(n, d=sample_spacing)
    return Psd(freqs, power)


def step_psd(profile: np.ndarray, spacing: float) -> Psd:
    """Un-integrated per-step PSD (the ablated form of the transform)."""
    return periodogram(profile, spacing)


def psd_transform_step(profile: np.ndarray, spacing: float) -> float:
    """Trapezoidal integral of the step's periodogram over frequency."""
    psd = periodogram(profile, spacing)
    return float(np.trapezoid(psd.power, psd.frequencies))


def transform_field(
    step_profiles: np.ndarray, spacing: float, transform_id: str = PSD_INTEGRATED
) -> TransformedSeries:
    """Apply the transform to every step profile.

    ``step_profiles`` has shape (n_steps, n_samples).  The PSD transform
    yields one scalar per step; the identity transform flattens the raw
    samples, so squared distances between two series reduce to the ordinary
    residual sum of squares.
    """
    profiles = np.asarray(step_profiles, dtype=float)
    if profiles.ndim != 2:
        raise ConfigError("step_profiles must be 2-D (n_steps, n_samples)")
    if transform_id == IDENTITY:
        return TransformedSeries(profiles.ravel().copy(), IDENTITY)
    if transform_id != PSD_INTEGRATED:
        raise ConfigError(f"unknown transform_id {transform_id!r}")
    n = profiles.shape[1]
    if n < 4:
        raise ConfigError(f"PSD transform needs at least 4 samples per step, got {n}")
    fs = 1.0 / spacing
    spec = np.fft.rfft(profiles, axis=1)
    power = _one_sided_weights(n)[None, :] * np.abs(spec) ** 2 / (fs * n)
    freqs = np.fft.rfftfreq(n, d=spacing)
    values = np.trapezoid(power, freqs, axis=1)
    return TransformedSeries(values, PSD_INTEGRATED)


def transformed_rss(target: TransformedSeries, model: TransformedSeries) -> float:
    """Generalized residual sum of squares between two transformed series."""
    if target.transform_id != model.transform_id:
        raise ConfigError("cannot mix transform representations in one RSS")
    if target.values.shape != model.values.shape:
        raise ConfigError("transformed series lengths differ")
    return float(np.sum((target.values - model.values) ** 2))


def frequency_filter_validation(
    validation: CandidateLibrary, percentile: float = 90.0, per_column: bool = False
) -> tuple[CandidateLibrary, FrequencyMask]:
    """Restrict validation data to high-power temporal frequencies.

    Every candidate column traces an (n_samples x n_steps) matrix; its DFT
    along the step axis gives per-frequency amplitudes.  Power is averaged
    over samples and columns (or per column, retaining the union, when
    ``per_column`` is set) and bins below the given percentile are dropped.
    The returned library replaces the step axis by the retained frequencies;
    each step stacks the real and imaginary parts of the transformed target
    and columns as real samples, scaled so that with nothing removed the
    total residual power equals ``n_steps`` times the raw validation RSS.
    """
    n_steps = validation.n_steps
    if n_steps < 8:
        raise ConfigError(f"frequency filter needs at least 8 steps, got {n_steps}")
    mats_tilde = np.fft.rfft(validation.step_matrices, axis=0)
    targets_tilde = np.fft.rfft(validation.targets, axis=0)

    power = np.abs(mats_tilde) ** 2
    if per_column:
        per_col = power.mean(axis=1)  # (n_f, n_terms)
        keep = np.zeros(per_col.shape[0], dtype=bool)
        for j in range(per_col.shape[1]):
            keep |= per_col[:, j] >= np.percentile(per_col[:, j], percentile)
        retained = np.flatnonzero(keep)
    else:
        agg = power.mean(axis=(1, 2))
        retained = np.flatnonzero(agg >= np.percentile(agg, percentile))
    if retained.size < 2:
        raise FilterError(
            f"only {retained.size} frequencies retained at percentile {percentile}; "
            "lower the percentile"
        )

    weights = _one_sided_weights(n_steps)[retained]
    scale = np.sqrt(weights)[:, None]
    kept_t = targets_tilde[retained]
    kept_m = mats_tilde[retained]
    new_targets = np.concatenate(
        [scale * kept_t.real, scale * kept_t.imag], axis=1
    )
    new_mats = np.concatenate(
        [scale[:, :, None] * kept_m.real, scale[:, :, None] * kept_m.imag], axis=1
    )
    filtered = replace(
        validation,
        step_matrices=new_mats,
        targets=new_targets,
        sample_indices=None,
    )
    mask = FrequencyMask(retained, percentile, weights, n_steps)
    return filtered, mask


def representation_error_report(
    clean_steps: np.ndarray, noisy_steps: np.ndarray, spacing: float
) -> dict[str, float]:
    """Relative errors of three representations of a noisy step-profile stack.

    Both inputs have shape (n_steps, n_samples); the report compares the raw
    samples, the magnitude of the per-step DFT, and the PSD-integrated
    series against the clean reference (relative Frobenius norms).
    """
    clean = np.asarray(clean_steps, dtype=float)
    noisy = np.asarray(noisy_steps, dtype=float)
    if clean.shape != noisy.shape:
        raise ConfigError("clean and noisy stacks must share a shape")

    def rel(a, b):
        denom = np.linalg.norm(b)
        return float(np.linalg.norm(a - b) / denom) if denom > 0 else 0.0

    raw = rel(noisy, clean)
    dft_mag = rel(
        np.abs(np.fft.rfft(noisy, axis=1)), np.abs(np.fft.rfft(clean, axis=1))
    )
    psd = rel(
        transform_field(noisy, spacing).values, transform_field(clean, spacing).values
    )
    return {"raw": raw, "dft_magnitude": dft_mag, "psd_integrated": psd}
