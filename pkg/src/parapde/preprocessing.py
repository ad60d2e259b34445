"""Field preprocessing and candidate-library assembly.

The discovery pipeline regresses the time derivative of a field on a
library of nonlinear candidate terms, one linear system per step along the
parameter axis (time steps when the PDE coefficients vary in time, spatial
points when they vary in space).  This module produces the ingredients:

* Savitzky-Golay smoothing of noisy fields,
* time derivatives by Kalman filtering + RTS smoothing of a local
  linear-trend model per spatial location,
* spatial derivatives up to fourth order by Savitzky-Golay derivative
  filters (wrapping across the boundary on periodic grids),
* the 20-term candidate library (powers of u up to cubic, each multiplied
  by a spatial derivative of order 0..4),
* a seeded train/validation split of the sample axis, shared across steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field, replace
from typing import Optional

import numpy as np
from scipy.signal import savgol_filter

from .errors import ConfigError, NumericalError
from .grid import Field, Grid

N_POWERS = 4
N_DERIV_ORDERS = 5

SMOOTH_WINDOW = 15
SMOOTH_POLYORDER = 3
DERIV_WINDOW = 17
DERIV_POLYORDER = 7

KALMAN_RATIO_GRID = tuple(10.0**k for k in range(-4, 9))


def term_label(power: int, deriv_order: int) -> str:
    if power == 0 and deriv_order == 0:
        return "1"
    p_part = "" if power == 0 else ("u" if power == 1 else f"u^{power}")
    d_part = "" if deriv_order == 0 else "u_" + "x" * deriv_order
    if not p_part:
        return d_part
    if not d_part:
        return p_part
    return f"{p_part} {d_part}"


@dataclass(frozen=True)
class TermDescriptor:
    """One candidate term: u**power times the deriv_order-th spatial derivative."""

    power: int
    deriv_order: int

    def __post_init__(self):
        if not (0 <= self.power < N_POWERS):
            raise ConfigError(f"term power {self.power} outside [0, {N_POWERS - 1}]")
        if not (0 <= self.deriv_order < N_DERIV_ORDERS):
            raise ConfigError(
                f"derivative order {self.deriv_order} outside [0, {N_DERIV_ORDERS - 1}]"
            )

    @property
    def label(self) -> str:
        return term_label(self.power, self.deriv_order)


def default_terms() -> list[TermDescriptor]:
    """All 20 candidate terms, ordered lexicographically by (power, order)."""
    return [TermDescriptor(p, d) for p in range(N_POWERS) for d in range(N_DERIV_ORDERS)]


@dataclass(frozen=True)
class DerivativeStack:
    """A field together with its spatial derivatives and (optionally) u_t."""

    u: Field
    u_x: Field
    u_xx: Field
    u_xxx: Field
    u_xxxx: Field
    u_t: Optional[Field] = None

    def spatial(self, order: int) -> Field:
        return (self.u, self.u_x, self.u_xx, self.u_xxx, self.u_xxxx)[order]

    def with_time_derivative(self, u_t: Field) -> "DerivativeStack":
        return replace(self, u_t=u_t)

    def transpose(self) -> "DerivativeStack":
        return DerivativeStack(
            self.u.transpose(),
            self.u_x.transpose(),
            self.u_xx.transpose(),
            self.u_xxx.transpose(),
            self.u_xxxx.transpose(),
            None if self.u_t is None else self.u_t.transpose(),
        )


@dataclass(frozen=True)
class CandidateLibrary:
    """Per-step design matrices over a common term set.

    ``step_matrices`` has shape (n_steps, n_samples, n_terms) and ``targets``
    (n_steps, n_samples); every step shares the identical column ordering.
    """

    axis: str
    step_matrices: np.ndarray
    targets: np.ndarray
    terms: tuple[TermDescriptor, ...]
    sample_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.axis not in ("temporal", "spatial"):
            raise ConfigError(f"axis must be 'temporal' or 'spatial', got {self.axis!r}")
        if self.step_matrices.shape[:2] != self.targets.shape:
            raise ConfigError("step_matrices and targets disagree on steps/samples")
        if self.step_matrices.shape[2] != len(self.terms):
            raise ConfigError("number of term descriptors does not match columns")

    @property
    def n_steps(self) -> int:
        return self.step_matrices.shape[0]

    @property
    def n_samples(self) -> int:
        return self.step_matrices.shape[1]

    @property
    def n_terms(self) -> int:
        return self.step_matrices.shape[2]

    def labels(self) -> list[str]:
        return [t.label for t in self.terms]


def smooth_field(noisy: Field, window: int = SMOOTH_WINDOW, polyorder: int = SMOOTH_POLYORDER) -> Field:
    """Savitzky-Golay smoothing along space then time.

    Edge windows fall back to a one-sided polynomial fit of the same order
    (scipy's 'interp' mode), so boundary frames stay usable.
    """
    _check_sg(window, polyorder, min(noisy.grid.n_x, noisy.grid.n_t))
    vals = savgol_filter(noisy.values, window, polyorder, axis=0, mode="interp")
    vals = savgol_filter(vals, window, polyorder, axis=1, mode="interp")
    return noisy.with_values(vals)


def _check_sg(window: int, polyorder: int, extent: int) -> None:
    if window % 2 == 0 or window <= 0:
        raise ConfigError(f"window must be a positive odd integer, got {window}")
    if polyorder >= window:
        raise ConfigError(f"polyorder ({polyorder}) must be below window ({window})")
    if window > extent:
        raise ConfigError(f"window {window} exceeds grid extent {extent}")


def spatial_derivatives(
    field: Field,
    max_order: int = 4,
    window: int = DERIV_WINDOW,
    polyorder: int = DERIV_POLYORDER,
) -> DerivativeStack:
    """Spatial derivatives of orders 1..max_order via Savitzky-Golay filters.

    Periodic grids wrap the filter window around the boundary; otherwise the
    edges use one-sided polynomial fits.
    """
    if max_order != 4:
        raise ConfigError("max_order is fixed at 4 for the 20-term library")
    if polyorder < max_order + 1:
        raise ConfigError(f"polyorder must be >= {max_order + 1} for order-{max_order} derivatives")
    _check_sg(window, polyorder, field.grid.n_x)
    mode = "wrap" if field.grid.periodic else "interp"
    dx = field.grid.dx
    derivs = [
        field.with_values(
            savgol_filter(field.values, window, polyorder, deriv=d, delta=dx, axis=0, mode=mode)
        )
        for d in range(1, max_order + 1)
    ]
    return DerivativeStack(field, *derivs)


def _kalman_matrices(dt: float, ratio: float):
    f_mat = np.array([[1.0, dt], [0.0, 1.0]])
    q_mat = ratio * np.array(
        [[dt**3 / 3.0, dt**2 / 2.0], [dt**2 / 2.0, dt]]
    )
    return f_mat, q_mat


def _kalman_forward(y: np.ndarray, dt: float, ratio: float):
    """Vectorized filter over locations for the local linear-trend model.

    The covariance recursion is data-independent, so P, the innovation
    variance S, and the gain are computed once and shared by all locations.
    Observation noise is fixed at 1; the overall scale is concentrated out
    of the likelihood, and posterior means depend only on the ratio.
    """
    n_loc, n_t = y.shape
    f_mat, q_mat = _kalman_matrices(dt, ratio)

    m = np.empty((n_t, n_loc, 2))
    p_filt = np.empty((n_t, 2, 2))
    p_pred = np.empty((n_t, 2, 2))
    s_all = np.empty(n_t)
    innov = np.empty((n_t, n_loc))

    mean = np.stack([y[:, 0], (y[:, 1] - y[:, 0]) / dt], axis=1)
    p = np.diag([1e6, 1e6]).astype(float)

    for k in range(n_t):
        if k > 0:
            mean = mean @ f_mat.T
            p = f_mat @ p @ f_mat.T + q_mat
        p_pred[k] = p
        s = p[0, 0] + 1.0
        if not np.isfinite(s) or s <= 0:
            raise NumericalError(f"singular innovation covariance at step {k}")
        gain = p[:, 0] / s
        nu = y[:, k] - mean[:, 0]
        mean = mean + nu[:, None] * gain[None, :]
        a_mat = np.eye(2) - np.outer(gain, [1.0, 0.0])
        p = a_mat @ p @ a_mat.T + np.outer(gain, gain)  # Joseph form, R = 1
        m[k] = mean
        p_filt[k] = p
        s_all[k] = s
        innov[k] = nu
    return m, p_filt, p_pred, s_all, innov


def _concentrated_loglik(s_all: np.ndarray, innov: np.ndarray, skip: int = 2) -> float:
    """Innovation log-likelihood with the common noise scale profiled out."""
    s = s_all[skip:]
    nu = innov[skip:]
    count = nu.size
    sse = float(np.sum(nu**2 / s[:, None]))
    if sse <= 0:
        sse = np.finfo(float).tiny
    sigma2 = sse / count
    return -0.5 * (
        count * np.log(2.0 * np.pi * sigma2) + count + nu.shape[1] * float(np.sum(np.log(s)))
    )


def _rts_smooth(m, p_filt, p_pred, dt: float):
    n_t = m.shape[0]
    f_mat = np.array([[1.0, dt], [0.0, 1.0]])
    ms = m.copy()
    for k in range(n_t - 2, -1, -1):
        gain = p_filt[k] @ f_mat.T @ np.linalg.inv(p_pred[k + 1])
        ms[k] = m[k] + (ms[k + 1] - m[k] @ f_mat.T) @ gain.T
    return ms


def kalman_time_derivative(field: Field, ratio_grid=KALMAN_RATIO_GRID) -> Field:
    """Time derivative via a level/velocity state-space smoother per location.

    The process/observation variance ratio is picked once per field from
    ``ratio_grid`` by maximizing the innovation log-likelihood totaled over
    all spatial locations; the returned field is the RTS-smoothed velocity.
    """
    if field.grid.n_t < 8:
        raise ConfigError("need at least 8 time steps for the Kalman derivative")
    y = field.values
    dt = field.grid.dt

    best_ratio = None
    best_ll = -np.inf
    for ratio in ratio_grid:
        _, _, _, s_all, innov = _kalman_forward(y, dt, ratio)
        ll = _concentrated_loglik(s_all, innov)
        if ll > best_ll:
            best_ll = ll
            best_ratio = ratio

    m, p_filt, p_pred, _, _ = _kalman_forward(y, dt, best_ratio)
    ms = _rts_smooth(m, p_filt, p_pred, dt)
    return field.with_values(ms[:, :, 1].T.copy())


def build_library(stack: DerivativeStack, axis: str) -> CandidateLibrary:
    """Assemble per-step design matrices from a derivative stack.

    Columns are ordered lexicographically by (power, derivative order); the
    (0, 0) column is the constant term.  For the temporal axis each step is
    one time index with spatial samples as rows; the spatial axis swaps the
    roles.
    """
    if stack.u_t is None:
        raise ConfigError("derivative stack is missing the time derivative")
    u = stack.u.values
    terms = default_terms()
    cols = np.empty((len(terms), *u.shape))
    powers = {0: np.ones_like(u), 1: u, 2: u * u, 3: u * u * u}
    for j, term in enumerate(terms):
        base = powers[term.power]
        if term.deriv_order == 0:
            cols[j] = base
        else:
            cols[j] = base * stack.spatial(term.deriv_order).values

    if axis == "temporal":
        step_matrices = np.transpose(cols, (2, 1, 0)).copy()  # (n_t, n_x, n_terms)
        targets = stack.u_t.values.T.copy()
    elif axis == "spatial":
        step_matrices = np.transpose(cols, (1, 2, 0)).copy()  # (n_x, n_t, n_terms)
        targets = stack.u_t.values.copy()
    else:
        raise ConfigError(f"axis must be 'temporal' or 'spatial', got {axis!r}")
    return CandidateLibrary(axis, step_matrices, targets, tuple(terms))


def train_validation_split(
    library: CandidateLibrary, fraction: float = 0.8, seed: int = 0
) -> tuple[CandidateLibrary, CandidateLibrary]:
    """Seeded partition of the sample axis, identical across all steps."""
    if not (0.0 < fraction < 1.0):
        raise ConfigError(f"split fraction must lie in (0, 1), got {fraction}")
    n = library.n_samples
    n_train = int(round(fraction * n))
    if n_train < library.n_terms:
        raise ConfigError(
            f"split leaves {n_train} training samples for {library.n_terms} terms"
        )
    if n_train >= n:
        raise ConfigError("split leaves no validation samples")
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    val_idx = np.sort(perm[n_train:])

    def take(idx):
        return replace(
            library,
            step_matrices=library.step_matrices[:, idx, :].copy(),
            targets=library.targets[:, idx].copy(),
            sample_indices=idx,
        )

    return take(train_idx), take(val_idx)
