"""Regularized multi-frame super-resolution of the focused region.

The reconstruction x minimizes

    sum_k || (1 - w_k) . (y_k - D H F_k x) ||^2
        + lambda_b  || w_b . (x - x_b) ||^2
        + lambda_btv * J_btv(x)

where D is stride decimation, H a Gaussian blur, F_k the disparity warp to
view k, w_b the HR bokeh weight map and w_k its per-view LR counterpart. The
data term only pulls on focused pixels (w near 0); bokeh pixels are anchored
to the rendered bokeh image x_b. J_btv is a bilateral total variation prior
over a (2P+1)^2 shift neighborhood with an epsilon-smoothed absolute value,
which keeps the objective differentiable everywhere.

BTV shifts are circular so the shift transpose is exactly the opposite
shift, making the analytic gradient the true derivative of the objective
(finite differences agree to first order even across image borders).

Descent runs a fixed step with per-step clamping to [0, 1]; optional
backtracking halves the step while it would increase the objective and skips
the iteration when eight halvings are not enough, so the trace never rises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import LightField, DisparityMap
from .operators import (
    decimate,
    decimate_adjoint,
    gaussian_blur,
    gaussian_blur_adjoint,
    warp_adjoint,
    warp_forward,
    warp_nearest,
)


@dataclass(frozen=True)
class DegradationSpec:
    """The forward model y_k = D H F_k x.

    blur_sigma None means the anti-alias default 0.5 * sr_factor; the kernel
    spans ceil(2 sigma) taps each side and is normalized to sum 1.
    view_offsets None means "use the light field's own offsets".
    """

    sr_factor: int
    blur_sigma: float | None = None
    view_offsets: tuple | None = None

    def __post_init__(self):
        if self.sr_factor < 1:
            raise ValueError("sr_factor must be >= 1")
        if self.blur_sigma is not None and self.blur_sigma < 0:
            raise ValueError("blur_sigma must be >= 0")
        if self.view_offsets is not None:
            object.__setattr__(self, "view_offsets", tuple(map(tuple, self.view_offsets)))

    @property
    def effective_blur_sigma(self) -> float:
        return 0.5 * self.sr_factor if self.blur_sigma is None else self.blur_sigma

    @property
    def kernel_radius(self) -> int:
        sigma = self.effective_blur_sigma
        return int(math.ceil(2.0 * sigma)) if sigma > 0 else 0

    def offsets_for(self, lf: LightField) -> tuple:
        return self.view_offsets if self.view_offsets is not None else tuple(lf.offsets)


@dataclass(frozen=True)
class SolverParams:
    """Gradient-descent settings; defaults follow the reference parameter set
    (lambda_b 5, lambda_btv 0.2, step 0.1, 10 iterations, BTV P=2 alpha=0.6)."""

    lambda_b: float = 5.0
    lambda_btv: float = 0.2
    step_size: float = 0.1
    noi: int = 10
    btv_window: int = 2
    btv_alpha: float = 0.6
    sign_epsilon: float = 1e-3
    backtracking: bool = False

    def __post_init__(self):
        if self.lambda_b < 0 or self.lambda_btv < 0:
            raise ValueError("regularizer weights must be >= 0")
        if self.step_size <= 0:
            raise ValueError("step_size must be > 0")
        if self.noi < 1:
            raise ValueError("noi must be >= 1")
        if self.btv_window < 1:
            raise ValueError("btv_window must be >= 1")
        if not 0.0 < self.btv_alpha < 1.0:
            raise ValueError("btv_alpha must be in (0, 1)")
        if self.sign_epsilon <= 0:
            raise ValueError("sign_epsilon must be > 0")


# ---------------------------------------------------------------------------
# Degradation chain per view
# ---------------------------------------------------------------------------

def degrade_view(x: np.ndarray, dmap_hr: DisparityMap, offset,
                 spec: DegradationSpec) -> np.ndarray:
    """D H F_k x for one view."""
    warped = warp_forward(x, dmap_hr.values, offset)
    blurred = gaussian_blur(warped, spec.effective_blur_sigma)
    return decimate(blurred, spec.sr_factor)


def degrade_view_adjoint(r: np.ndarray, dmap_hr: DisparityMap, offset,
                         spec: DegradationSpec) -> np.ndarray:
    """F_k^T H^T D^T r, the exact transpose of degrade_view."""
    up = decimate_adjoint(r, spec.sr_factor)
    blurred = gaussian_blur_adjoint(up, spec.effective_blur_sigma)
    return warp_adjoint(blurred, dmap_hr.values, offset)


def lr_focus_masks(omega_hr: np.ndarray, dmap_hr: DisparityMap, offsets,
                   s: int) -> list:
    """Per-view LR bokeh weights: the HR map warped into each view with
    nearest-neighbor sampling (stays in [0,1]) and decimated."""
    masks = []
    for u, v in offsets:
        warped = warp_nearest(omega_hr, dmap_hr.values, (u, v))
        masks.append(decimate(warped, s))
    return masks


# ---------------------------------------------------------------------------
# Bilateral total variation
# ---------------------------------------------------------------------------

def _shift(x: np.ndarray, l: int, m: int) -> np.ndarray:
    # circular: transpose of (l, m) is exactly (-l, -m)
    return np.roll(x, shift=(m, l), axis=(0, 1))


def btv_value(x: np.ndarray, window: int, alpha: float, eps: float) -> float:
    total = 0.0
    for m in range(-window, window + 1):
        for l in range(-window, window + 1):
            if l == 0 and m == 0:
                continue
            t = x - _shift(x, l, m)
            total += alpha ** (abs(l) + abs(m)) * np.sqrt(t * t + eps * eps).sum()
    return float(total)


def btv_gradient(x: np.ndarray, window: int, alpha: float, eps: float) -> np.ndarray:
    grad = np.zeros_like(x)
    for m in range(-window, window + 1):
        for l in range(-window, window + 1):
            if l == 0 and m == 0:
                continue
            t = x - _shift(x, l, m)
            sgn = t / np.sqrt(t * t + eps * eps)
            grad += alpha ** (abs(l) + abs(m)) * (sgn - _shift(sgn, -l, -m))
    return grad


# ---------------------------------------------------------------------------
# Objective and gradient
# ---------------------------------------------------------------------------

def _check_problem(lf, dmap_hr, x_b, omega_hr, spec):
    h, w = x_b.shape[:2]
    s = spec.sr_factor
    if x_b.ndim != 3:
        raise ValueError("x_b must be (H, W, C)")
    if dmap_hr.values.shape != (h, w):
        raise ValueError("dmap_hr must match x_b resolution")
    if omega_hr.shape != (h, w):
        raise ValueError("weight map must match x_b resolution")
    if h % s or w % s:
        raise ValueError("x_b dimensions must be divisible by sr_factor")
    if lf.height != h // s or lf.width != w // s or lf.channels != x_b.shape[2]:
        raise ValueError("light field views do not match x_b / sr_factor")


def objective(x: np.ndarray, lf: LightField, dmap_hr: DisparityMap,
              x_b: np.ndarray, omega_hr: np.ndarray, spec: DegradationSpec,
              params: SolverParams, lr_masks: list | None = None) -> float:
    """Value of the full objective at x."""
    _check_problem(lf, dmap_hr, x_b, omega_hr, spec)
    offsets = spec.offsets_for(lf)
    if lr_masks is None:
        lr_masks = lr_focus_masks(omega_hr, dmap_hr, offsets, spec.sr_factor)

    data = 0.0
    for k in range(lf.n_views):
        resid = lf.views[k] - degrade_view(x, dmap_hr, offsets[k], spec)
        weighted = (1.0 - lr_masks[k])[:, :, None] * resid
        data += float((weighted * weighted).sum())

    diff = omega_hr[:, :, None] * (x - x_b)
    bokeh = float((diff * diff).sum())

    total = data + params.lambda_b * bokeh
    if params.lambda_btv > 0:
        total += params.lambda_btv * btv_value(
            x, params.btv_window, params.btv_alpha, params.sign_epsilon)
    return total


def gradient(x: np.ndarray, lf: LightField, dmap_hr: DisparityMap,
             x_b: np.ndarray, omega_hr: np.ndarray, spec: DegradationSpec,
             params: SolverParams, lr_masks: list | None = None) -> np.ndarray:
    """Analytic gradient of the objective at x."""
    _check_problem(lf, dmap_hr, x_b, omega_hr, spec)
    offsets = spec.offsets_for(lf)
    if lr_masks is None:
        lr_masks = lr_focus_masks(omega_hr, dmap_hr, offsets, spec.sr_factor)

    grad = np.zeros_like(x)
    for k in range(lf.n_views):
        resid = degrade_view(x, dmap_hr, offsets[k], spec) - lf.views[k]
        w2 = ((1.0 - lr_masks[k]) ** 2)[:, :, None]
        grad += 2.0 * degrade_view_adjoint(w2 * resid, dmap_hr, offsets[k], spec)

    grad += 2.0 * params.lambda_b * (omega_hr ** 2)[:, :, None] * (x - x_b)
    if params.lambda_btv > 0:
        grad += params.lambda_btv * btv_gradient(
            x, params.btv_window, params.btv_alpha, params.sign_epsilon)
    return grad


# ---------------------------------------------------------------------------
# Descent loop
# ---------------------------------------------------------------------------

def super_resolve(lf: LightField, dmap_hr: DisparityMap, x_b: np.ndarray,
                  omega_hr: np.ndarray, spec: DegradationSpec,
                  params: SolverParams, on_iteration=None):
    """Gradient descent from x0 = x_b with per-step clamping to [0, 1].

    Returns (x, trace); trace has noi + 1 objective values, the first at x0.
    on_iteration(completed, objective_value) fires after each iteration.
    """
    _check_problem(lf, dmap_hr, x_b, omega_hr, spec)
    offsets = spec.offsets_for(lf)
    lr_masks = lr_focus_masks(omega_hr, dmap_hr, offsets, spec.sr_factor)

    def f(z):
        return objective(z, lf, dmap_hr, x_b, omega_hr, spec, params, lr_masks)

    x = np.clip(x_b, 0.0, 1.0)
    trace = [f(x)]
    for t in range(1, params.noi + 1):
        g = gradient(x, lf, dmap_hr, x_b, omega_hr, spec, params, lr_masks)
        if params.backtracking:
            beta = params.step_size
            accepted = False
            for _ in range(9):  # initial step plus 8 halvings
                cand = np.clip(x - beta * g, 0.0, 1.0)
                val = f(cand)
                if val <= trace[-1]:
                    x, accepted = cand, True
                    break
                beta *= 0.5
            trace.append(val if accepted else trace[-1])
        else:
            x = np.clip(x - params.step_size * g, 0.0, 1.0)
            trace.append(f(x))
        if on_iteration is not None:
            on_iteration(t, trace[-1])
    return x, trace
