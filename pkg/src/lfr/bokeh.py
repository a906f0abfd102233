"""Depth-based anisotropic bokeh filter.

Gather formulation: the output intensity at pixel Q combines every neighbor P
whose circle of confusion covers Q, i.e. whose distance phi(P, Q) does not
exceed P's own CoC radius. Each covering neighbor contributes with weight
1/(pi r_P^2), the uniform density of its CoC disk. The gather window is the
global maximum radius of the map; neighbors outside it can never contribute,
so tighter windows are a pure optimization.

Radii are floored at a small positive value (the weight diverges as r -> 0),
which makes fully in-focus pixels reduce to a singleton gather set and the
filter to an identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import ensure_image
from .operators import bicubic_upsample
from .optics import CocRadiusMap


@dataclass(frozen=True)
class BokehRenderConfig:
    """Rendering knobs: minimum effective CoC radius, per-pixel weight
    renormalization (preserves brightness), and the SR upsample factor."""

    radius_floor: float = 0.5
    normalize: bool = True
    upsample_factor: int = 1

    def __post_init__(self):
        if self.radius_floor <= 0:
            raise ValueError("radius_floor must be > 0")
        if self.upsample_factor < 1:
            raise ValueError("upsample_factor must be >= 1")


def render_bokeh(reference: np.ndarray, rmap: CocRadiusMap,
                 cfg: BokehRenderConfig = BokehRenderConfig()) -> np.ndarray:
    """Apply the gathering bokeh filter to the reference view.

    For each output pixel Q: I_Q = sum_P w_P I_P over neighbors P with
    phi(P,Q) <= r_P, w_P = 1/(pi r_P^2), divided by sum_P w_P when
    ``cfg.normalize`` is on. Radii are floored at ``cfg.radius_floor``.
    Border gather sets are truncated to the image and renormalized.
    """
    img = ensure_image(reference, "reference")
    h, w = img.shape[:2]
    if rmap.radii.shape != (h, w):
        raise ValueError(
            f"radius map shape {rmap.radii.shape} does not match image {(h, w)}")

    r_eff = np.maximum(rmap.radii, cfg.radius_floor)
    base_w = 1.0 / (math.pi * r_eff * r_eff)
    r_max = float(r_eff.max())
    extent = int(math.floor(r_max))

    num = np.zeros_like(img)
    den = np.zeros((h, w), dtype=np.float64)
    # Fixed scan order over the window keeps summation deterministic.
    for dy in range(-extent, extent + 1):
        for dx in range(-extent, extent + 1):
            phi2 = dy * dy + dx * dx
            if phi2 > r_max * r_max:
                continue
            # neighbor P = Q + (dy, dx); truncate at the borders
            q_r = slice(max(0, -dy), h - max(0, dy))
            q_c = slice(max(0, -dx), w - max(0, dx))
            p_r = slice(max(0, dy), h - max(0, -dy))
            p_c = slice(max(0, dx), w - max(0, -dx))
            contrib = np.where(phi2 <= r_eff[p_r, p_c] ** 2,
                               base_w[p_r, p_c], 0.0)
            num[q_r, q_c] += contrib[:, :, None] * img[p_r, p_c]
            den[q_r, q_c] += contrib

    if not cfg.normalize:
        return num
    # den > 0 always: every pixel gathers itself at offset (0, 0)
    return num / den[:, :, None]


def upsample_bokeh(rendered: np.ndarray, s: int) -> np.ndarray:
    """Bicubic (Catmull-Rom) upsample of the rendered view to (s*H, s*W),
    clamped to [0, 1]. s=1 is the identity."""
    if s < 1:
        raise ValueError("upsample factor must be >= 1")
    img = ensure_image(rendered, "rendered")
    if s == 1:
        return np.clip(img, 0.0, 1.0)
    return np.clip(bicubic_upsample(img, s), 0.0, 1.0)
