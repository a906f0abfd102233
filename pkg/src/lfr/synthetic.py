"""Synthetic light-field scenes built with the exact degradation model.

A scene is a stack of fronto-parallel textured planes, each at a constant
disparity. Every view is produced by the same operator chain the solver
inverts: per-layer warp by (view offset) * (SR factor) * (disparity), z-order
compositing, Gaussian blur, stride decimation, additive Gaussian noise. The
generator therefore doubles as the ground-truth oracle for reconstruction
and disparity tests.

Larger disparity means closer to the camera; layers are composited
back-to-front after a stable sort on disparity. Pixels covered by no layer
render as mid gray at the backmost disparity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DisparityMap, LightField, grid_offsets
from .operators import decimate, gaussian_blur, translate

TEXTURES = ("checker", "noise", "bands", "mix")


@dataclass(frozen=True)
class SceneLayer:
    """A textured fronto-parallel plane at constant disparity.

    ``region`` is an optional (x0, y0, x1, y1) half-open pixel rectangle in
    the HR frame; None covers the whole canvas. ``texture_scale`` multiplies
    the spatial frequency of the pattern (1.0 = coarse default; larger means
    finer detail, the regime where super-resolution matters).
    """

    texture: str
    disparity: float
    region: tuple | None = None
    texture_scale: float = 1.0

    def __post_init__(self):
        if self.texture not in TEXTURES:
            raise ValueError(
                f"unknown texture {self.texture!r}, expected one of {TEXTURES}")
        if not np.isfinite(self.disparity):
            raise ValueError("layer disparity must be finite")
        if self.region is not None:
            x0, y0, x1, y1 = self.region
            if not (x0 < x1 and y0 < y1):
                raise ValueError(f"empty layer region {self.region}")
        if not self.texture_scale > 0:
            raise ValueError("texture_scale must be > 0")


@dataclass(frozen=True)
class SyntheticSceneSpec:
    """Scene description for synthesize_light_field.

    hr_size is the square HR canvas side and must be divisible by sr_factor.
    Layer disparities are in LR pixels per unit baseline offset. blur_sigma
    None means the solver default 0.5 * sr_factor.
    """

    hr_size: int
    rows: int
    cols: int
    sr_factor: int
    layers: tuple
    noise_sigma: float = 0.0
    seed: int = 0
    channels: int = 3
    offset_step: float = 1.0
    blur_sigma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.sr_factor < 1:
            raise ValueError("sr_factor must be >= 1")
        if self.hr_size < self.sr_factor or self.hr_size % self.sr_factor:
            raise ValueError("hr_size must be a positive multiple of sr_factor")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be >= 1")
        if not self.layers:
            raise ValueError("at least one layer is required")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if self.offset_step <= 0:
            raise ValueError("offset_step must be > 0")
        if self.blur_sigma is not None and self.blur_sigma < 0:
            raise ValueError("blur_sigma must be >= 0")

    @property
    def effective_blur_sigma(self) -> float:
        return 0.5 * self.sr_factor if self.blur_sigma is None else self.blur_sigma


def _tex_checker(size: int, channels: int, rng: np.random.Generator,
                 scale: float = 1.0) -> np.ndarray:
    cell = max(2, int(round(size / (8.0 * scale))))
    lo = rng.uniform(0.05, 0.35, size=channels)
    hi = rng.uniform(0.65, 0.95, size=channels)
    ys, xs = np.mgrid[0:size, 0:size]
    parity = ((ys // cell + xs // cell) % 2).astype(np.float64)[:, :, None]
    return lo + parity * (hi - lo)


def _tex_noise(size: int, channels: int, rng: np.random.Generator,
               scale: float = 1.0) -> np.ndarray:
    raw = rng.random((size, size, channels))
    smooth = gaussian_blur(raw, 1.5 / scale)
    lo, hi = smooth.min(), smooth.max()
    if hi - lo < 1e-12:
        return np.full_like(smooth, 0.5)
    return 0.1 + 0.8 * (smooth - lo) / (hi - lo)


def _tex_bands(size: int, channels: int, rng: np.random.Generator,
               scale: float = 1.0) -> np.ndarray:
    theta = rng.uniform(0.0, np.pi)
    freq = 4.0 * scale
    phases = rng.uniform(0.0, 2.0 * np.pi, size=channels)
    ys, xs = np.mgrid[0:size, 0:size]
    axis = (xs * np.cos(theta) + ys * np.sin(theta)) / size
    waves = np.sin(2.0 * np.pi * freq * axis[:, :, None] + phases)
    return 0.5 + 0.4 * waves


def _tex_mix(size: int, channels: int, rng: np.random.Generator,
             scale: float = 1.0) -> np.ndarray:
    # checker gives strong edges for matching, noise breaks the flat interiors
    return (0.5 * _tex_checker(size, channels, rng, scale)
            + 0.5 * _tex_noise(size, channels, rng, scale))


_TEX_FN = {"checker": _tex_checker, "noise": _tex_noise,
           "bands": _tex_bands, "mix": _tex_mix}


def _layer_mask(layer: SceneLayer, size: int) -> np.ndarray:
    if layer.region is None:
        return np.ones((size, size))
    x0, y0, x1, y1 = layer.region
    mask = np.zeros((size, size))
    mask[max(0, int(y0)):min(size, int(y1)), max(0, int(x0)):min(size, int(x1))] = 1.0
    return mask


def synthesize_light_field(spec: SyntheticSceneSpec):
    """Render a scene and degrade it into a light field.

    Returns (hr_reference, gt_disparity, lf): the clean HR composite, the
    ground-truth disparity at LR resolution in LR pixel units, and the
    LightField of noisy LR views (disparity_range set from the layers).
    """
    rng = np.random.default_rng(spec.seed)
    size, s = spec.hr_size, spec.sr_factor

    # textures drawn in listed order so the seed stream ignores z-sorting
    textures = [
        _TEX_FN[layer.texture](size, spec.channels, rng, layer.texture_scale)
        for layer in spec.layers
    ]
    masks = [_layer_mask(layer, size) for layer in spec.layers]
    z_order = sorted(range(len(spec.layers)), key=lambda i: spec.layers[i].disparity)

    back_d = spec.layers[z_order[0]].disparity
    hr_ref = np.full((size, size, spec.channels), 0.5)
    d_hr = np.full((size, size), float(back_d))
    for i in z_order:
        m = masks[i][:, :, None]
        hr_ref = m * textures[i] + (1.0 - m) * hr_ref
        d_hr = np.where(masks[i] > 0.5, spec.layers[i].disparity, d_hr)

    offsets = grid_offsets(spec.rows, spec.cols, spec.offset_step)
    sigma = spec.effective_blur_sigma
    views = []
    for u, v in offsets:
        canvas = np.full((size, size, spec.channels), 0.5)
        for i in z_order:
            d = spec.layers[i].disparity
            dx, dy = u * s * d, v * s * d
            tex_w = translate(textures[i], dx, dy)
            mask_w = translate(masks[i], dx, dy)[:, :, None]
            canvas = mask_w * tex_w + (1.0 - mask_w) * canvas
        view = decimate(gaussian_blur(canvas, sigma), s)
        if spec.noise_sigma > 0:
            view = view + rng.normal(0.0, spec.noise_sigma, size=view.shape)
        views.append(np.clip(view, 0.0, 1.0))

    d_values = [layer.disparity for layer in spec.layers]
    lf = LightField(
        views=views,
        offsets=offsets,
        rows=spec.rows,
        cols=spec.cols,
        reference_index=(spec.rows // 2) * spec.cols + (spec.cols // 2),
        disparity_range=(float(min(d_values)), float(max(d_values))),
    )
    gt = DisparityMap(decimate(d_hr, s))
    return hr_ref, gt, lf
