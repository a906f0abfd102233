"""Circle-of-confusion geometry and focus/bokeh weight maps.

A defocused scene point at depth g spreads over a disk whose radius follows
the thin-lens relation

    r = | f^2 (g_f - g) / (2 F g (g_f - f)) |

with focal length f, F-number F, and focus depth g_f. Substituting the
light-field depth relation g = f*B/d turns this into the disparity form

    r = K * |d_p - d_f|,      K = f / (2 F (B - d_f)),

so a single scalar K (the bokeh intensity) controls the blur radius per pixel
of disparity difference, and the focus plane is picked by the disparity d_f.
The weight map normalizes radii to [0, 1] and pushes them through a sigmoid
to classify each pixel as in-focus (near 0) or bokeh (near 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import DisparityMap


@dataclass(frozen=True)
class OpticsParams:
    """Physical lens/rig description (lengths in consistent units)."""

    focal_length: float
    f_number: float
    baseline: float
    depth_of_focus: float

    def __post_init__(self):
        if self.focal_length <= 0:
            raise ValueError("focal_length must be > 0")
        if self.f_number <= 0:
            raise ValueError("f_number must be > 0")
        if self.baseline <= 0:
            raise ValueError("baseline must be > 0")
        if self.depth_of_focus <= self.focal_length:
            raise ValueError("depth_of_focus must exceed focal_length")


@dataclass(frozen=True)
class RefocusParams:
    """Post-capture focus controls.

    focus_disparity picks the in-focus plane; bokeh_intensity is the CoC
    radius in pixels per pixel of disparity difference (larger = shallower
    depth of field); sigmoid_decay/threshold shape the focus/bokeh split.
    """

    focus_disparity: float
    bokeh_intensity: float
    sigmoid_decay: float = 15.0
    sigmoid_threshold: float = 0.3

    def __post_init__(self):
        if self.bokeh_intensity < 0:
            raise ValueError("bokeh_intensity must be >= 0")
        if self.sigmoid_decay <= 0:
            raise ValueError("sigmoid_decay must be > 0")
        if not 0.0 <= self.sigmoid_threshold <= 1.0:
            raise ValueError("sigmoid_threshold must be in [0, 1]")

    def scaled(self, s: int) -> "RefocusParams":
        """Same focus settings expressed in a grid s times finer (disparity
        values scale by s; the normalized weight map is unchanged)."""
        return RefocusParams(
            focus_disparity=self.focus_disparity * s,
            bokeh_intensity=self.bokeh_intensity,
            sigmoid_decay=self.sigmoid_decay,
            sigmoid_threshold=self.sigmoid_threshold,
        )


@dataclass(frozen=True)
class CocRadiusMap:
    """Per-pixel CoC radius in pixels, with extrema over the map."""

    radii: np.ndarray
    r_min: float = field(init=False)
    r_max: float = field(init=False)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=np.float64)
        if radii.ndim != 2:
            raise ValueError(f"radius map must be 2-D, got shape {radii.shape}")
        if not np.all(np.isfinite(radii)) or np.any(radii < 0):
            raise ValueError("radii must be finite and >= 0")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "r_min", float(radii.min()))
        object.__setattr__(self, "r_max", float(radii.max()))


@dataclass(frozen=True)
class WeightMap:
    """Per-pixel focus/bokeh weight in [0, 1]; 0 = in focus, 1 = bokeh."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError(f"weight map must be 2-D, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0) or np.any(w > 1):
            raise ValueError("weights must lie in [0, 1]")
        object.__setattr__(self, "weights", w)


def coc_radius_thin_lens(optics: OpticsParams, depth):
    """Thin-lens CoC radius at object depth(s) ``depth``.

    Accepts a scalar or array; raises on non-positive depth.
    """
    g = np.asarray(depth, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("depth must be > 0")
    f = optics.focal_length
    r = np.abs(
        f * f * (optics.depth_of_focus - g)
        / (2.0 * optics.f_number * g * (optics.depth_of_focus - f))
    )
    return float(r) if np.isscalar(depth) else r


def bokeh_intensity_from_optics(optics: OpticsParams, focus_disparity: float) -> float:
    """Bokeh intensity K = f / (2 F (B - d_f)) implied by lens parameters.

    Advisory helper: the pipeline takes K directly, since mixing length units
    with pixel disparities needs a calibration this library does not model.
    """
    denom = optics.baseline - focus_disparity
    if denom == 0.0:
        raise ZeroDivisionError("focus disparity equals the baseline (K is singular)")
    return optics.focal_length / (2.0 * optics.f_number * denom)


def coc_radius_map(dmap: DisparityMap, params: RefocusParams) -> CocRadiusMap:
    """radii = K * |d_p - d_f| for every pixel."""
    radii = params.bokeh_intensity * np.abs(dmap.values - params.focus_disparity)
    return CocRadiusMap(radii)


def weight_map(rmap: CocRadiusMap, params: RefocusParams) -> WeightMap:
    """Sigmoid of the min-max-normalized radius map.

    eta = (r - r_min) / (r_max - r_min), w = 1 / (1 + exp(-a (eta - b))).
    A flat radius map (r_max == r_min) normalizes to eta = 0 everywhere, so an
    all-in-focus scene gets a uniform near-zero bokeh weight.
    """
    span = rmap.r_max - rmap.r_min
    if span > 0.0:
        eta = (rmap.radii - rmap.r_min) / span
    else:
        eta = np.zeros_like(rmap.radii)
    a, b = params.sigmoid_decay, params.sigmoid_threshold
    return WeightMap(1.0 / (1.0 + np.exp(-a * (eta - b))))
