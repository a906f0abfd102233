"""Plane-sweep disparity estimation for the reference view.

Each candidate disparity d back-warps every non-reference view toward the
reference (sampling view k at p - offset_k * d, which undoes a scene at
constant disparity d). Matching costs are averaged over views, box-aggregated
over a window, and the per-pixel argmin hypothesis wins, ties going to the
smaller disparity. A median filter cleans isolated outliers.

This stands in for external disparity estimators; a precomputed map can
always be loaded through the dataset module instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .dataset import DisparityMap, LightField
from .operators import warp_forward


@dataclass(frozen=True)
class DisparityEstimationParams:
    """Sweep configuration.

    num_hypotheses candidates span [d_lo, d_hi] inclusive. cost is "tad"
    (absolute difference truncated at tau) or "abs". window is the odd box
    aggregation side; smoothing the odd median window (0 disables).
    """

    num_hypotheses: int = 17
    d_lo: float = 0.0
    d_hi: float = 4.0
    window: int = 7
    cost: str = "tad"
    tau: float = 0.1
    smoothing: int = 3

    def __post_init__(self):
        if self.num_hypotheses < 2:
            raise ValueError("num_hypotheses must be >= 2")
        if not self.d_lo < self.d_hi:
            raise ValueError("require d_lo < d_hi")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("window must be odd and >= 1")
        if self.cost not in ("tad", "abs"):
            raise ValueError('cost must be "tad" or "abs"')
        if self.cost == "tad" and self.tau <= 0:
            raise ValueError("tau must be > 0 for the truncated cost")
        if self.smoothing < 0 or (self.smoothing > 0 and self.smoothing % 2 == 0):
            raise ValueError("smoothing must be 0 (off) or an odd window")


def default_sweep_range(lf: LightField, pad: float = 0.5) -> tuple:
    """Sweep range from dataset metadata: the declared disparity_range,
    padded when degenerate; [0, 4] when absent."""
    if lf.disparity_range is None:
        return (0.0, 4.0)
    lo, hi = lf.disparity_range
    if hi - lo < 1e-9:
        return (lo - pad, hi + pad)
    return (float(lo), float(hi))


def plane_sweep_disparity(lf: LightField,
                          params: DisparityEstimationParams = DisparityEstimationParams()
                          ) -> DisparityMap:
    """Estimate reference-view disparity by plane sweep.

    Raises ValueError for a single-view field (nothing to match against).
    """
    if lf.n_views < 2:
        raise ValueError(
            "disparity estimation needs at least 2 views; "
            "use load_disparity to supply an external map")

    ref = lf.reference
    h, w = ref.shape[:2]
    hypotheses = np.linspace(params.d_lo, params.d_hi, params.num_hypotheses)
    others = [k for k in range(lf.n_views) if k != lf.reference_index]

    costs = np.empty((params.num_hypotheses, h, w))
    for i, d in enumerate(hypotheses):
        dmap = np.full((h, w), d)
        total = np.zeros((h, w))
        for k in others:
            u, v = lf.offsets[k]
            warped = warp_forward(lf.views[k], dmap, (-u, -v))
            diff = np.abs(warped - ref).mean(axis=2)
            if params.cost == "tad":
                diff = np.minimum(diff, params.tau)
            total += diff
        costs[i] = total / len(others)

    if params.window > 1:
        costs = ndimage.uniform_filter(
            costs, size=(1, params.window, params.window), mode="nearest")

    # np.argmin returns the first minimum: ties resolve to the smaller d
    values = hypotheses[np.argmin(costs, axis=0)]
    if params.smoothing > 0:
        values = ndimage.median_filter(values, size=params.smoothing, mode="nearest")
    return DisparityMap(values)


def upsample_disparity(dmap: DisparityMap, s: int) -> DisparityMap:
    """Nearest-neighbor upsample by s with values scaled by s, so pixel
    shifts stay consistent in the finer frame."""
    if s < 1:
        raise ValueError("upsample factor must be >= 1")
    if s == 1:
        return DisparityMap(dmap.values.copy())
    values = np.repeat(np.repeat(dmap.values, s, axis=0), s, axis=1) * float(s)
    return DisparityMap(values)
