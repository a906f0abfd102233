"""Plane-sweep disparity estimation and map upsampling."""

import numpy as np
import pytest
from scipy import ndimage

from lfr import (
    DisparityEstimationParams,
    DisparityMap,
    LightField,
    default_sweep_range,
    grid_offsets,
    plane_sweep_disparity,
    upsample_disparity,
)


def test_recovers_constant_disparity(flat_scene_d2):
    _, _, gt, lf = flat_scene_d2
    params = DisparityEstimationParams(num_hypotheses=17, d_lo=0.0, d_hi=4.0)
    est = plane_sweep_disparity(lf, params)
    err = np.abs(est.values - 2.0)[2:-2, 2:-2]  # 2 px border excluded
    assert (err <= 0.5).mean() >= 0.95


def test_ties_resolve_to_smallest_hypothesis():
    # flat views make every hypothesis cost identical
    views = [np.full((12, 12, 3), 0.5) for _ in range(9)]
    lf = LightField(views=views, offsets=grid_offsets(3, 3), rows=3, cols=3,
                    reference_index=4)
    params = DisparityEstimationParams(num_hypotheses=9, d_lo=1.0, d_hi=3.0)
    est = plane_sweep_disparity(lf, params)
    assert np.array_equal(est.values, np.full((12, 12), 1.0))


def test_two_plane_per_plane_accuracy(two_plane_scene):
    _, _, gt, lf = two_plane_scene
    params = DisparityEstimationParams(num_hypotheses=17, d_lo=0.5, d_hi=1.5)
    est = plane_sweep_disparity(lf, params)
    err = np.abs(est.values - gt.values)

    frame = np.zeros(gt.values.shape, dtype=bool)
    frame[2:-2, 2:-2] = True
    for plane_d in (0.5, 1.5):
        plane = gt.values == plane_d
        interior = ndimage.binary_erosion(plane, iterations=3) & frame
        assert interior.sum() > 0
        assert (err[interior] <= 0.5).mean() >= 0.90


def test_single_view_rejected():
    lf = LightField(views=[np.zeros((4, 4, 3))], offsets=[(0.0, 0.0)],
                    rows=1, cols=1, reference_index=0)
    with pytest.raises(ValueError, match="at least 2 views"):
        plane_sweep_disparity(lf)


def test_default_sweep_range():
    views = [np.zeros((4, 4, 3)) for _ in range(2)]
    base = dict(offsets=[(-1.0, 0.0), (0.0, 0.0)], rows=1, cols=2,
                reference_index=1)
    assert default_sweep_range(
        LightField(views=views, disparity_range=(0.5, 1.5), **base)) == (0.5, 1.5)
    assert default_sweep_range(
        LightField(views=views, disparity_range=(2.0, 2.0), **base)) == (1.5, 2.5)
    assert default_sweep_range(
        LightField(views=views, **base)) == (0.0, 4.0)


def test_estimation_params_validation():
    with pytest.raises(ValueError):
        DisparityEstimationParams(num_hypotheses=1)
    with pytest.raises(ValueError):
        DisparityEstimationParams(d_lo=2.0, d_hi=1.0)
    with pytest.raises(ValueError):
        DisparityEstimationParams(window=4)
    with pytest.raises(ValueError):
        DisparityEstimationParams(cost="census")
    with pytest.raises(ValueError):
        DisparityEstimationParams(smoothing=2)


# ---------------------------------------------------------------------------
# Upsampling
# ---------------------------------------------------------------------------

def test_upsample_identity():
    d = DisparityMap(np.array([[1.0, 2.0], [3.0, 4.0]]))
    up = upsample_disparity(d, 1)
    assert np.array_equal(up.values, d.values)
    assert up.values is not d.values


def test_upsample_scales_values():
    d = DisparityMap(np.full((2, 2), 1.5))
    up = upsample_disparity(d, 2)
    assert up.values.shape == (4, 4)
    assert np.array_equal(up.values, np.full((4, 4), 3.0))


def test_upsample_two_plane_interiors(two_plane_scene):
    _, _, gt, lf = two_plane_scene
    up = upsample_disparity(gt, 2)
    assert up.values.shape == (gt.height * 2, gt.width * 2)
    # plane interiors carry exactly twice the LR value
    assert up.values[0, 0] == 1.0  # backdrop: 2 * 0.5
    assert up.values[32, 32] == 3.0  # plate: 2 * 1.5
    assert set(np.unique(up.values)) == {1.0, 3.0}


def test_upsample_rejects_bad_factor():
    with pytest.raises(ValueError):
        upsample_disparity(DisparityMap(np.zeros((2, 2))), 0)
