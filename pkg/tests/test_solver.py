"""SR objective, analytic gradient, and the descent loop.

The finite-difference oracle evaluates the objective directly, so it is
independent of every adjoint used by the analytic gradient.
"""

import numpy as np
import pytest

from lfr import (
    DegradationSpec,
    DisparityMap,
    LightField,
    SolverParams,
    btv_gradient,
    btv_value,
    degrade_view,
    degrade_view_adjoint,
    gradient,
    lr_focus_masks,
    objective,
    super_resolve,
    upsample_disparity,
)


def _consistent_problem(seed=0, size=12, s=2):
    """Views produced by the exact forward model from a known HR image."""
    rng = np.random.default_rng(seed)
    x_true = rng.random((size, size, 3))
    d_hr = DisparityMap(rng.uniform(0.0, 2.0, (size, size)))
    spec = DegradationSpec(sr_factor=s)
    offsets = [(-1.0, 0.0), (0.0, 0.0)]
    views = [degrade_view(x_true, d_hr, o, spec) for o in offsets]
    lf = LightField(views=views, offsets=offsets, rows=1, cols=2,
                    reference_index=1)
    return x_true, d_hr, spec, lf


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((12, 12, 3))
    x_b = rng.random((12, 12, 3))
    omega = rng.random((12, 12))
    d_hr = DisparityMap(rng.uniform(0.0, 2.0, (12, 12)))
    views = [rng.random((6, 6, 3)) for _ in range(2)]
    lf = LightField(views=views, offsets=[(-1.0, 0.0), (0.0, 0.0)],
                    rows=1, cols=2, reference_index=1)
    return rng, x, x_b, omega, d_hr, lf


# ---------------------------------------------------------------------------
# Degradation spec
# ---------------------------------------------------------------------------

def test_degradation_spec_defaults():
    spec = DegradationSpec(sr_factor=2)
    assert spec.effective_blur_sigma == 1.0
    assert spec.kernel_radius == 2
    assert DegradationSpec(sr_factor=1).effective_blur_sigma == 0.5
    assert DegradationSpec(sr_factor=2, blur_sigma=0.0).kernel_radius == 0


def test_degradation_spec_validation():
    with pytest.raises(ValueError):
        DegradationSpec(sr_factor=0)
    with pytest.raises(ValueError):
        DegradationSpec(sr_factor=2, blur_sigma=-1.0)


def test_degrade_view_shapes_and_adjoint():
    x_true, d_hr, spec, lf = _consistent_problem()
    rng = np.random.default_rng(1)
    x = rng.random((12, 12, 3))
    y = rng.random((6, 6, 3))
    fx = degrade_view(x, d_hr, (-1.0, 0.0), spec)
    assert fx.shape == (6, 6, 3)
    lhs = float((fx * y).sum())
    rhs = float((x * degrade_view_adjoint(y, d_hr, (-1.0, 0.0), spec)).sum())
    assert abs(lhs - rhs) / max(abs(lhs), abs(rhs)) < 1e-12


def test_lr_focus_masks():
    _, d_hr, spec, lf = _consistent_problem()
    omega = np.zeros((12, 12))
    omega[4:8, 4:8] = 1.0
    masks = lr_focus_masks(omega, d_hr, lf.offsets, 2)
    assert len(masks) == 2
    for m in masks:
        assert m.shape == (6, 6)
        assert set(np.unique(m)) <= {0.0, 1.0}  # nearest warp keeps binarity


# ---------------------------------------------------------------------------
# BTV
# ---------------------------------------------------------------------------

def _btv_coeff_sum(window, alpha):
    total = 0.0
    for m in range(-window, window + 1):
        for l in range(-window, window + 1):
            if (l, m) != (0, 0):
                total += alpha ** (abs(l) + abs(m))
    return total


def test_btv_constant_image_value():
    # every shifted difference is 0, smoothed |0| = eps per pixel and term
    x = np.full((8, 8, 3), 0.42)
    eps, alpha, window = 1e-3, 0.6, 2
    want = x.size * eps * _btv_coeff_sum(window, alpha)
    assert btv_value(x, window, alpha, eps) == pytest.approx(want, rel=1e-12)


def test_btv_gradient_zero_on_constants():
    x = np.full((6, 6, 1), 0.7)
    g = btv_gradient(x, 2, 0.6, 1e-3)
    assert np.abs(g).max() < 1e-15


def test_btv_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    x = rng.random((7, 7, 1))
    g = btv_gradient(x, 2, 0.6, 1e-3)
    h = 1e-6
    for (i, j) in [(0, 0), (3, 3), (6, 2), (2, 6)]:
        xp = x.copy(); xp[i, j, 0] += h
        xm = x.copy(); xm[i, j, 0] -= h
        fd = (btv_value(xp, 2, 0.6, 1e-3) - btv_value(xm, 2, 0.6, 1e-3)) / (2 * h)
        assert g[i, j, 0] == pytest.approx(fd, rel=1e-5)


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------

def test_objective_zero_at_exact_fit():
    x_true, d_hr, spec, lf = _consistent_problem()
    params = SolverParams(lambda_btv=0.0)
    omega = np.random.default_rng(3).random((12, 12))
    assert objective(x_true, lf, d_hr, x_true, omega, spec, params) == 0.0


def test_objective_reduces_to_least_squares():
    # single view, identity operators, omega 0, no regularizers
    rng = np.random.default_rng(4)
    x = rng.random((6, 6, 3))
    y = rng.random((6, 6, 3))
    lf = LightField(views=[y], offsets=[(0.0, 0.0)], rows=1, cols=1,
                    reference_index=0)
    d_hr = DisparityMap(np.zeros((6, 6)))
    spec = DegradationSpec(sr_factor=1, blur_sigma=0.0)
    params = SolverParams(lambda_b=0.0, lambda_btv=0.0)
    want = float(((y - x) ** 2).sum())
    got = objective(x, lf, d_hr, x, np.zeros((6, 6)), spec, params)
    assert got == pytest.approx(want, rel=1e-15)


def test_objective_shape_validation():
    x_true, d_hr, spec, lf = _consistent_problem()
    params = SolverParams()
    with pytest.raises(ValueError):
        objective(x_true, lf, d_hr, x_true, np.zeros((5, 5)), spec, params)
    with pytest.raises(ValueError):
        objective(x_true[:10], lf, d_hr, x_true[:10], np.zeros((10, 12)),
                  spec, params)


# ---------------------------------------------------------------------------
# Gradient
# ---------------------------------------------------------------------------

def test_gradient_zero_at_consistent_minimum():
    x_true, d_hr, spec, lf = _consistent_problem()
    params = SolverParams(lambda_btv=0.0)
    omega = np.random.default_rng(5).random((12, 12))
    g = gradient(x_true, lf, d_hr, x_true, omega, spec, params)
    assert np.abs(g).max() < 1e-10


def test_gradient_bokeh_anchor_closed_form():
    # omega 1 everywhere kills the data term: only the anchor remains
    _, x, x_b, _, d_hr, lf = _random_instance(6)
    omega = np.ones((12, 12))
    spec = DegradationSpec(sr_factor=2)
    params = SolverParams(lambda_b=5.0, lambda_btv=0.0)
    g = gradient(x, lf, d_hr, x_b, omega, spec, params)
    assert np.allclose(g, 2.0 * 5.0 * (x - x_b), atol=1e-12)


def test_gradient_matches_finite_differences():
    rng, x, x_b, omega, d_hr, lf = _random_instance(0)
    spec = DegradationSpec(sr_factor=2)
    params = SolverParams()
    g = gradient(x, lf, d_hr, x_b, omega, spec, params)
    h = 1e-4
    worst = 0.0
    for _ in range(50):
        i, j, c = rng.integers(0, 12), rng.integers(0, 12), rng.integers(0, 3)
        xp = x.copy(); xp[i, j, c] += h
        xm = x.copy(); xm[i, j, c] -= h
        fd = (objective(xp, lf, d_hr, x_b, omega, spec, params)
              - objective(xm, lf, d_hr, x_b, omega, spec, params)) / (2 * h)
        rel = abs(g[i, j, c] - fd) / max(abs(g[i, j, c]), abs(fd))
        worst = max(worst, rel)
    assert worst < 1e-4


# ---------------------------------------------------------------------------
# Descent loop
# ---------------------------------------------------------------------------

def test_super_resolve_fixed_point():
    # all-bokeh scene: data weights vanish and x_b anchors exactly
    _, x, x_b, _, d_hr, lf = _random_instance(7)
    omega = np.ones((12, 12))
    spec = DegradationSpec(sr_factor=2)
    params = SolverParams(lambda_btv=0.0, noi=3)
    out, trace = super_resolve(lf, d_hr, np.clip(x_b, 0, 1), omega, spec, params)
    assert np.array_equal(out, np.clip(x_b, 0, 1))
    assert len(trace) == 4
    assert trace[0] == trace[-1]


def test_super_resolve_trace_and_callback(two_plane_scene):
    _, hr_ref, gt, lf = two_plane_scene
    d_hr = upsample_disparity(gt, 2)
    x_b = np.clip(hr_ref, 0, 1)
    omega = np.full((64, 64), 0.5)
    spec = DegradationSpec(sr_factor=2)
    params = SolverParams(noi=3)
    seen = []
    out, trace = super_resolve(lf, d_hr, x_b, omega, spec, params,
                               on_iteration=lambda t, v: seen.append((t, v)))
    assert len(trace) == 4
    assert seen == [(1, trace[1]), (2, trace[2]), (3, trace[3])]
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_backtracking_trace_never_increases(two_plane_scene):
    _, hr_ref, gt, lf = two_plane_scene
    d_hr = upsample_disparity(gt, 2)
    x_b = np.clip(hr_ref, 0, 1)
    omega = np.full((64, 64), 0.5)
    spec = DegradationSpec(sr_factor=2)
    params = SolverParams(noi=4, backtracking=True)
    _, trace = super_resolve(lf, d_hr, x_b, omega, spec, params)
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_solver_params_validation():
    with pytest.raises(ValueError):
        SolverParams(step_size=0.0)
    with pytest.raises(ValueError):
        SolverParams(noi=0)
    with pytest.raises(ValueError):
        SolverParams(btv_alpha=1.0)
    with pytest.raises(ValueError):
        SolverParams(lambda_b=-1.0)
    with pytest.raises(ValueError):
        SolverParams(sign_epsilon=0.0)
