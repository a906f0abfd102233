"""Shared synthetic scenes for the test suite.

Both fixtures are session scoped: every consumer treats the returned arrays
as read-only ground truth.
"""

import pytest

from lfr import SceneLayer, SyntheticSceneSpec, synthesize_light_field


@pytest.fixture(scope="session")
def two_plane_scene():
    """64px HR scene at s=2: full-canvas backdrop at d=0.5 behind a square
    plate at d=1.5. Returns (spec, hr_reference, gt_disparity, light_field)."""
    spec = SyntheticSceneSpec(
        hr_size=64,
        rows=3,
        cols=3,
        sr_factor=2,
        layers=(
            SceneLayer("mix", 0.5),
            SceneLayer("mix", 1.5, region=(16, 16, 48, 48)),
        ),
        noise_sigma=0.0,
        seed=3,
    )
    hr_ref, gt, lf = synthesize_light_field(spec)
    return spec, hr_ref, gt, lf


@pytest.fixture(scope="session")
def flat_scene_d2():
    """Constant-disparity d=2 scene (96px, s=1) for sweep-recovery tests."""
    spec = SyntheticSceneSpec(
        hr_size=96,
        rows=3,
        cols=3,
        sr_factor=1,
        layers=(SceneLayer("mix", 2.0),),
        noise_sigma=0.0,
        seed=7,
    )
    hr_ref, gt, lf = synthesize_light_field(spec)
    return spec, hr_ref, gt, lf
