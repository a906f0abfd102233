#!/usr/bin/env python3
"""Multi-frame super-resolution gain over bicubic upsampling.

An all-in-focus scene (every pixel on the focal plane) turns the pipeline
into pure SR: the bokeh weight collapses to a uniform near-zero value, so
the data term reconstructs from all nine views. The fractional per-view
shifts (0.75 px disparity, 1.5 px at the 2x grid) give the phase diversity
that SR needs; the result beats bicubic by about 2 dB.

    python3 demos/02_sr_gain.py
"""

from pathlib import Path

import numpy as np

from lfr import (
    DegradationSpec,
    RefocusParams,
    SceneLayer,
    SolverParams,
    SyntheticSceneSpec,
    bicubic_upsample,
    psnr_masked,
    refocus,
    synthesize_light_field,
    write_image,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

spec = SyntheticSceneSpec(
    hr_size=96, rows=3, cols=3, sr_factor=2,
    layers=(SceneLayer("mix", 0.75, texture_scale=2.0),),
    noise_sigma=0.005, seed=5)
hr_truth, gt_disparity, lf = synthesize_light_field(spec)

params = RefocusParams(focus_disparity=0.75, bokeh_intensity=2.0)
solver = SolverParams(lambda_btv=0.0, noi=20, step_size=0.1)
result = refocus(lf, params, solver, DegradationSpec(sr_factor=2),
                 disparity_source=gt_disparity)

print("objective trace:")
for i, v in enumerate(result.objective_trace):
    print(f"  iter {i:2d}: {v:10.3f}")

bicubic = np.clip(bicubic_upsample(lf.reference, 2), 0.0, 1.0)
p_sr = psnr_masked(result.output, hr_truth, result.weight_map)
p_bc = psnr_masked(bicubic, hr_truth, result.weight_map)
print(f"\nPSNR vs ground truth: SR {p_sr:.2f} dB, bicubic {p_bc:.2f} dB "
      f"(gain {p_sr - p_bc:+.2f} dB)")

write_image(OUT / "sr_output.png", result.output)
write_image(OUT / "sr_bicubic.png", bicubic)
write_image(OUT / "sr_truth.png", hr_truth)
print(f"wrote comparison images to {OUT}")
