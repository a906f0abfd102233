#!/usr/bin/env python3
"""Anatomy of the gathering bokeh filter and the focus/bokeh weight map.

Three small experiments, all printable without plotting:

1. a unit impulse with constant CoC radius 3 spreads into the exact
   29-pixel equal-weight disk (the discrete area of radius 3);
2. the sigmoid weight map is invariant to scaling the bokeh intensity K,
   because the radius map is min-max normalized before the sigmoid;
3. doubling K doubles the spatial support of the blur.

    python3 demos/03_bokeh_anatomy.py
"""

import numpy as np

from lfr import (
    CocRadiusMap,
    DisparityMap,
    RefocusParams,
    coc_radius_map,
    render_bokeh,
    weight_map,
)

# 1. impulse disk --------------------------------------------------------

img = np.zeros((15, 15, 1))
img[7, 7, 0] = 1.0
out = render_bokeh(img, CocRadiusMap(np.full((15, 15), 3.0)))[:, :, 0]
nonzero = np.argwhere(out > 0)
print(f"impulse, radius 3: {len(nonzero)} pixels lit "
      f"(discrete disk of r=3 has 29), weights "
      f"{out[out > 0].min():.6f}..{out[out > 0].max():.6f} (1/29 = {1/29:.6f})")
print("\nsupport (rows 4..10):")
for row in (out[4:11, 4:11] > 0).astype(int):
    print("   ", " ".join("#" if v else "." for v in row))

# 2. K-invariance of the weight map --------------------------------------

rng = np.random.default_rng(0)
dmap = DisparityMap(rng.uniform(0.0, 2.0, (32, 32)))
weights = {}
for k in (1.0, 2.0, 4.0):
    rp = RefocusParams(focus_disparity=0.5, bokeh_intensity=k)
    weights[k] = weight_map(coc_radius_map(dmap, rp), rp).weights
print(f"\nweight-map K-invariance: max |w(K=1) - w(K=2)| = "
      f"{np.abs(weights[1.0] - weights[2.0]).max():.2e}, "
      f"max |w(K=1) - w(K=4)| = {np.abs(weights[1.0] - weights[4.0]).max():.2e}")

# 3. blur support scales with K ------------------------------------------

print("\nimpulse support radius vs K (radius map = K at the impulse):")
for k in (1.0, 2.0, 3.0):
    out = render_bokeh(img, CocRadiusMap(np.full((15, 15), k)))[:, :, 0]
    ys, xs = np.nonzero(out)
    r = np.hypot(ys - 7.0, xs - 7.0).max()
    print(f"  K={k:g}: farthest lit pixel at distance {r:.2f}")
