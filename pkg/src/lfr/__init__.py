"""Light-field refocusing for camera arrays.

Renders depth-dependent bokeh from a view grid plus disparity, then
super-resolves the in-focus region by regularized multi-frame
reconstruction. Focus plane and depth of field stay adjustable after
capture.
"""

from .bokeh import BokehRenderConfig, render_bokeh, upsample_bokeh
from .dataset import (
    DatasetError,
    DisparityMap,
    FormatError,
    LightField,
    encode_png,
    grid_offsets,
    load_disparity,
    load_light_field,
    read_image,
    read_pfm,
    write_disparity,
    write_image,
    write_light_field,
    write_pfm,
)
from .disparity import (
    DisparityEstimationParams,
    default_sweep_range,
    plane_sweep_disparity,
    upsample_disparity,
)
from .operators import (
    bicubic_upsample,
    decimate,
    decimate_adjoint,
    gaussian_blur,
    gaussian_blur_adjoint,
    gaussian_kernel,
    translate,
    warp_adjoint,
    warp_forward,
    warp_nearest,
)
from .optics import (
    CocRadiusMap,
    OpticsParams,
    RefocusParams,
    WeightMap,
    bokeh_intensity_from_optics,
    coc_radius_map,
    coc_radius_thin_lens,
    weight_map,
)
from .pipeline import (
    RefocusResult,
    psnr_masked,
    refocus,
    run_timing_profile,
    timings_to_csv,
)
from .solver import (
    DegradationSpec,
    SolverParams,
    btv_gradient,
    btv_value,
    degrade_view,
    degrade_view_adjoint,
    gradient,
    lr_focus_masks,
    objective,
    super_resolve,
)
from .synthetic import SceneLayer, SyntheticSceneSpec, synthesize_light_field

__version__ = "0.1.0"

__all__ = [
    "BokehRenderConfig",
    "CocRadiusMap",
    "DatasetError",
    "DegradationSpec",
    "DisparityEstimationParams",
    "DisparityMap",
    "FormatError",
    "LightField",
    "OpticsParams",
    "RefocusParams",
    "RefocusResult",
    "SceneLayer",
    "SolverParams",
    "SyntheticSceneSpec",
    "WeightMap",
    "bicubic_upsample",
    "bokeh_intensity_from_optics",
    "btv_gradient",
    "btv_value",
    "coc_radius_map",
    "coc_radius_thin_lens",
    "decimate",
    "decimate_adjoint",
    "default_sweep_range",
    "degrade_view",
    "degrade_view_adjoint",
    "encode_png",
    "gaussian_blur",
    "gaussian_blur_adjoint",
    "gaussian_kernel",
    "gradient",
    "grid_offsets",
    "load_disparity",
    "load_light_field",
    "lr_focus_masks",
    "objective",
    "plane_sweep_disparity",
    "psnr_masked",
    "read_image",
    "read_pfm",
    "refocus",
    "render_bokeh",
    "run_timing_profile",
    "super_resolve",
    "synthesize_light_field",
    "timings_to_csv",
    "translate",
    "upsample_bokeh",
    "upsample_disparity",
    "warp_adjoint",
    "warp_forward",
    "warp_nearest",
    "weight_map",
    "write_disparity",
    "write_image",
    "write_light_field",
    "write_pfm",
]
