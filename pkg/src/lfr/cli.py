"""Command-line interface.

Subcommands cover the full workflow: synthesize a test light field, estimate
disparity, run the refocusing pipeline, evaluate focused-region PSNR, profile
stage timings, and serve the HTTP API.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import dataset
from .disparity import DisparityEstimationParams, default_sweep_range, plane_sweep_disparity
from .optics import RefocusParams, WeightMap
from .pipeline import psnr_masked, refocus, run_timing_profile, timings_to_csv
from .solver import DegradationSpec, SolverParams
from .synthetic import SceneLayer, SyntheticSceneSpec, synthesize_light_field


def _parse_grid(text: str):
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RxC (e.g. 3x3), got {text!r}")


def _parse_range(text: str):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI (e.g. 0:4), got {text!r}")


def _parse_planes(text: str):
    """Plane list grammar: kind:disparity[:x0,y0,x1,y1] joined by '+'.

    Example: mix:0+checker:2:32,32,96,96 puts a checker square at disparity 2
    in front of a full-canvas mix-textured background at disparity 0.
    """
    layers = []
    for part in text.split("+"):
        bits = part.split(":")
        if len(bits) not in (2, 3):
            raise argparse.ArgumentTypeError(
                f"plane {part!r} must be kind:disparity[:x0,y0,x1,y1]")
        kind, disp = bits[0], float(bits[1])
        region = None
        if len(bits) == 3:
            coords = bits[2].split(",")
            if len(coords) != 4:
                raise argparse.ArgumentTypeError(
                    f"plane region {bits[2]!r} must be x0,y0,x1,y1")
            region = tuple(int(c) for c in coords)
        layers.append(SceneLayer(texture=kind, disparity=disp, region=region))
    return layers


def _parse_float_list(text: str):
    return [float(v) for v in text.split(",") if v != ""]


def _parse_int_list(text: str):
    return [int(v) for v in text.split(",") if v != ""]


def _cmd_synth(args) -> int:
    spec = SyntheticSceneSpec(
        hr_size=args.hr_size,
        rows=args.grid[0],
        cols=args.grid[1],
        sr_factor=args.scale,
        layers=tuple(args.planes),
        noise_sigma=args.noise,
        seed=args.seed,
    )
    hr_ref, gt, lf = synthesize_light_field(spec)
    out = Path(args.out)
    dataset.write_light_field(out, lf)
    dataset.write_disparity(out / "gt_disparity.pfm", gt)
    dataset.write_image(out / "hr_reference.png", hr_ref)
    print(f"wrote {lf.n_views} views ({lf.width}x{lf.height}), "
          f"gt_disparity.pfm and hr_reference.png to {out}")
    return 0


def _cmd_disparity(args) -> int:
    lf = dataset.load_light_field(args.input)
    lo, hi = args.range if args.range is not None else default_sweep_range(lf)
    params = DisparityEstimationParams(
        num_hypotheses=args.n, d_lo=lo, d_hi=hi, window=args.window)
    dmap = plane_sweep_disparity(lf, params)
    dataset.write_disparity(args.out, dmap)
    print(f"wrote {args.out} (range [{dmap.d_min:g}, {dmap.d_max:g}])")
    return 0


def _cmd_refocus(args) -> int:
    lf = dataset.load_light_field(args.input)
    source = dataset.load_disparity(args.disparity) if args.disparity else "estimate"
    rp = RefocusParams(focus_disparity=args.df, bokeh_intensity=args.k,
                       sigmoid_decay=args.a, sigmoid_threshold=args.b)
    sp = SolverParams(lambda_b=args.lambda_b, lambda_btv=args.lambda_btv,
                      step_size=args.step, noi=args.noi,
                      backtracking=args.backtracking)
    result = refocus(lf, rp, sp, DegradationSpec(sr_factor=args.scale),
                     disparity_source=source)
    dataset.write_image(args.out, result.output)
    if args.save_intermediates:
        inter = Path(args.save_intermediates)
        inter.mkdir(parents=True, exist_ok=True)
        dataset.write_image(inter / "bokeh.png", result.bokeh_image)
        dataset.write_pfm(inter / "weights.pfm", result.weight_map.weights)
        dataset.write_disparity(inter / "disparity.pfm", result.disparity)
        trace_csv = "iteration,objective\n" + "\n".join(
            f"{i},{v:.9g}" for i, v in enumerate(result.objective_trace))
        (inter / "trace.csv").write_text(trace_csv + "\n", encoding="utf-8")
    t = result.timings
    print(f"wrote {args.out}")
    print(f"objective {result.objective_trace[0]:.6g} -> {result.objective_trace[-1]:.6g} "
          f"in {sp.noi} iterations")
    print(f"timings (s): disparity {t['disparity']:.3f}, bokeh {t['bokeh']:.3f}, "
          f"sr {t['sr']:.3f}, total {t['total']:.3f}")
    return 0


def _cmd_eval(args) -> int:
    result = dataset.read_image(args.result)
    gt = dataset.read_image(args.gt)
    weights = WeightMap(dataset.read_pfm(args.weights))
    value = psnr_masked(result, gt, weights, threshold=args.threshold)
    print("PSNR: inf dB" if math.isinf(value) else f"PSNR: {value:.3f} dB")
    return 0


def _cmd_profile(args) -> int:
    lf = dataset.load_light_field(args.input)
    rows = run_timing_profile(lf, args.k_list, args.noi_list,
                              degradation=DegradationSpec(sr_factor=2))
    csv_text = timings_to_csv(rows)
    Path(args.out).write_text(csv_text, encoding="utf-8")
    print(csv_text, end="")
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.input, port=args.port, disparity_path=args.disparity)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfr", description="Light-field refocusing with bokeh rendering "
        "and multi-frame super-resolution")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic light-field dataset")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--hr-size", type=int, default=128, help="HR canvas side in pixels")
    p.add_argument("--grid", type=_parse_grid, default=(3, 3), help="view grid RxC")
    p.add_argument("--scale", type=int, default=2, help="SR factor s")
    p.add_argument("--planes", type=_parse_planes,
                   default=_parse_planes("mix:0+mix:2:32,32,96,96"),
                   help="kind:disparity[:x0,y0,x1,y1] joined by '+'")
    p.add_argument("--noise", type=float, default=0.005, help="noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("disparity", help="estimate disparity by plane sweep")
    p.add_argument("--input", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output PFM path")
    p.add_argument("--n", type=int, default=17, help="number of hypotheses")
    p.add_argument("--range", type=_parse_range, default=None,
                   help="sweep range LO:HI (default: dataset metadata)")
    p.add_argument("--window", type=int, default=7, help="aggregation window")
    p.set_defaults(fn=_cmd_disparity)

    p = sub.add_parser("refocus", help="run the full refocusing pipeline")
    p.add_argument("--input", required=True, help="dataset directory")
    p.add_argument("--disparity", default=None, help="precomputed disparity PFM")
    p.add_argument("--df", type=float, required=True, help="focus disparity")
    p.add_argument("--k", type=float, required=True, help="bokeh intensity")
    p.add_argument("--scale", type=int, default=2, help="SR factor s")
    p.add_argument("--noi", type=int, default=10, help="iteration count")
    p.add_argument("--step", type=float, default=0.1, help="step size")
    p.add_argument("--lambda-b", type=float, default=5.0, dest="lambda_b")
    p.add_argument("--lambda-btv", type=float, default=0.2, dest="lambda_btv")
    p.add_argument("--a", type=float, default=15.0, help="sigmoid decay")
    p.add_argument("--b", type=float, default=0.3, help="sigmoid threshold")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--save-intermediates", default=None, metavar="DIR")
    p.add_argument("--backtracking", action="store_true")
    p.set_defaults(fn=_cmd_refocus)

    p = sub.add_parser("eval", help="focused-region PSNR between two images")
    p.add_argument("--result", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--weights", required=True, help="weight-map PFM")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("profile", help="stage timings over a K x NoI grid")
    p.add_argument("--input", required=True, help="dataset directory")
    p.add_argument("--k-list", type=_parse_float_list, default=[1.0, 2.0, 3.0],
                   dest="k_list")
    p.add_argument("--noi-list", type=_parse_int_list, default=[5, 10, 20],
                   dest="noi_list")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("serve", help="run the local refocus HTTP service")
    p.add_argument("--input", required=True, help="dataset directory")
    p.add_argument("--disparity", default=None, help="precomputed disparity PFM")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (dataset.DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
