"""Local HTTP service for interactive refocusing.

The dataset and its disparity map are loaded once at startup; every request
reuses them (disparity does not depend on the focus settings). Previews run
only the CoC + bokeh stages at native resolution for slider-rate latency.
Full SR renders are pollable jobs executed one at a time, in submission
order, by a single background worker.

Request bodies are validated manually so malformed parameters produce a 400
naming the offending field instead of a framework-shaped 422.
"""

from __future__ import annotations

import itertools
import queue
import threading
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .bokeh import BokehRenderConfig, render_bokeh
from .dataset import DisparityMap, encode_png, load_disparity, load_light_field
from .disparity import DisparityEstimationParams, default_sweep_range, plane_sweep_disparity
from .optics import RefocusParams, coc_radius_map
from .pipeline import refocus
from .solver import DegradationSpec, SolverParams

DF_SLACK = 1.0  # allowed focus-disparity margin beyond the cached map's range


@dataclass
class RenderJob:
    """Mutable job record; guarded by the registry lock."""

    id: str
    params: dict
    noi: int
    state: str = "queued"  # queued -> running -> done | failed
    progress: int = 0
    result_bytes: bytes | None = None
    error: str | None = None

    def snapshot(self) -> dict:
        doc = {
            "id": self.id,
            "state": self.state,
            "params": self.params,
            "progress": self.progress,
            "noi": self.noi,
        }
        if self.state == "done":
            doc["result_path"] = f"/job/{self.id}/result.png"
        if self.state == "failed":
            doc["error"] = self.error
        return doc


def _bad_request(field_name: str, message: str):
    return HTTPException(status_code=400,
                         detail={"field": field_name, "message": message})


def _number(payload: dict, name: str, default=None, minimum=None, maximum=None,
            integer=False):
    if name not in payload or payload[name] is None:
        if default is None:
            raise _bad_request(name, "required")
        return default
    value = payload[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _bad_request(name, "must be a number")
    if integer:
        if float(value) != int(value):
            raise _bad_request(name, "must be an integer")
        value = int(value)
    else:
        value = float(value)
    if minimum is not None and value < minimum:
        raise _bad_request(name, f"must be >= {minimum}")
    if maximum is not None and value > maximum:
        raise _bad_request(name, f"must be <= {maximum}")
    return value


def create_app(dataset_dir, disparity_path=None) -> FastAPI:
    """Build the service around one dataset directory.

    disparity_path optionally supplies a precomputed PFM; otherwise a plane
    sweep over the dataset's declared range runs once at startup.
    """
    lf = load_light_field(dataset_dir)
    if disparity_path is not None:
        dmap = load_disparity(disparity_path)
        if dmap.values.shape != (lf.height, lf.width):
            raise ValueError("disparity map does not match the dataset views")
    else:
        lo, hi = default_sweep_range(lf)
        dmap = plane_sweep_disparity(lf, DisparityEstimationParams(d_lo=lo, d_hi=hi))

    center_png = encode_png(lf.reference, bit_depth=8)

    app = FastAPI(title="lfr refocus service")
    # the browser viewer may be served from a separate static file server
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    jobs: dict = {}
    jobs_lock = threading.Lock()
    job_queue: queue.Queue = queue.Queue()
    job_ids = itertools.count(1)

    def _validate_df(payload: dict) -> float:
        df = _number(payload, "df")
        lo = dmap.d_min - DF_SLACK
        hi = dmap.d_max + DF_SLACK
        if not lo <= df <= hi:
            raise _bad_request("df", f"must be within [{lo:g}, {hi:g}]")
        return df

    def _worker():
        while True:
            job = job_queue.get()
            with jobs_lock:
                job.state = "running"
            try:
                p = job.params
                rp = RefocusParams(
                    focus_disparity=p["df"], bokeh_intensity=p["k"],
                    sigmoid_decay=p["a"], sigmoid_threshold=p["b"])
                sp = SolverParams(
                    lambda_b=p["lambda_b"], lambda_btv=p["lambda_btv"],
                    step_size=p["step"], noi=p["noi"])
                spec = DegradationSpec(sr_factor=p["scale"])

                def on_iteration(done, _value):
                    with jobs_lock:
                        job.progress = done

                result = refocus(lf, rp, sp, spec, disparity_source=dmap,
                                 on_iteration=on_iteration)
                png = encode_png(result.output, bit_depth=8)
                with jobs_lock:
                    job.result_bytes = png
                    job.state = "done"
            except Exception as exc:  # job failures must not kill the worker
                with jobs_lock:
                    job.error = str(exc)
                    job.state = "failed"
            finally:
                job_queue.task_done()

    threading.Thread(target=_worker, daemon=True, name="lfr-render-worker").start()

    @app.get("/dataset/info")
    def dataset_info():
        return {
            "rows": lf.rows,
            "cols": lf.cols,
            "width": lf.width,
            "height": lf.height,
            "disparity_range": [dmap.d_min, dmap.d_max],
        }

    @app.get("/dataset/center.png")
    def dataset_center():
        return Response(content=center_png, media_type="image/png")

    @app.get("/disparity/value")
    def disparity_value(x: int, y: int):
        if not 0 <= x < lf.width:
            raise _bad_request("x", f"must be within [0, {lf.width - 1}]")
        if not 0 <= y < lf.height:
            raise _bad_request("y", f"must be within [0, {lf.height - 1}]")
        return {"d": float(dmap.values[y, x])}

    @app.post("/refocus/preview")
    def refocus_preview(payload: dict):
        df = _validate_df(payload)
        k = _number(payload, "k", minimum=0.0)
        a = _number(payload, "a", default=15.0)
        b = _number(payload, "b", default=0.3, minimum=0.0, maximum=1.0)
        if a <= 0:
            raise _bad_request("a", "must be > 0")
        params = RefocusParams(focus_disparity=df, bokeh_intensity=k,
                               sigmoid_decay=a, sigmoid_threshold=b)
        rendered = render_bokeh(lf.reference, coc_radius_map(dmap, params),
                                BokehRenderConfig())
        return Response(content=encode_png(rendered, bit_depth=8),
                        media_type="image/png")

    @app.post("/refocus/render")
    def refocus_render(payload: dict):
        params = {
            "df": _validate_df(payload),
            "k": _number(payload, "k", minimum=0.0),
            "scale": _number(payload, "scale", default=2, minimum=1, integer=True),
            "noi": _number(payload, "noi", default=10, minimum=1, integer=True),
            "lambda_b": _number(payload, "lambda_b", default=5.0, minimum=0.0),
            "lambda_btv": _number(payload, "lambda_btv", default=0.2, minimum=0.0),
            "step": _number(payload, "step", default=0.1),
            "a": _number(payload, "a", default=15.0),
            "b": _number(payload, "b", default=0.3, minimum=0.0, maximum=1.0),
        }
        if params["step"] <= 0:
            raise _bad_request("step", "must be > 0")
        if params["a"] <= 0:
            raise _bad_request("a", "must be > 0")
        job = RenderJob(id=f"job-{next(job_ids)}", params=params, noi=params["noi"])
        with jobs_lock:
            jobs[job.id] = job
        job_queue.put(job)
        return {"job_id": job.id}

    def _get_job(job_id: str) -> RenderJob:
        with jobs_lock:
            job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job id {job_id!r}")
        return job

    @app.get("/job/{job_id}")
    def job_status(job_id: str):
        job = _get_job(job_id)
        with jobs_lock:
            return JSONResponse(job.snapshot())

    @app.get("/job/{job_id}/result.png")
    def job_result(job_id: str):
        job = _get_job(job_id)
        with jobs_lock:
            state, data = job.state, job.result_bytes
        if state != "done":
            raise HTTPException(status_code=404,
                                detail=f"job {job_id!r} has no result (state {state})")
        return Response(content=data, media_type="image/png")

    return app


def serve(dataset_dir, port: int = 8000, disparity_path=None, host: str = "127.0.0.1"):
    """Blocking entry point used by the command line."""
    import uvicorn

    app = create_app(dataset_dir, disparity_path=disparity_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")
