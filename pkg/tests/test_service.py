"""HTTP service: endpoints, validation shape, and the render job queue."""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from lfr import (
    SceneLayer,
    SyntheticSceneSpec,
    encode_png,
    load_light_field,
    synthesize_light_field,
    write_light_field,
)
from lfr.service import create_app


@pytest.fixture(scope="session")
def service_dir(tmp_path_factory):
    # native-resolution two-plane scene: background d=0, raised box d=2
    spec = SyntheticSceneSpec(
        hr_size=48, rows=3, cols=3, sr_factor=1,
        layers=(SceneLayer("mix", 0.0),
                SceneLayer("mix", 2.0, region=(12, 12, 36, 36))),
        noise_sigma=0.0, seed=21)
    _, _, lf = synthesize_light_field(spec)
    directory = tmp_path_factory.mktemp("service_dataset")
    write_light_field(directory, lf)
    return directory


@pytest.fixture(scope="session")
def client(service_dir):
    with TestClient(create_app(service_dir)) as c:
        yield c


def _decode_png(data: bytes) -> np.ndarray:
    import cv2

    img = cv2.imdecode(np.frombuffer(data, np.uint8), cv2.IMREAD_UNCHANGED)
    assert img is not None, "response is not a decodable PNG"
    return img


# ---------------------------------------------------------------------------
# dataset endpoints
# ---------------------------------------------------------------------------

def test_dataset_info(client):
    info = client.get("/dataset/info").json()
    assert info["rows"] == 3 and info["cols"] == 3
    assert info["width"] == 48 and info["height"] == 48
    lo, hi = info["disparity_range"]
    assert -0.5 <= lo <= 0.5 and 1.5 <= hi <= 2.5


def test_center_image_bytes(client, service_dir):
    r = client.get("/dataset/center.png")
    assert r.status_code == 200
    assert r.headers["content-type"] == "image/png"
    lf = load_light_field(service_dir)
    assert r.content == encode_png(lf.reference, bit_depth=8)


def test_disparity_probe_values(client):
    front = client.get("/disparity/value", params={"x": 24, "y": 24}).json()
    back = client.get("/disparity/value", params={"x": 4, "y": 4}).json()
    assert abs(front["d"] - 2.0) <= 0.5
    assert abs(back["d"] - 0.0) <= 0.5


def test_disparity_probe_out_of_bounds(client):
    r = client.get("/disparity/value", params={"x": 999, "y": 0})
    assert r.status_code == 400
    assert r.json()["detail"]["field"] == "x"


# ---------------------------------------------------------------------------
# preview
# ---------------------------------------------------------------------------

def test_preview_k0_is_the_sharp_center_view(client):
    r = client.post("/refocus/preview", json={"df": 0.0, "k": 0.0})
    assert r.status_code == 200
    assert r.content == client.get("/dataset/center.png").content


def test_preview_blur_changes_payload(client):
    sharp = client.post("/refocus/preview", json={"df": 0.0, "k": 0.0})
    blurred = client.post("/refocus/preview", json={"df": 0.0, "k": 2.0})
    assert blurred.status_code == 200
    assert blurred.content != sharp.content


def test_preview_deterministic(client):
    a = client.post("/refocus/preview", json={"df": 2.0, "k": 1.5})
    b = client.post("/refocus/preview", json={"df": 2.0, "k": 1.5})
    assert a.content == b.content


@pytest.mark.parametrize("payload,field", [
    ({"k": 1.0}, "df"),                      # missing required field
    ({"df": 99.0, "k": 1.0}, "df"),          # far outside the dataset range
    ({"df": 0.0, "k": -1.0}, "k"),
    ({"df": 0.0, "k": 1.0, "b": 2.0}, "b"),
])
def test_preview_validation(client, payload, field):
    r = client.post("/refocus/preview", json=payload)
    assert r.status_code == 400
    assert r.json()["detail"]["field"] == field


# ---------------------------------------------------------------------------
# render jobs
# ---------------------------------------------------------------------------

def _poll_until_done(client, job_id, timeout=60.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        doc = client.get(f"/job/{job_id}").json()
        if doc["state"] in ("done", "failed"):
            return doc
        time.sleep(0.05)
    raise AssertionError(f"job {job_id} did not finish within {timeout}s")


def test_render_job_lifecycle(client):
    r = client.post("/refocus/render",
                    json={"df": 0.0, "k": 2.0, "scale": 2, "noi": 2})
    assert r.status_code == 200
    job_id = r.json()["job_id"]
    assert job_id.startswith("job-")

    doc = _poll_until_done(client, job_id)
    assert doc["state"] == "done"
    assert doc["progress"] == doc["noi"] == 2
    assert doc["result_path"] == f"/job/{job_id}/result.png"
    assert doc["params"]["df"] == 0.0 and doc["params"]["scale"] == 2

    img = client.get(f"/job/{job_id}/result.png")
    assert img.status_code == 200
    decoded = _decode_png(img.content)
    assert decoded.shape[:2] == (96, 96)


def test_render_jobs_run_in_submission_order(client):
    first = client.post("/refocus/render",
                        json={"df": 0.0, "k": 2.0, "scale": 2, "noi": 3}).json()["job_id"]
    second = client.post("/refocus/render",
                         json={"df": 0.0, "k": 2.0, "scale": 1, "noi": 1}).json()["job_id"]

    # the second job never overtakes the first
    saw_second_active = False
    deadline = time.monotonic() + 60.0
    while time.monotonic() < deadline:
        s2 = client.get(f"/job/{second}").json()["state"]
        if s2 in ("running", "done"):
            saw_second_active = True
            assert client.get(f"/job/{first}").json()["state"] == "done"
        if s2 == "done":
            break
        time.sleep(0.02)
    assert saw_second_active


def test_result_of_queued_job_is_404(client):
    a = client.post("/refocus/render",
                    json={"df": 0.0, "k": 2.0, "scale": 2, "noi": 2}).json()["job_id"]
    b = client.post("/refocus/render",
                    json={"df": 0.0, "k": 2.0, "scale": 2, "noi": 1}).json()["job_id"]
    assert client.get(f"/job/{b}/result.png").status_code == 404
    _poll_until_done(client, a)
    _poll_until_done(client, b)


def test_unknown_job_is_404(client):
    assert client.get("/job/job-9999").status_code == 404
    assert client.get("/job/job-9999/result.png").status_code == 404


@pytest.mark.parametrize("payload,field", [
    ({"df": 0.0, "k": 1.0, "noi": 0}, "noi"),
    ({"df": 0.0, "k": 1.0, "scale": 1.5}, "scale"),
    ({"df": 0.0, "k": 1.0, "step": 0.0}, "step"),
    ({"k": 1.0}, "df"),
])
def test_render_validation(client, payload, field):
    r = client.post("/refocus/render", json=payload)
    assert r.status_code == 400
    assert r.json()["detail"]["field"] == field
