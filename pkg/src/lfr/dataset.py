"""Light-field dataset types and on-disk formats.

Conventions used across the library:
  * images are float64 arrays of shape (H, W, C), C in {1, 3}, samples
    nominally in [0, 1]
  * disparity maps are float64 arrays of shape (H, W), in pixels per unit
    baseline offset
  * a view grid is stored as a directory of ``view_{r}_{c}.png`` files plus a
    ``meta.json`` descriptor (rows, cols, offset_step, optional
    disparity_range)
  * scalar maps persist as single-channel PFM, little-endian, bottom-up rows
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np


class DatasetError(Exception):
    """A view grid or map file could not be loaded."""


class FormatError(DatasetError):
    """A file exists but its contents cannot be parsed."""


def ensure_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate and return an (H, W, C) float64 image array.

    A 2-D array is promoted to single-channel. Raises ValueError on a bad
    channel count or non-finite samples.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError(f"{name}: expected (H, W) or (H, W, 1|3), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: contains non-finite samples")
    return arr


@dataclass(frozen=True)
class DisparityMap:
    """Per-pixel disparity at reference-view resolution.

    ``values`` is (H, W) float64 in pixels per unit baseline offset; d_min and
    d_max are the extrema over the map.
    """

    values: np.ndarray
    d_min: float = field(init=False)
    d_max: float = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError(f"disparity map must be 2-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("disparity map contains non-finite values")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "d_min", float(vals.min()))
        object.__setattr__(self, "d_max", float(vals.max()))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LightField:
    """An N-view image grid with per-view baseline offsets.

    Views are ordered row-major over the grid; ``offsets[k]`` is the (u, v)
    position of view k in baseline units, u horizontal and v vertical, with
    the reference (center) view at (0, 0).
    """

    views: list
    offsets: list
    rows: int
    cols: int
    reference_index: int
    disparity_range: tuple | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be >= 1")
        if len(self.views) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} views, got {len(self.views)}"
            )
        if len(self.offsets) != len(self.views):
            raise ValueError("offsets and views must have equal length")
        expected_ref = (self.rows // 2) * self.cols + (self.cols // 2)
        if self.reference_index != expected_ref:
            raise ValueError(
                f"reference_index must be {expected_ref} for a "
                f"{self.rows}x{self.cols} grid"
            )
        offs = [(float(u), float(v)) for u, v in self.offsets]
        if len(set(offs)) != len(offs):
            raise ValueError("view offsets must be distinct")
        if offs[self.reference_index] != (0.0, 0.0):
            raise ValueError("reference view offset must be (0, 0)")
        views = [ensure_image(v, f"views[{i}]") for i, v in enumerate(self.views)]
        shape = views[0].shape
        for i, v in enumerate(views):
            if v.shape != shape:
                raise ValueError(
                    f"views[{i}] has shape {v.shape}, expected {shape}"
                )
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "offsets", offs)

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def height(self) -> int:
        return self.views[0].shape[0]

    @property
    def width(self) -> int:
        return self.views[0].shape[1]

    @property
    def channels(self) -> int:
        return self.views[0].shape[2]

    @property
    def reference(self) -> np.ndarray:
        return self.views[self.reference_index]


def grid_offsets(rows: int, cols: int, offset_step: float = 1.0) -> list:
    """Row-major (u, v) offsets for a rows x cols grid centered on the
    reference view at (floor(rows/2), floor(cols/2))."""
    r_ref, c_ref = rows // 2, cols // 2
    return [
        ((c - c_ref) * offset_step, (r - r_ref) * offset_step)
        for r in range(rows)
        for c in range(cols)
    ]


# ---------------------------------------------------------------------------
# PNG views
# ---------------------------------------------------------------------------

def read_image(path) -> np.ndarray:
    """Read an 8- or 16-bit PNG (gray or RGB) into (H, W, C) float64 [0, 1]."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DatasetError(f"cannot read image: {path}")
    if raw.ndim == 3 and raw.shape[2] == 4:
        raw = raw[:, :, :3]
    if raw.ndim == 3 and raw.shape[2] == 3:
        raw = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB)
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise FormatError(f"unsupported sample type {raw.dtype} in {path}")
    return ensure_image(raw.astype(np.float64) / scale, str(path))


def write_image(path, img: np.ndarray, bit_depth: int = 16) -> None:
    """Quantize a [0, 1] float image to 8/16-bit PNG."""
    img = ensure_image(img)
    if bit_depth == 8:
        q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    elif bit_depth == 16:
        q = np.rint(np.clip(img, 0.0, 1.0) * 65535.0).astype(np.uint16)
    else:
        raise ValueError("bit_depth must be 8 or 16")
    if q.shape[2] == 3:
        q = cv2.cvtColor(q, cv2.COLOR_RGB2BGR)
    else:
        q = q[:, :, 0]
    if not cv2.imwrite(str(path), q):
        raise DatasetError(f"cannot write image: {path}")


def encode_png(img: np.ndarray, bit_depth: int = 8) -> bytes:
    """PNG-encode a [0, 1] float image in memory (deterministic bytes)."""
    img = ensure_image(img)
    if bit_depth == 8:
        q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    else:
        q = np.rint(np.clip(img, 0.0, 1.0) * 65535.0).astype(np.uint16)
    if q.shape[2] == 3:
        q = cv2.cvtColor(q, cv2.COLOR_RGB2BGR)
    else:
        q = q[:, :, 0]
    ok, buf = cv2.imencode(".png", q)
    if not ok:
        raise DatasetError("PNG encoding failed")
    return bytes(buf.tobytes())


# ---------------------------------------------------------------------------
# PFM scalar maps
# ---------------------------------------------------------------------------

def read_pfm(path) -> np.ndarray:
    """Read a single-channel PFM into an (H, W) float64 array.

    Rows are stored bottom-up; the scale line carries endianness sign only
    (negative = little-endian).
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc

    def next_token(pos):
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated header")
        return data[start:pos], pos

    try:
        tag, pos = next_token(0)
        if tag == b"PF":
            raise FormatError(f"{path}: expected single-channel 'Pf', got color 'PF'")
        if tag != b"Pf":
            raise FormatError(f"{path}: not a PFM file (header {tag!r})")
        wtok, pos = next_token(pos)
        htok, pos = next_token(pos)
        stok, pos = next_token(pos)
        width, height = int(wtok), int(htok)
        scale = float(stok)
    except (ValueError, FormatError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: malformed header ({exc})") from exc
    if width <= 0 or height <= 0:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")

    pos += 1  # single whitespace byte after the scale line
    body = data[pos:]
    expected = width * height * 4
    if len(body) < expected:
        raise FormatError(
            f"{path}: truncated payload ({len(body)} bytes, expected {expected})"
        )
    dtype = "<f4" if scale < 0 else ">f4"
    flat = np.frombuffer(body[:expected], dtype=dtype)
    grid = flat.reshape(height, width)
    grid = np.flipud(grid)  # stored bottom-up
    return grid.astype(np.float64)


def write_pfm(path, values: np.ndarray) -> None:
    """Write an (H, W) array as little-endian single-channel PFM."""
    vals = np.asarray(values, dtype=np.float32)
    if vals.ndim != 2:
        raise ValueError(f"PFM writer takes a 2-D array, got shape {vals.shape}")
    height, width = vals.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{width} {height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(vals).astype("<f4").tobytes())


def load_disparity(path) -> DisparityMap:
    """Load a disparity map from PFM; d_min/d_max come from the data."""
    return DisparityMap(read_pfm(path))


def write_disparity(path, dmap: DisparityMap) -> None:
    write_pfm(path, dmap.values)


# ---------------------------------------------------------------------------
# View-grid directories
# ---------------------------------------------------------------------------

_META_REQUIRED = ("rows", "cols", "offset_step")


def read_meta(directory) -> dict:
    meta_path = Path(directory) / "meta.json"
    try:
        text = meta_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {meta_path}: {exc}") from exc
    try:
        meta = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{meta_path}: invalid JSON at line {exc.lineno}, column {exc.colno}"
        ) from exc
    for key in _META_REQUIRED:
        if key not in meta:
            raise FormatError(f"{meta_path}: missing field '{key}'")
    try:
        meta["rows"] = int(meta["rows"])
        meta["cols"] = int(meta["cols"])
        meta["offset_step"] = float(meta["offset_step"])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{meta_path}: bad field value ({exc})") from exc
    if "disparity_range" in meta and meta["disparity_range"] is not None:
        dr = meta["disparity_range"]
        if not isinstance(dr, (list, tuple)) or len(dr) != 2:
            raise FormatError(f"{meta_path}: disparity_range must be [min, max]")
        meta["disparity_range"] = (float(dr[0]), float(dr[1]))
    return meta


def load_light_field(directory) -> LightField:
    """Load a view grid from a directory of view_{r}_{c}.png files + meta.json."""
    directory = Path(directory)
    meta = read_meta(directory)
    rows, cols = meta["rows"], meta["cols"]
    views = []
    shape = None
    for r in range(rows):
        for c in range(cols):
            path = directory / f"view_{r}_{c}.png"
            if not path.exists():
                raise DatasetError(f"missing view image: {path.name}")
            img = read_image(path)
            if shape is None:
                shape = img.shape
            elif img.shape != shape:
                raise DatasetError(
                    f"view size mismatch: {path.name} is "
                    f"{img.shape[1]}x{img.shape[0]}, expected {shape[1]}x{shape[0]}"
                )
            views.append(img)
    return LightField(
        views=views,
        offsets=grid_offsets(rows, cols, meta["offset_step"]),
        rows=rows,
        cols=cols,
        reference_index=(rows // 2) * cols + (cols // 2),
        disparity_range=meta.get("disparity_range"),
    )


def _infer_offset_step(lf: LightField) -> float:
    ref = lf.reference_index
    if lf.cols > 1:
        neighbor = ref + 1 if (ref % lf.cols) + 1 < lf.cols else ref - 1
        return abs(lf.offsets[neighbor][0] - lf.offsets[ref][0])
    if lf.rows > 1:
        neighbor = ref + lf.cols if ref // lf.cols + 1 < lf.rows else ref - lf.cols
        return abs(lf.offsets[neighbor][1] - lf.offsets[ref][1])
    return 1.0


def write_light_field(directory, lf: LightField, bit_depth: int = 16) -> None:
    """Write views + meta.json in the layout load_light_field expects."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    k = 0
    for r in range(lf.rows):
        for c in range(lf.cols):
            write_image(directory / f"view_{r}_{c}.png", lf.views[k], bit_depth)
            k += 1
    meta = {"rows": lf.rows, "cols": lf.cols, "offset_step": _infer_offset_step(lf)}
    if lf.disparity_range is not None:
        meta["disparity_range"] = list(lf.disparity_range)
    (directory / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
