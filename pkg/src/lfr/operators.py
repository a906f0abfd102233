"""Image-domain linear operators and their exact adjoints.

The degradation chain applied to a high-resolution image is
``decimate(gaussian_blur(warp_forward(x)))``; each stage here is paired with
an adjoint built from the same index/weight stencil (gather for the forward
map, scatter for the transpose), so the inner-product identity
<A x, y> == <x, A^T y> holds to float rounding, not just approximately.

Coordinates: arrays are indexed [row, col] = [y, x]; warp offsets (u, v) act
on (x, y). All samplers clamp to the image edge.
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# Bilinear warping
# ---------------------------------------------------------------------------

def _bilinear_stencil(height, width, disparity, offset):
    """Index/weight stencil for sampling at (x + u*d, y + v*d).

    Coordinates clamp to the image rectangle (edge-extend), then split into
    the four neighbor indices and bilinear weights. The same stencil defines
    warp_forward (gather) and warp_adjoint (scatter), so the two are exact
    transposes of one another.
    """
    u, v = float(offset[0]), float(offset[1])
    d = np.asarray(disparity, dtype=np.float64)
    ys, xs = np.mgrid[0:height, 0:width]
    sx = xs + u * d
    sy = ys + v * d
    sx = np.clip(sx, 0.0, width - 1.0)
    sy = np.clip(sy, 0.0, height - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    fx = sx - x0
    fy = sy - y0
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    w00 = (1.0 - fy) * (1.0 - fx)
    w01 = (1.0 - fy) * fx
    w10 = fy * (1.0 - fx)
    w11 = fy * fx
    return (y0, y1, x0, x1), (w00, w01, w10, w11)


def warp_forward(img: np.ndarray, disparity: np.ndarray, offset) -> np.ndarray:
    """Disparity-driven warp: out(p) = img(p + (u*d_p, v*d_p)), bilinear.

    ``disparity`` must be at img resolution with values in the same pixel
    units as img (for the HR solver frame, scale LR disparity by the SR
    factor first).
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if disparity.shape != (h, w):
        raise ValueError(
            f"disparity shape {disparity.shape} != image shape {(h, w)}"
        )
    (y0, y1, x0, x1), (w00, w01, w10, w11) = _bilinear_stencil(h, w, disparity, offset)
    if img.ndim == 3:
        w00, w01, w10, w11 = (a[..., None] for a in (w00, w01, w10, w11))
    return (
        w00 * img[y0, x0]
        + w01 * img[y0, x1]
        + w10 * img[y1, x0]
        + w11 * img[y1, x1]
    )


def warp_adjoint(img: np.ndarray, disparity: np.ndarray, offset) -> np.ndarray:
    """Exact transpose of warp_forward for the same disparity and offset.

    Splats each input sample back onto the four source pixels of its bilinear
    stencil with the gather weights.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if disparity.shape != (h, w):
        raise ValueError(
            f"disparity shape {disparity.shape} != image shape {(h, w)}"
        )
    (y0, y1, x0, x1), weights = _bilinear_stencil(h, w, disparity, offset)
    out = np.zeros_like(img)
    for (yy, xx), ww in zip(((y0, x0), (y0, x1), (y1, x0), (y1, x1)), weights):
        flat = (yy * w + xx).ravel()
        if img.ndim == 2:
            out += np.bincount(flat, weights=(ww * img).ravel(), minlength=h * w).reshape(h, w)
        else:
            for c in range(img.shape[2]):
                out[:, :, c] += np.bincount(
                    flat, weights=(ww * img[:, :, c]).ravel(), minlength=h * w
                ).reshape(h, w)
    return out


def warp_nearest(values: np.ndarray, disparity: np.ndarray, offset) -> np.ndarray:
    """Nearest-neighbor variant of warp_forward (keeps masks in [0, 1])."""
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape[:2]
    u, v = float(offset[0]), float(offset[1])
    ys, xs = np.mgrid[0:h, 0:w]
    sx = np.clip(np.rint(xs + u * disparity), 0, w - 1).astype(np.intp)
    sy = np.clip(np.rint(ys + v * disparity), 0, h - 1).astype(np.intp)
    return values[sy, sx]


def translate(img: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Constant-shift warp: out(p) = img(p + (dx, dy)), bilinear, clamped."""
    h, w = np.asarray(img).shape[:2]
    shift = np.ones((h, w))
    return warp_forward(img, shift, (dx, dy))


# ---------------------------------------------------------------------------
# Gaussian blur
# ---------------------------------------------------------------------------

def gaussian_kernel(sigma: float, radius: int | None = None) -> np.ndarray:
    """1-D Gaussian taps at integer offsets, normalized to sum 1.

    sigma <= 0 degenerates to the identity kernel [1]. Default radius is
    ceil(2*sigma).
    """
    if sigma <= 0.0:
        return np.array([1.0])
    if radius is None:
        radius = int(np.ceil(2.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return k / k.sum()


def _conv1d_clamp(img, kernel, axis):
    radius = (len(kernel) - 1) // 2
    n = img.shape[axis]
    idx = np.arange(n)
    out = np.zeros_like(img)
    for t, kt in enumerate(kernel):
        src = np.clip(idx + t - radius, 0, n - 1)
        out += kt * np.take(img, src, axis=axis)
    return out


def _conv1d_clamp_adjoint(img, kernel, axis):
    # Transpose of _conv1d_clamp: per tap, the interior is a plain shift and
    # every sample whose clamped read fell on an edge accumulates there.
    radius = (len(kernel) - 1) // 2
    moved = np.moveaxis(np.asarray(img, dtype=np.float64), axis, 0)
    n = moved.shape[0]
    out = np.zeros_like(moved)
    for t, kt in enumerate(kernel):
        o = t - radius
        i_lo = max(0, -o)
        i_hi = n - 1 - max(0, o)
        if i_hi >= i_lo:
            out[i_lo + o : i_hi + o + 1] += kt * moved[i_lo : i_hi + 1]
        if o < 0:
            out[0] += kt * moved[: min(-o, n)].sum(axis=0)
        elif o > 0:
            out[n - 1] += kt * moved[max(n - o, 0):].sum(axis=0)
    return np.moveaxis(out, 0, axis)


def gaussian_blur(img: np.ndarray, sigma: float, radius: int | None = None) -> np.ndarray:
    """Separable Gaussian convolution with clamp-to-edge boundaries."""
    img = np.asarray(img, dtype=np.float64)
    k = gaussian_kernel(sigma, radius)
    if len(k) == 1:
        return img.copy()
    return _conv1d_clamp(_conv1d_clamp(img, k, 0), k, 1)


def gaussian_blur_adjoint(img: np.ndarray, sigma: float, radius: int | None = None) -> np.ndarray:
    """Exact transpose of gaussian_blur, including edge-clamp weights.

    Clamp-to-edge convolution is only self-adjoint away from the borders, so
    the transpose is built by scattering through the same clamped indices.
    """
    img = np.asarray(img, dtype=np.float64)
    k = gaussian_kernel(sigma, radius)
    if len(k) == 1:
        return img.copy()
    return _conv1d_clamp_adjoint(_conv1d_clamp_adjoint(img, k, 1), k, 0)


# ---------------------------------------------------------------------------
# Decimation
# ---------------------------------------------------------------------------

def decimate(img: np.ndarray, s: int) -> np.ndarray:
    """Point sampling at stride s with origin (0, 0)."""
    img = np.asarray(img, dtype=np.float64)
    if s < 1:
        raise ValueError("decimation factor must be >= 1")
    if s == 1:
        return img.copy()
    h, w = img.shape[:2]
    if h % s or w % s:
        raise ValueError(f"image size {w}x{h} is not divisible by factor {s}")
    return img[::s, ::s].copy()


def decimate_adjoint(img: np.ndarray, s: int) -> np.ndarray:
    """Zero-insertion upsampling: the transpose of stride-s point sampling."""
    img = np.asarray(img, dtype=np.float64)
    if s < 1:
        raise ValueError("decimation factor must be >= 1")
    if s == 1:
        return img.copy()
    shape = (img.shape[0] * s, img.shape[1] * s) + img.shape[2:]
    out = np.zeros(shape, dtype=np.float64)
    out[::s, ::s] = img
    return out


# ---------------------------------------------------------------------------
# Bicubic upsampling
# ---------------------------------------------------------------------------

def catmull_rom_weight(t):
    """Bicubic kernel with parameter -0.5 evaluated at distance t."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    w = np.where(
        t <= 1.0,
        1.5 * t**3 - 2.5 * t**2 + 1.0,
        np.where(t < 2.0, -0.5 * t**3 + 2.5 * t**2 - 4.0 * t + 2.0, 0.0),
    )
    return w


def _upsample_axis(img, s, axis):
    n = img.shape[axis]
    src = np.arange(n * s, dtype=np.float64) / s
    i0 = np.floor(src).astype(np.intp)
    frac = src - i0
    out = np.zeros(img.shape[:axis] + (n * s,) + img.shape[axis + 1:], dtype=np.float64)
    shape = [1] * img.ndim
    shape[axis] = n * s
    for tap in range(-1, 3):
        idx = np.clip(i0 + tap, 0, n - 1)
        w = catmull_rom_weight(frac - tap).reshape(shape)
        out += w * np.take(img, idx, axis=axis)
    return out


def bicubic_upsample(img: np.ndarray, s: int) -> np.ndarray:
    """Upsample by integer factor s with the separable Catmull-Rom kernel.

    Output pixel (i, j) interpolates the input at (i/s, j/s): origin-aligned,
    so decimate(bicubic_upsample(x), s) == x exactly. Edges clamp.
    """
    img = np.asarray(img, dtype=np.float64)
    if s < 1:
        raise ValueError("upsampling factor must be >= 1")
    if s == 1:
        return img.copy()
    return _upsample_axis(_upsample_axis(img, s, 0), s, 1)
