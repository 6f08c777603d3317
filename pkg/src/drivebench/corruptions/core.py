"""Natural image corruptions at five severities.

Eleven corruption kinds cover weather (snow, rain, fog, sunlight),
sensor noise (uniform, gaussian, impulse), geometric distortion (scale,
shear, rotation), and motion blur. Severity 0 is the identity; 1..5 run
from weak to strong. Images are (H, W, 3) float arrays in [0, 1].

Random draws happen in a fixed order with a fixed count per element, so
for one seed the streaks, noise fields, and spot geometry at a low
severity are a prefix of those at a higher one; severity sweeps then
move strictly away from the clean image instead of resampling.
"""

import math
from enum import Enum

import numpy as np


class CorruptionKind(Enum):
    SNOW = "snow"
    RAIN = "rain"
    FOG = "fog"
    SUNLIGHT = "sunlight"
    UNIFORM_NOISE = "uniform-noise"
    GAUSSIAN_NOISE = "gaussian-noise"
    IMPULSE_NOISE = "impulse-noise"
    SCALE = "scale"
    SHEAR = "shear"
    ROTATION = "rotation"
    MOTION_BLUR = "motion-blur"


CORRUPTION_KINDS = tuple(CorruptionKind)

# per-kind strength at severities 1..5
GAUSSIAN_SIGMA = (0.04, 0.08, 0.12, 0.18, 0.26)
UNIFORM_HALF_WIDTH = (0.06, 0.12, 0.18, 0.26, 0.38)
IMPULSE_FRACTION = (0.01, 0.02, 0.05, 0.10, 0.17)
FOG_HAZE = (0.15, 0.25, 0.35, 0.45, 0.55)
STREAK_COUNT = (50, 120, 250, 450, 800)
SUNLIGHT_PEAK = (0.2, 0.3, 0.45, 0.6, 0.8)
SCALE_ZOOM = (1.1, 1.2, 1.35, 1.5, 1.7)
SHEAR_FACTOR = (0.05, 0.1, 0.15, 0.22, 0.3)
ROTATION_DEG = (2.0, 4.0, 7.0, 10.0, 14.0)
BLUR_LENGTH = (3, 5, 7, 9, 12)

FOG_TINT = 0.9
SNOW_ALPHA = 0.7
RAIN_ALPHA = 0.4
RAIN_COLOR = (0.7, 0.75, 0.85)


def validate_image(img) -> np.ndarray:
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("image must be an (H, W, 3) array")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dimensions must be positive")
    if not np.isfinite(arr).all():
        raise ValueError("image values must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image values must lie in [0, 1]")
    return arr


def _sample_bilinear(img: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Bilinear lookup at float pixel coordinates, edges replicated."""
    h, w, _ = img.shape
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[..., None]
    wx = (xs - x0)[..., None]
    top = img[y0, x0] * (1.0 - wx) + img[y0, x1] * wx
    bottom = img[y1, x0] * (1.0 - wx) + img[y1, x1] * wx
    return top * (1.0 - wy) + bottom * wy


def _pixel_grid(shape):
    ys, xs = np.mgrid[0 : shape[0], 0 : shape[1]]
    return ys.astype(float), xs.astype(float)


def _paint_streaks(img, rng, count, alpha, color, length_range, angle_range):
    """Alpha-blend `count` short line segments into the image.

    Each streak consumes exactly four random draws (row-major), so the
    first n streaks are identical across severities sharing a seed.
    Blending the same color k times collapses to the closed form
    c + (1-alpha)^k (p - c), which lets every streak be rasterized in
    one vectorized pass; per-streak duplicate samples are deduplicated
    so oversampling a short streak cannot darken it twice.
    """
    h, w, _ = img.shape
    span = float(min(h, w))
    color = np.asarray(color, dtype=float)
    params = rng.random((count, 4))
    x0 = params[:, 0] * (w - 1)
    y0 = params[:, 1] * (h - 1)
    lengths = (
        length_range[0] + params[:, 2] * (length_range[1] - length_range[0])
    ) * span
    angles = angle_range[0] + params[:, 3] * (angle_range[1] - angle_range[0])
    samples = max(2, int(lengths.max() * 2.0))
    ts = np.linspace(0.0, 1.0, samples)[None, :] * lengths[:, None]
    xs = np.clip(np.round(x0[:, None] + ts * np.cos(angles)[:, None]), 0, w - 1)
    ys = np.clip(np.round(y0[:, None] - ts * np.sin(angles)[:, None]), 0, h - 1)
    streak_ids = np.arange(count)[:, None] * (h * w)
    keys = np.unique(streak_ids + ys.astype(int) * w + xs.astype(int))
    hits = np.bincount(keys % (h * w), minlength=h * w).reshape(h, w)
    factor = (1.0 - alpha) ** hits
    return color + factor[..., None] * (img - color)


def _snow(img, severity, rng):
    return _paint_streaks(
        img,
        rng,
        STREAK_COUNT[severity - 1],
        SNOW_ALPHA,
        (1.0, 1.0, 1.0),
        (0.02, 0.06),
        (0.0, math.pi),
    )


def _rain(img, severity, rng):
    return _paint_streaks(
        img,
        rng,
        STREAK_COUNT[severity - 1],
        RAIN_ALPHA,
        RAIN_COLOR,
        (0.05, 0.1),
        (math.radians(60.0), math.radians(75.0)),
    )


def _fog(img, severity, rng):
    haze = FOG_HAZE[severity - 1]
    return (1.0 - haze) * img + haze * FOG_TINT


def _sunlight(img, severity, rng):
    h, w, _ = img.shape
    cy = (0.05 + 0.45 * rng.random()) * (h - 1)  # upper half of the frame
    cx = rng.random() * (w - 1)
    radius = (0.2 + 0.2 * rng.random()) * min(h, w)
    ys, xs = _pixel_grid(img.shape)
    spot = np.exp(-((ys - cy) ** 2 + (xs - cx) ** 2) / (2.0 * radius**2))
    return img + SUNLIGHT_PEAK[severity - 1] * spot[..., None]


def _uniform_noise(img, severity, rng):
    noise = rng.uniform(-1.0, 1.0, img.shape)
    return img + UNIFORM_HALF_WIDTH[severity - 1] * noise


def _gaussian_noise(img, severity, rng):
    noise = rng.standard_normal(img.shape)
    return img + GAUSSIAN_SIGMA[severity - 1] * noise


def _impulse_noise(img, severity, rng):
    hit = rng.random(img.shape[:2])
    salt = rng.random(img.shape[:2]) < 0.5
    out = img.copy()
    mask = hit < IMPULSE_FRACTION[severity - 1]
    out[mask & salt] = 1.0
    out[mask & ~salt] = 0.0
    return out


def _scale(img, severity, rng):
    zoom = SCALE_ZOOM[severity - 1]
    h, w, _ = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = _pixel_grid(img.shape)
    return _sample_bilinear(img, cy + (ys - cy) / zoom, cx + (xs - cx) / zoom)


def _shear(img, severity, rng):
    factor = SHEAR_FACTOR[severity - 1]
    h, w, _ = img.shape
    cy = (h - 1) / 2.0
    ys, xs = _pixel_grid(img.shape)
    return _sample_bilinear(img, ys, xs - factor * (ys - cy))


def _rotation(img, severity, rng):
    theta = math.radians(ROTATION_DEG[severity - 1])
    h, w, _ = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = _pixel_grid(img.shape)
    rel_y, rel_x = ys - cy, xs - cx
    src_x = cx + math.cos(theta) * rel_x + math.sin(theta) * rel_y
    src_y = cy - math.sin(theta) * rel_x + math.cos(theta) * rel_y
    return _sample_bilinear(img, src_y, src_x)


def _motion_blur(img, severity, rng):
    length = BLUR_LENGTH[severity - 1]
    angle = rng.random() * math.pi
    ys, xs = _pixel_grid(img.shape)
    offsets = np.linspace(-(length - 1) / 2.0, (length - 1) / 2.0, length)
    acc = np.zeros_like(img)
    for t in offsets:
        acc += _sample_bilinear(img, ys + t * math.sin(angle), xs + t * math.cos(angle))
    return acc / length


_APPLIERS = {
    CorruptionKind.SNOW: _snow,
    CorruptionKind.RAIN: _rain,
    CorruptionKind.FOG: _fog,
    CorruptionKind.SUNLIGHT: _sunlight,
    CorruptionKind.UNIFORM_NOISE: _uniform_noise,
    CorruptionKind.GAUSSIAN_NOISE: _gaussian_noise,
    CorruptionKind.IMPULSE_NOISE: _impulse_noise,
    CorruptionKind.SCALE: _scale,
    CorruptionKind.SHEAR: _shear,
    CorruptionKind.ROTATION: _rotation,
    CorruptionKind.MOTION_BLUR: _motion_blur,
}


def corrupt(img, kind, severity: int, seed: int = 0) -> np.ndarray:
    """Apply one corruption kind at the given severity.

    Severity 0 returns a copy of the input unchanged; outputs are
    clamped back to [0, 1]. Stochastic kinds are deterministic given
    the seed.
    """
    arr = validate_image(img)
    if not isinstance(severity, (int, np.integer)) or isinstance(severity, bool):
        raise ValueError("severity must be an integer in 0..5")
    if not 0 <= severity <= 5:
        raise ValueError(f"severity {severity} outside 0..5")
    kind = CorruptionKind(kind)
    if severity == 0:
        return arr.copy()
    rng = np.random.default_rng(seed)
    out = _APPLIERS[kind](arr, int(severity), rng)
    return np.clip(out, 0.0, 1.0)
