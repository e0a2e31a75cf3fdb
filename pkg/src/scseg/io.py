"""PNG loading and saving plus full-range BT.601 color conversion."""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import PixelPlane, ScsegError, SegmentationMask, YCbCrImage


class ImageIOError(ScsegError, OSError):
    """A file could not be found, read or written."""


class UnsupportedFormatError(ScsegError, ValueError):
    """The file decodes but is not an 8-bit gray or RGB raster."""


def _round_clamp(x):
    return np.clip(np.floor(np.asarray(x, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def rgb_to_ycbcr_array(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return _round_clamp(y), _round_clamp(cb), _round_clamp(cr)


def rgb_to_ycbcr(r, g, b):
    """Full-range BT.601 conversion of one 8-bit RGB triple, rounded half up.

    >>> rgb_to_ycbcr(255, 0, 0)
    (76, 85, 255)
    """
    y, cb, cr = rgb_to_ycbcr_array(np.array([r, g, b], dtype=np.float64))
    return int(y), int(cb), int(cr)


def ycbcr_to_rgb_array(image: YCbCrImage):
    y = image.y.samples.astype(np.float64)
    cb = image.cb.samples.astype(np.float64) - 128.0
    cr = image.cr.samples.astype(np.float64) - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return np.stack([_round_clamp(r), _round_clamp(g), _round_clamp(b)], axis=-1)


def image_from_rgb(rgb) -> YCbCrImage:
    rgb = np.asarray(rgb, dtype=np.uint8)
    y, cb, cr = rgb_to_ycbcr_array(rgb)
    return YCbCrImage(PixelPlane(y), PixelPlane(cb), PixelPlane(cr), rgb=rgb)


def _open(path):
    if not os.path.exists(path):
        raise ImageIOError(f"no such file: {path}")
    try:
        img = Image.open(path)
        img.load()
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(f"cannot decode {path}: {exc}") from exc
    except OSError as exc:
        raise ImageIOError(f"cannot read {path}: {exc}") from exc
    return img


def load_image(path) -> YCbCrImage:
    """Read an 8-bit grayscale or RGB raster; gray maps to Y with neutral chroma."""
    img = _open(path)
    mode = img.mode
    if mode == "P":
        if "transparency" in img.info:
            raise UnsupportedFormatError(f"{path}: alpha channels are not supported")
        img, mode = img.convert("RGB"), "RGB"
    if mode in ("L", "1"):
        return YCbCrImage.from_gray(np.asarray(img.convert("L"), dtype=np.uint8))
    if mode == "RGB":
        return image_from_rgb(np.asarray(img, dtype=np.uint8))
    raise UnsupportedFormatError(
        f"{path}: unsupported pixel mode {mode!r}; need 8-bit gray or RGB")


def load_mask(path) -> SegmentationMask:
    img = _open(path)
    if img.mode not in ("L", "1", "P", "RGB"):
        raise UnsupportedFormatError(f"{path}: unsupported mask mode {img.mode!r}")
    return SegmentationMask(np.asarray(img.convert("L")) > 127)


def _save(arr, path):
    try:
        Image.fromarray(arr).save(path, format="PNG")
    except (OSError, ValueError) as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def write_mask(mask: SegmentationMask, path):
    """Save as 8-bit gray PNG with foreground 255 and background 0."""
    _save(np.where(mask.labels, 255, 0).astype(np.uint8), path)


def write_image(image: YCbCrImage, path):
    """Save as gray PNG when both chroma planes are neutral, else as RGB."""
    if np.all(image.cb.samples == 128) and np.all(image.cr.samples == 128):
        _save(np.ascontiguousarray(image.y.samples), path)
    else:
        rgb = image.rgb if image.rgb is not None else ycbcr_to_rgb_array(image)
        _save(np.ascontiguousarray(rgb), path)
