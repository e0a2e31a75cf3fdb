"""Domain types shared by the segmenters: sample planes, blocks, masks, config."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np


class ScsegError(Exception):
    """Base class for errors raised by this package."""


class InvalidConfigError(ScsegError, ValueError):
    pass


class BoundsError(ScsegError, IndexError):
    pass


class DimensionMismatchError(ScsegError, ValueError):
    pass


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def _as_u8_plane(samples, name="samples"):
    arr = np.asarray(samples)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if arr.dtype != np.uint8:
        if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 255:
            raise ValueError(f"{name} must hold 8-bit intensities in [0, 255]")
        if not np.all(arr == np.round(arr)):
            raise ValueError(f"{name} must hold integer intensities")
    arr = np.array(arr, dtype=np.uint8, order="C")  # private copy
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PixelPlane:
    """One 8-bit sample plane, stored row-major as a (height, width) array."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_u8_plane(self.samples))

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    def __eq__(self, other):
        return isinstance(other, PixelPlane) and np.array_equal(self.samples, other.samples)


@dataclass(frozen=True, eq=False)
class YCbCrImage:
    y: PixelPlane
    cb: PixelPlane
    cr: PixelPlane
    # original RGB samples, kept for the color-counting baseline
    rgb: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("y", "cb", "cr"):
            plane = getattr(self, name)
            if not isinstance(plane, PixelPlane):
                object.__setattr__(self, name, PixelPlane(plane))
        shape = self.y.samples.shape
        if self.cb.samples.shape != shape or self.cr.samples.shape != shape:
            raise DimensionMismatchError("Y, Cb and Cr planes must share dimensions")
        if self.rgb is not None:
            rgb = np.array(self.rgb, dtype=np.uint8, order="C")
            if rgb.shape != shape + (3,):
                raise DimensionMismatchError(
                    f"RGB array shape {rgb.shape} does not match planes {shape}")
            rgb.setflags(write=False)
            object.__setattr__(self, "rgb", rgb)

    @classmethod
    def from_gray(cls, gray):
        y = PixelPlane(gray)
        neutral = np.full(y.samples.shape, 128, dtype=np.uint8)
        rgb = np.repeat(y.samples[:, :, None], 3, axis=2)
        return cls(y, PixelPlane(neutral), PixelPlane(neutral), rgb=rgb)

    @property
    def height(self) -> int:
        return self.y.height

    @property
    def width(self) -> int:
        return self.y.width

    @property
    def shape(self):
        return self.y.samples.shape


@dataclass(frozen=True)
class BlockRegion:
    x0: int
    y0: int
    size: int

    def __post_init__(self):
        if self.x0 < 0 or self.y0 < 0:
            raise BoundsError(f"negative block offset ({self.x0}, {self.y0})")
        if not _is_pow2(self.size):
            raise ValueError(f"block size must be a power of two, got {self.size}")

    @property
    def slices(self):
        return (slice(self.y0, self.y0 + self.size), slice(self.x0, self.x0 + self.size))

    def inside(self, height, width):
        return self.x0 + self.size <= width and self.y0 + self.size <= height

    def quadrants(self):
        """The four half-size sub-blocks in Z order (TL, TR, BL, BR)."""
        h = self.size // 2
        return [
            BlockRegion(self.x0, self.y0, h),
            BlockRegion(self.x0 + h, self.y0, h),
            BlockRegion(self.x0, self.y0 + h, h),
            BlockRegion(self.x0 + h, self.y0 + h, h),
        ]


@dataclass(frozen=True, eq=False)
class SmoothModel:
    coefficients: np.ndarray
    block_size: int

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=np.float64).reshape(-1)
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def num_bases(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True, eq=False)
class SegmentationMask:
    """Per-pixel layer labels, (height, width) booleans with True = foreground."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise ValueError(f"mask labels must be 2-D, got shape {labels.shape}")
        labels = np.array(labels, dtype=bool, order="C")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self):
        return self.labels.shape

    def foreground_fraction(self) -> float:
        return float(self.labels.mean())

    def __eq__(self, other):
        return isinstance(other, SegmentationMask) and np.array_equal(self.labels, other.labels)


@dataclass(frozen=True)
class SegConfig:
    """Thresholds and solver settings. Intensity thresholds are on the 8-bit scale.

    Defaults reproduce the published configuration: 64 px top-level blocks,
    ten cosine bases, eps1=eps2=10, eps3=3, eps4=0.5, rho=1 and 200 ADMM
    iterations.
    """

    block_size_max: int = 64
    block_size_min: int = 8
    num_bases: int = 10
    eps1: float = 10.0
    eps2: float = 10.0
    eps3: float = 3.0
    eps4: float = 0.5
    rho: float = 1.0
    admm_iterations: int = 200
    enable_chroma_refine: bool = True
    admm_early_stop: bool = False
    # color-counting baseline
    spec_block_size: int = 16
    spec_color_threshold: int = 32
    spec_primitive_size: int = 50
    spec_color_distance: float = 10.0

    def __post_init__(self):
        if not (_is_pow2(self.block_size_max) and _is_pow2(self.block_size_min)):
            raise InvalidConfigError("block sizes must be powers of two")
        if self.block_size_min > self.block_size_max:
            raise InvalidConfigError("block_size_min exceeds block_size_max")
        if self.num_bases < 1 or self.num_bases > self.block_size_min ** 2:
            raise InvalidConfigError(
                f"num_bases must lie in [1, {self.block_size_min ** 2}], got {self.num_bases}")
        for name in ("eps1", "eps2", "eps3"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidConfigError(f"{name} must be a finite nonnegative value")
        if not (0.0 <= self.eps4 <= 1.0):
            raise InvalidConfigError("eps4 must lie in [0, 1]")
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise InvalidConfigError("rho must be positive")
        if self.admm_iterations < 1:
            raise InvalidConfigError("admm_iterations must be at least 1")
        if not _is_pow2(self.spec_block_size):
            raise InvalidConfigError("spec_block_size must be a power of two")
        if self.spec_color_threshold < 1 or self.spec_primitive_size < 1:
            raise InvalidConfigError("color-counting thresholds must be positive")

    def block_sizes(self):
        """Quadtree levels from the largest block down to the smallest."""
        sizes = []
        s = self.block_size_max
        while s >= self.block_size_min:
            sizes.append(s)
            s //= 2
        return sizes

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def vectorize_block(plane, region: BlockRegion) -> np.ndarray:
    """Flatten a square block into a float vector by concatenating its columns.

    >>> plane = PixelPlane(np.array([[1, 2], [3, 4]]))
    >>> vectorize_block(plane, BlockRegion(0, 0, 2)).tolist()
    [1.0, 3.0, 2.0, 4.0]
    """
    samples = plane.samples if isinstance(plane, PixelPlane) else np.asarray(plane)
    h, w = samples.shape
    if not region.inside(h, w):
        raise BoundsError(
            f"block at ({region.x0}, {region.y0}) size {region.size} exceeds {w}x{h} plane")
    return samples[region.slices].astype(np.float64).ravel(order="F")


def unvectorize_block(vec, size: int) -> np.ndarray:
    vec = np.asarray(vec)
    if vec.size != size * size:
        raise DimensionMismatchError(f"vector of length {vec.size} is not a {size}x{size} block")
    return vec.reshape((size, size), order="F")
