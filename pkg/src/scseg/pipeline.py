"""Hierarchical block segmentation of screen content into smooth background and text.

Each block goes through, in order: a flat-block test resolved against the
background colors of already-labeled neighbors, a least-squares smoothness
test, and a least-absolute-deviation fit whose per-pixel errors label the
pixels. Blocks whose LAD fit explains too few pixels are split into four
quadrants down to the minimum block size. A final pass per top-level block
refits each chroma plane on the background pixels and moves pixels with large
chroma error to the foreground.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import (BlockRegion, BoundsError, PixelPlane, SegConfig, SegmentationMask,
                   YCbCrImage, vectorize_block)
from .dictionary import build_dictionary
from .solvers import lad_fit_admm, least_squares_fit, masked_least_squares_fit


class Layer(enum.Enum):
    BACKGROUND = "background"
    FOREGROUND = "foreground"


class DecisionKind(enum.Enum):
    FLAT_BACKGROUND = "FlatBackground"
    FLAT_FOREGROUND = "FlatForeground"
    SMOOTH_BACKGROUND = "SmoothBackground"
    LAD_CLASSIFIED = "LadClassified"
    SUBDIVIDED = "Subdivided"


@dataclass(frozen=True)
class NeighborContext:
    """Background colors (mean background luma, rounded) of causal neighbors."""

    left: Optional[int] = None
    top: Optional[int] = None
    top_left: Optional[int] = None
    top_right: Optional[int] = None

    def colors(self):
        return [c for c in (self.left, self.top, self.top_left, self.top_right)
                if c is not None]


@dataclass(eq=False)
class BlockDecision:
    kind: DecisionKind
    region: BlockRegion
    mask: SegmentationMask
    background_fraction: float
    children: tuple = ()

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self):
        return [d for d in self.walk() if not d.children]


@dataclass
class Telemetry:
    """Counters and the decision trail collected while segmenting."""

    lad_calls: int = 0
    ls_calls: int = 0
    chroma_refined_blocks: int = 0
    chroma_skipped_blocks: int = 0
    decisions: List[tuple] = field(default_factory=list)

    def record(self, kind, region):
        self.decisions.append((kind, region.x0, region.y0, region.size))

    def kinds(self):
        return [d[0] for d in self.decisions]

    def sizes(self, kind=None):
        return sorted({d[3] for d in self.decisions if kind is None or d[0] is kind})

    def merge(self, other):
        self.lad_calls += other.lad_calls
        self.ls_calls += other.ls_calls
        self.chroma_refined_blocks += other.chroma_refined_blocks
        self.chroma_skipped_blocks += other.chroma_skipped_blocks
        self.decisions.extend(other.decisions)


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def check_flat(vec):
    """Shared value of a block whose samples are all equal, else None."""
    vec = np.asarray(vec).reshape(-1)
    if vec.size == 0:
        raise ValueError("empty block")
    first = vec[0]
    if np.all(vec == first):
        return first.item()
    return None


def classify_flat(color, ctx: NeighborContext, eps2) -> Layer:
    colors = ctx.colors()
    if not colors:
        return Layer.BACKGROUND
    if any(abs(color - b) < eps2 for b in colors):
        return Layer.BACKGROUND
    return Layer.FOREGROUND


def try_smooth_background(vec, d, eps3):
    fit = least_squares_fit(d, vec)
    if fit.max_abs_residual < eps3:
        return fit.model
    return None


def lad_classify(vec, d, eps1, rho=1.0, iterations=200, early_stop=False):
    """Label pixels by their LAD fit error; returns (block mask, background fraction)."""
    fit = lad_fit_admm(d, vec, rho=rho, iterations=iterations, early_stop=early_stop)
    background = np.abs(fit.residuals) < eps1
    fg = ~background.reshape((d.block_size, d.block_size), order="F")
    return SegmentationMask(fg), float(background.mean())


class _LabelState:
    """Labels written so far, used to derive neighbor background colors."""

    def __init__(self, luma):
        self.luma = np.asarray(luma)
        self.labels = np.zeros(self.luma.shape, dtype=bool)
        self.done = np.zeros(self.luma.shape, dtype=bool)

    def write(self, region, fg):
        self.labels[region.slices] = fg
        self.done[region.slices] = True

    def background_color(self, x0, y0, size):
        h, w = self.luma.shape
        xa, ya = max(x0, 0), max(y0, 0)
        xb, yb = min(x0 + size, w), min(y0 + size, h)
        if xa >= xb or ya >= yb:
            return None
        sel = self.done[ya:yb, xa:xb] & ~self.labels[ya:yb, xa:xb]
        if not sel.any():
            return None
        return _round_half_up(float(self.luma[ya:yb, xa:xb][sel].astype(np.float64).mean()))

    def context(self, region) -> NeighborContext:
        s, x, y = region.size, region.x0, region.y0
        return NeighborContext(
            left=self.background_color(x - s, y, s),
            top=self.background_color(x, y - s, s),
            top_left=self.background_color(x - s, y - s, s),
            top_right=self.background_color(x + s, y - s, s),
        )


# A plan holds everything about a block that does not depend on neighbors:
# flatness, the smoothness test, LAD labels and the subdivision tree.
@dataclass(eq=False)
class _Plan:
    region: BlockRegion
    kind: str  # "flat" | "smooth" | "lad" | "split"
    color: object = None
    fg: Optional[np.ndarray] = None
    fraction: float = 0.0
    children: tuple = ()
    lad_calls: int = 0
    ls_calls: int = 0


def _plan_block(luma, region, cfg):
    vec = vectorize_block(luma, region)
    flat = check_flat(vec)
    if flat is not None:
        return _Plan(region, "flat", color=flat)
    d = build_dictionary(region.size, cfg.num_bases)
    if try_smooth_background(vec, d, cfg.eps3) is not None:
        return _Plan(region, "smooth", ls_calls=1)
    mask, fraction = lad_classify(vec, d, cfg.eps1, cfg.rho, cfg.admm_iterations,
                                  cfg.admm_early_stop)
    if fraction > cfg.eps4 or region.size <= cfg.block_size_min:
        return _Plan(region, "lad", fg=np.array(mask.labels), fraction=fraction,
                     lad_calls=1, ls_calls=1)
    children = tuple(_plan_block(luma, q, cfg) for q in region.quadrants())
    return _Plan(region, "split", fraction=fraction, children=children,
                 lad_calls=1 + sum(c.lad_calls for c in children),
                 ls_calls=1 + sum(c.ls_calls for c in children))


def _resolve(plan, ctx, state, cfg, telemetry):
    region = plan.region
    size = region.size
    if plan.kind == "flat":
        layer = classify_flat(plan.color, ctx, cfg.eps2)
        is_fg = layer is Layer.FOREGROUND
        kind = DecisionKind.FLAT_FOREGROUND if is_fg else DecisionKind.FLAT_BACKGROUND
        fg = np.full((size, size), is_fg)
        fraction = 0.0 if is_fg else 1.0
    elif plan.kind == "smooth":
        kind, fg, fraction = DecisionKind.SMOOTH_BACKGROUND, np.zeros((size, size), bool), 1.0
    elif plan.kind == "lad":
        kind, fg, fraction = DecisionKind.LAD_CLASSIFIED, plan.fg, plan.fraction
    else:
        telemetry.record(DecisionKind.SUBDIVIDED, region)
        children = []
        for child in plan.children:
            children.append(_resolve(child, state.context(child.region), state, cfg, telemetry))
        fg = state.labels[region.slices].copy()
        return BlockDecision(DecisionKind.SUBDIVIDED, region, SegmentationMask(fg),
                             float(1.0 - fg.mean()), tuple(children))
    state.write(region, fg)
    telemetry.record(kind, region)
    return BlockDecision(kind, region, SegmentationMask(fg), fraction)


def _check_region(image, region, cfg):
    if not region.inside(image.height, image.width):
        raise BoundsError(f"block {region} lies outside the {image.width}x{image.height} image")
    if not (cfg.block_size_min <= region.size <= cfg.block_size_max):
        raise ValueError(f"block size {region.size} outside "
                         f"[{cfg.block_size_min}, {cfg.block_size_max}]")


def segment_block(image: YCbCrImage, region: BlockRegion, ctx: NeighborContext = None,
                  cfg: SegConfig = None, state=None, telemetry=None) -> BlockDecision:
    """Segment one block by luma, recursing into quadrants when needed.

    Quadrants take their neighbor context from labels already written to
    `state`; a fresh state is used when none is given, so only earlier
    siblings count as neighbors.
    """
    cfg = cfg or SegConfig()
    ctx = ctx or NeighborContext()
    _check_region(image, region, cfg)
    if state is None:
        state = _LabelState(image.y.samples)
    telemetry = telemetry if telemetry is not None else Telemetry()
    plan = _plan_block(image.y.samples, region, cfg)
    telemetry.lad_calls += plan.lad_calls
    telemetry.ls_calls += plan.ls_calls
    return _resolve(plan, ctx, state, cfg, telemetry)


def chroma_refine(image: YCbCrImage, region: BlockRegion, mask: SegmentationMask, d, eps1,
                  telemetry=None) -> SegmentationMask:
    """Move background pixels with chroma fit error above eps1 to the foreground.

    Each chroma plane gets a least-squares model fit only to the current
    background pixels. Blocks with fewer background pixels than bases are
    returned unchanged.
    """
    fg = np.asarray(mask.labels, dtype=bool)
    if fg.shape != (region.size, region.size):
        raise ValueError("mask does not cover the region")
    keep = ~fg.ravel(order="F")
    if keep.sum() < d.num_bases:
        if telemetry is not None:
            telemetry.chroma_skipped_blocks += 1
        return SegmentationMask(fg)
    flip = np.zeros_like(keep)
    for plane in (image.cb, image.cr):
        fit = masked_least_squares_fit(d, vectorize_block(plane, region), keep)
        flip |= keep & (np.abs(fit.residuals) > eps1)
    if telemetry is not None:
        telemetry.chroma_refined_blocks += 1
    return SegmentationMask(fg | flip.reshape(fg.shape, order="F"))


def _segments(length, cfg):
    """Split a 1-D extent into power-of-two pieces; the tail is padded to the minimum."""
    out = []
    pos = 0
    while length - pos >= cfg.block_size_max:
        out.append((pos, cfg.block_size_max))
        pos += cfg.block_size_max
    s = cfg.block_size_max // 2
    while s >= cfg.block_size_min:
        if length - pos >= s:
            out.append((pos, s))
            pos += s
        s //= 2
    if pos < length:
        out.append((pos, cfg.block_size_min))
        pos += cfg.block_size_min
    return out, pos


def tile_regions(height, width, cfg: SegConfig):
    """Top-level square tiles covering an image, in processing order.

    Full `block_size_max` tiles are laid first; the right and bottom
    remainders are covered by smaller power-of-two squares. A remainder
    narrower than `block_size_min` becomes one minimum-size strip reaching
    past the image edge. Returns (padded_height, padded_width, regions).
    """
    rows, ph = _segments(height, cfg)
    cols, pw = _segments(width, cfg)
    regions = []
    for y0, h in rows:
        for x0, w in cols:
            s = min(h, w)
            for yy in range(y0, y0 + h, s):
                for xx in range(x0, x0 + w, s):
                    regions.append(BlockRegion(xx, yy, s))
    return ph, pw, regions


def pad_image(image: YCbCrImage, height, width) -> YCbCrImage:
    """Extend an image to (height, width) by replicating its last row and column."""
    dh, dw = height - image.height, width - image.width
    if dh == 0 and dw == 0:
        return image
    pad = lambda a: np.pad(a, ((0, dh), (0, dw)), mode="edge")
    rgb = None
    if image.rgb is not None:
        rgb = np.pad(image.rgb, ((0, dh), (0, dw), (0, 0)), mode="edge")
    return YCbCrImage(PixelPlane(pad(image.y.samples)), PixelPlane(pad(image.cb.samples)),
                      PixelPlane(pad(image.cr.samples)), rgb=rgb)


def segment_image(image: YCbCrImage, cfg: SegConfig = None, threads=1,
                  telemetry: Telemetry = None) -> SegmentationMask:
    """Foreground mask for a whole image.

    Per-block model fitting runs on `threads` workers; labeling, neighbor
    resolution and chroma refinement then proceed sequentially in tile
    order, so the output does not depend on the thread count.
    """
    cfg = cfg or SegConfig()
    if image.height == 0 or image.width == 0:
        raise ValueError("empty image")
    ph, pw, tiles = tile_regions(image.height, image.width, cfg)
    work = pad_image(image, ph, pw)
    luma = work.y.samples
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            plans = list(pool.map(lambda r: _plan_block(luma, r, cfg), tiles))
    else:
        plans = [_plan_block(luma, r, cfg) for r in tiles]

    tel = Telemetry()
    state = _LabelState(luma)
    for plan in plans:
        region = plan.region
        tel.lad_calls += plan.lad_calls
        tel.ls_calls += plan.ls_calls
        decision = _resolve(plan, state.context(region), state, cfg, tel)
        if cfg.enable_chroma_refine:
            d = build_dictionary(region.size, cfg.num_bases)
            refined = chroma_refine(work, region, decision.mask, d, cfg.eps1, tel)
            state.write(region, refined.labels)
    if telemetry is not None:
        telemetry.merge(tel)
    return SegmentationMask(state.labels[:image.height, :image.width])
