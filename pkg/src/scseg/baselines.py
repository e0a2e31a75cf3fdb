"""Reference segmenters for comparison: two-means clustering and color counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlockRegion, SegConfig, SegmentationMask, YCbCrImage
from .io import ycbcr_to_rgb_array
from .pipeline import pad_image, tile_regions


@dataclass(frozen=True, eq=False)
class KMeans2Result:
    background_color: float
    foreground_color: float
    # True where a value joined the foreground centroid
    assignment: np.ndarray
    iterations: int = 0

    def inertia(self, values):
        values = np.asarray(values, dtype=np.float64)
        centers = np.where(self.assignment, self.foreground_color, self.background_color)
        return float(((values - centers) ** 2).sum())


def kmeans2(values, init_bg, init_fg, max_iter=50, history=None):
    """Lloyd's algorithm with two 1-D centroids.

    Ties go to the background centroid and an empty cluster keeps its
    previous centroid. Stops once assignments stop changing.
    """
    x = np.asarray(values, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError("kmeans2 needs at least one value")
    bg, fg = float(init_bg), float(init_fg)
    assign = np.abs(x - fg) < np.abs(x - bg)
    it = 0
    for it in range(1, max_iter + 1):
        if history is not None:
            history.append(KMeans2Result(bg, fg, assign).inertia(x))
        if (~assign).any():
            bg = float(x[~assign].mean())
        if assign.any():
            fg = float(x[assign].mean())
        new = np.abs(x - fg) < np.abs(x - bg)
        if history is not None:
            history.append(KMeans2Result(bg, fg, assign).inertia(x))
        if np.array_equal(new, assign):
            break
        assign = new
    return KMeans2Result(bg, fg, assign, it)


def _djvu_block(luma, region, bg, fg, cfg, out):
    block = luma[region.slices].astype(np.float64)
    if bg is None:
        lo, hi = float(block.min()), float(block.max())
        bg, fg = hi, lo
    if bg == fg:
        res = KMeans2Result(bg, fg, np.zeros(block.size, dtype=bool))
    else:
        res = kmeans2(block.ravel(), bg, fg)
    if region.size > cfg.block_size_min:
        for q in region.quadrants():
            _djvu_block(luma, q, res.background_color, res.foreground_color, cfg, out)
        return
    # Smallest level: the sparser cluster is text; ties go to the darker one.
    n_fg = int(res.assignment.sum())
    n_bg = res.assignment.size - n_fg
    if n_fg < n_bg:
        fg_mask = res.assignment
    elif n_bg < n_fg:
        fg_mask = ~res.assignment
    else:
        fg_mask = res.assignment if res.foreground_color <= res.background_color else ~res.assignment
    out[region.slices] = fg_mask.reshape(block.shape)


def djvu_segment(image: YCbCrImage, cfg: SegConfig = None) -> SegmentationMask:
    """Multiresolution two-means labeling of luma.

    Blocks from `block_size_max` down to `block_size_min` are clustered, each
    level seeded with its parent's centroids; the top level starts from the
    block's brightest (background) and darkest (foreground) values.
    """
    cfg = cfg or SegConfig()
    ph, pw, tiles = tile_regions(image.height, image.width, cfg)
    luma = pad_image(image, ph, pw).y.samples
    out = np.zeros((ph, pw), dtype=bool)
    for region in tiles:
        _djvu_block(luma, region, None, None, cfg, out)
    return SegmentationMask(out[:image.height, :image.width])


def count_colors(block_rgb):
    return len(np.unique(block_rgb.reshape(-1, 3), axis=0))


def shape_primitives(block_rgb):
    """Greedy raster-order extraction of constant-color shape primitives.

    Rectangles at least 2x2 are taken first, then horizontal and vertical
    runs of length two or more. Returns an int array of primitive ids (-1 for
    pixels left in no primitive) and the list of primitive sizes.
    """
    h, w, _ = block_rgb.shape
    code = (block_rgb[..., 0].astype(np.int64) << 16) | (block_rgb[..., 1].astype(np.int64) << 8) \
        | block_rgb[..., 2].astype(np.int64)
    ids = np.full((h, w), -1, dtype=np.int64)
    sizes = []

    def free_run(y, x):
        c = code[y, x]
        n = 0
        while x + n < w and ids[y, x + n] < 0 and code[y, x + n] == c:
            n += 1
        return n

    for y in range(h):
        for x in range(w):
            if ids[y, x] >= 0:
                continue
            width = free_run(y, x)
            if width < 2:
                continue
            height = 1
            while y + height < h and free_run(y + height, x) >= width \
                    and code[y + height, x] == code[y, x]:
                height += 1
            if height >= 2:
                ids[y:y + height, x:x + width] = len(sizes)
                sizes.append(width * height)
    for y in range(h):
        x = 0
        while x < w:
            n = free_run(y, x) if ids[y, x] < 0 else 0
            if n >= 2:
                ids[y, x:x + n] = len(sizes)
                sizes.append(n)
                x += n
            else:
                x += 1
    for x in range(w):
        y = 0
        while y < h:
            n = 0
            if ids[y, x] < 0:
                c = code[y, x]
                while y + n < h and ids[y + n, x] < 0 and code[y + n, x] == c:
                    n += 1
            if n >= 2:
                ids[y:y + n, x] = len(sizes)
                sizes.append(n)
                y += n
            else:
                y += 1
    return ids, sizes


def _spec_block(block_rgb, cfg):
    h, w, _ = block_rgb.shape
    if count_colors(block_rgb) > cfg.spec_color_threshold:
        ids, sizes = shape_primitives(block_rgb)
        small = np.array([s <= cfg.spec_primitive_size for s in sizes] + [False])
        return small[ids]  # id -1 indexes the trailing False
    colors, inverse, counts = np.unique(block_rgb.reshape(-1, 3), axis=0,
                                        return_inverse=True, return_counts=True)
    dominant = colors[np.argmax(counts)].astype(np.float64)
    dist = np.sqrt(((colors.astype(np.float64) - dominant) ** 2).sum(axis=1))
    return (dist >= cfg.spec_color_distance)[inverse.reshape(-1)].reshape(h, w)


def spec_segment(image: YCbCrImage, cfg: SegConfig = None) -> SegmentationMask:
    """Color-count block classification followed by per-class labeling.

    Blocks with more distinct RGB colors than the threshold are pictorial:
    small constant-color shape primitives inside them become foreground.
    Other blocks keep the most frequent color and colors within the RGB
    distance bound as background and mark everything else foreground.
    """
    cfg = cfg or SegConfig()
    rgb = image.rgb if image.rgb is not None else ycbcr_to_rgb_array(image)
    s = cfg.spec_block_size
    ph = -(-image.height // s) * s
    pw = -(-image.width // s) * s
    rgb = np.pad(rgb, ((0, ph - image.height), (0, pw - image.width), (0, 0)), mode="edge")
    out = np.zeros((ph, pw), dtype=bool)
    for y0 in range(0, ph, s):
        for x0 in range(0, pw, s):
            r = BlockRegion(x0, y0, s)
            out[r.slices] = _spec_block(rgb[r.slices], cfg)
    return SegmentationMask(out[:image.height, :image.width])
