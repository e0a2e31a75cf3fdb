"""Synthetic screen-content pages with exact foreground ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PixelPlane, SegConfig, SegmentationMask, YCbCrImage
from .dictionary import build_dictionary
from .pipeline import tile_regions

BACKGROUND_KINDS = ("dct_random", "flat", "two_region")
FOREGROUND_KINDS = ("rect_text_strokes", "lines")


@dataclass(frozen=True)
class SynthSpec:
    width: int = 256
    height: int = 256
    background_kind: str = "dct_random"
    foreground_kind: str = "rect_text_strokes"
    fg_luma_offset: int = 60
    fg_coverage: float = 0.1
    seed: int = 0
    # added to Cb at foreground pixels; 0 keeps chroma neutral
    fg_chroma_offset: int = 0
    block_size: int = 64
    num_bases: int = 10
    ac_amplitude: float = 700.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("page must be nonempty")
        if self.background_kind not in BACKGROUND_KINDS:
            raise ValueError(f"background_kind must be one of {BACKGROUND_KINDS}")
        if self.foreground_kind not in FOREGROUND_KINDS:
            raise ValueError(f"foreground_kind must be one of {FOREGROUND_KINDS}")
        if not (0.0 <= self.fg_coverage <= 0.5):
            raise ValueError("fg_coverage must lie in [0, 0.5]")
        if not (0 <= self.fg_luma_offset <= 127):
            raise ValueError("fg_luma_offset must lie in [0, 127]")
        if not (-127 <= self.fg_chroma_offset <= 127):
            raise ValueError("fg_chroma_offset must lie in [-127, 127]")
        if self.fg_coverage > 0 and self.fg_luma_offset == 0 and self.fg_chroma_offset == 0:
            raise ValueError("foreground needs a luma or chroma offset")


def _dct_background(spec, rng):
    cfg = SegConfig(block_size_max=spec.block_size, block_size_min=min(8, spec.block_size),
                    num_bases=min(spec.num_bases, min(8, spec.block_size) ** 2))
    ph, pw, tiles = tile_regions(spec.height, spec.width, cfg)
    out = np.zeros((ph, pw))
    for region in tiles:
        n = region.size
        d = build_dictionary(n, spec.num_bases)
        mean = rng.uniform(70.0, 185.0)
        # AC amplitude is tied to the block's basis scale so small edge tiles vary alike
        ac = rng.uniform(-1.0, 1.0, spec.num_bases - 1) * spec.ac_amplitude * (n / 64.0)
        ac_part = d.matrix[:, 1:] @ ac
        lo, hi = mean + ac_part.min(), mean + ac_part.max()
        if lo < 0.5 or hi > 254.5:
            scale = min((mean - 0.5) / max(mean - lo, 1e-9), (254.5 - mean) / max(hi - mean, 1e-9))
            ac_part = ac_part * scale
        block = (mean + ac_part).reshape((n, n), order="F")
        out[region.slices] = block
    return out[:spec.height, :spec.width]


def _background(spec, rng):
    if spec.background_kind == "dct_random":
        return _dct_background(spec, rng)
    if spec.background_kind == "flat":
        return np.full((spec.height, spec.width), float(rng.integers(40, 216)))
    a, b = rng.choice(np.arange(40, 216), size=2, replace=False)
    split = int(rng.integers(1, spec.width)) if spec.width > 1 else 1
    bg = np.full((spec.height, spec.width), float(a))
    bg[:, split:] = float(b)
    return bg


def _strokes(spec, rng):
    """Yield (y0, y1, x0, x1) rectangles forming glyph-like clusters or long lines."""
    h, w = spec.height, spec.width
    while True:
        if spec.foreground_kind == "lines":
            t = int(rng.integers(1, 3))
            if rng.random() < 0.5:
                length = int(rng.integers(min(20, w), w + 1))
                y, x = int(rng.integers(0, h)), int(rng.integers(0, w - length + 1))
                yield [(y, y + t, x, x + length)]
            else:
                length = int(rng.integers(min(20, h), h + 1))
                y, x = int(rng.integers(0, h - length + 1)), int(rng.integers(0, w))
                yield [(y, y + length, x, x + t)]
            continue
        # a glyph: a few thin bars inside a small box
        gh, gw = int(rng.integers(7, 12)), int(rng.integers(5, 9))
        gy, gx = int(rng.integers(0, max(h - gh, 0) + 1)), int(rng.integers(0, max(w - gw, 0) + 1))
        bars = []
        for _ in range(int(rng.integers(2, 4))):
            t = int(rng.integers(1, 3))
            if rng.random() < 0.5:
                y = gy + int(rng.integers(0, gh))
                bars.append((y, y + t, gx, gx + gw))
            else:
                x = gx + int(rng.integers(0, gw))
                bars.append((gy, gy + gh, x, x + t))
        yield bars


def generate(spec: SynthSpec):
    """Render a page; returns (image, ground-truth mask). Deterministic in the seed.

    Foreground pixels carry the background value shifted by the luma offset,
    upward unless that would leave [0, 255] for some pixel of the stroke.
    """
    rng = np.random.default_rng(spec.seed)
    bg = _background(spec, rng)
    bg_u8 = np.clip(np.floor(bg + 0.5), 0, 255).astype(np.int64)
    h, w = bg_u8.shape
    gt = np.zeros((h, w), dtype=bool)
    sign = np.zeros((h, w), dtype=np.int64)
    target = int(round(spec.fg_coverage * h * w))
    covered = 0
    if target > 0:
        for bars in _strokes(spec, rng):
            for y0, y1, x0, x1 in bars:
                y1, x1 = min(y1, h), min(x1, w)
                patch = bg_u8[y0:y1, x0:x1]
                s = 1 if patch.max() + spec.fg_luma_offset <= 255 else -1
                sign[y0:y1, x0:x1] = s
                covered += patch.size - int(gt[y0:y1, x0:x1].sum())
                gt[y0:y1, x0:x1] = True
            if covered >= target:
                break
    luma = np.where(gt, bg_u8 + sign * spec.fg_luma_offset, bg_u8)
    cb = np.full((h, w), 128, dtype=np.int64)
    cb[gt] += spec.fg_chroma_offset
    cr = np.full((h, w), 128, dtype=np.int64)
    image = YCbCrImage(PixelPlane(np.clip(luma, 0, 255).astype(np.uint8)),
                       PixelPlane(np.clip(cb, 0, 255).astype(np.uint8)),
                       PixelPlane(cr.astype(np.uint8)))
    return image, SegmentationMask(gt)


def page_spec(index, seed=0, **overrides):
    """Spec for the `index`-th page of a seeded corpus."""
    page_seed = int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])
    return SynthSpec(seed=page_seed, **overrides)


def luma_ranges_overlap(image: YCbCrImage, gt: SegmentationMask) -> bool:
    """Whether foreground and background luma ranges intersect on the page."""
    y = image.y.samples
    fg, bg = y[gt.labels], y[~gt.labels]
    if fg.size == 0 or bg.size == 0:
        return False
    return bool(fg.min() <= bg.max() and bg.min() <= fg.max())
