"""Low-frequency 2-D DCT basis dictionaries for block modeling."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np


def zigzag_frequencies(count, block_size=None):
    """First `count` (u, v) pairs of the JPEG zig-zag scan.

    Anti-diagonal d = u + v is walked with u decreasing on even d and
    increasing on odd d, so (0, 1) precedes (1, 0). With `block_size` the
    scan is confined to the block_size x block_size grid.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if block_size is not None and count > block_size * block_size:
        raise ValueError(f"a {block_size}x{block_size} grid has fewer than {count} frequencies")
    pairs = []
    d = 0
    while len(pairs) < count:
        us = range(d, -1, -1) if d % 2 == 0 else range(0, d + 1)
        for u in us:
            v = d - u
            if block_size is not None and (u >= block_size or v >= block_size):
                continue
            pairs.append((u, v))
            if len(pairs) == count:
                break
        d += 1
    return pairs


def _beta(w, n):
    return math.sqrt(1.0 / n) if w == 0 else math.sqrt(2.0 / n)


def basis_value(u, v, x, y, n):
    """Orthonormal DCT-II basis (u, v) of an n x n block evaluated at pixel (x, y)."""
    return (_beta(u, n) * _beta(v, n)
            * math.cos((2 * x + 1) * math.pi * u / (2 * n))
            * math.cos((2 * y + 1) * math.pi * v / (2 * n)))


def _cosine_table(n, freqs):
    # rows: frequency, columns: coordinate
    w = np.asarray(freqs, dtype=np.float64)[:, None]
    t = np.arange(n, dtype=np.float64)[None, :]
    beta = np.where(w == 0, math.sqrt(1.0 / n), math.sqrt(2.0 / n))
    return beta * np.cos((2 * t + 1) * math.pi * w / (2 * n))


@dataclass(frozen=True, eq=False)
class Dictionary:
    """N^2 x K matrix whose column k is the vectorized basis for freq_pairs[k].

    Vectorization is column-major, matching `vectorize_block`: row index
    x * N + y holds pixel (x, y) where x is the column and y the row.
    """

    block_size: int
    num_bases: int
    matrix: np.ndarray
    freq_pairs: tuple
    # (P^T P)^-1 P^T, precomputed once; equals P^T up to rounding
    pinv: np.ndarray

    def synthesize(self, coefficients) -> np.ndarray:
        return self.matrix @ np.asarray(coefficients, dtype=np.float64)

    def as_block(self, k) -> np.ndarray:
        return self.matrix[:, k].reshape((self.block_size, self.block_size), order="F")


def _build(n, k):
    freqs = zigzag_frequencies(k, n)
    cu = _cosine_table(n, [u for u, _ in freqs])  # depends on x
    cv = _cosine_table(n, [v for _, v in freqs])  # depends on y
    # column-major vectorization: index = x * n + y
    mat = (cu[:, :, None] * cv[:, None, :]).reshape(k, n * n).T
    mat = np.ascontiguousarray(mat)
    mat.setflags(write=False)
    pinv = np.linalg.solve(mat.T @ mat, mat.T)
    pinv.setflags(write=False)
    return Dictionary(n, k, mat, tuple(freqs), pinv)


# Building is pure, so a duplicate build when two threads miss the cache
# together is harmless; lru_cache keeps its own bookkeeping thread-safe.
@functools.lru_cache(maxsize=None)
def _cached(n, k):
    return _build(n, k)


def build_dictionary(block_size, num_bases, cache=True):
    if block_size < 1:
        raise ValueError("block size must be positive")
    if num_bases < 1 or num_bases > block_size * block_size:
        raise ValueError(
            f"num_bases must lie in [1, {block_size * block_size}] for N={block_size}, "
            f"got {num_bases}")
    if cache:
        return _cached(int(block_size), int(num_bases))
    return _build(int(block_size), int(num_bases))
