"""scikit-learn style wrappers: ``fit`` validates parameters, ``predict`` returns a mask."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .baselines import djvu_segment, spec_segment
from .core import SegConfig, SegmentationMask, YCbCrImage
from .io import image_from_rgb
from .pipeline import Telemetry, segment_image


def check_image(X) -> YCbCrImage:
    """Coerce a YCbCrImage, a (H, W) gray array or a (H, W, 3) RGB array."""
    if isinstance(X, YCbCrImage):
        return X
    arr = check_array(X, dtype=None, ensure_2d=False, allow_nd=True)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise ValueError(f"expected a (H, W) gray or (H, W, 3) RGB image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255 or not np.all(arr == np.round(arr)):
            raise ValueError("image samples must be 8-bit integers in [0, 255]")
        arr = arr.astype(np.uint8)
    if arr.ndim == 2:
        return YCbCrImage.from_gray(arr)
    return image_from_rgb(arr)


class _Segmenter(BaseEstimator):
    def _config(self):
        raise NotImplementedError

    def fit(self, X=None, y=None):
        """Validate parameters. Segmentation is unsupervised; X and y are ignored."""
        self.config_ = self._config()
        return self

    def _segment(self, image):
        raise NotImplementedError

    def predict(self, X):
        """Boolean (H, W) array, True on foreground pixels."""
        check_is_fitted(self, "config_")
        return self._segment(check_image(X)).labels

    def fit_predict(self, X, y=None):
        return self.fit(X, y).predict(X)

    def segment(self, X) -> SegmentationMask:
        return SegmentationMask(self.predict(X))


class LadSegmenter(_Segmenter):
    """Smooth-background / text segmentation with per-block LAD fitting.

    Parameters mirror SegConfig; the defaults are the published settings.
    ``n_jobs`` spreads block fitting over threads without changing the output.
    After ``predict``, ``telemetry_`` holds block decisions and solver counts.
    """

    def __init__(self, block_size=64, min_block_size=8, n_bases=10, eps1=10.0, eps2=10.0,
                 eps3=3.0, eps4=0.5, rho=1.0, max_iter=200, chroma_refine=True,
                 early_stop=False, n_jobs=1):
        self.block_size = block_size
        self.min_block_size = min_block_size
        self.n_bases = n_bases
        self.eps1 = eps1
        self.eps2 = eps2
        self.eps3 = eps3
        self.eps4 = eps4
        self.rho = rho
        self.max_iter = max_iter
        self.chroma_refine = chroma_refine
        self.early_stop = early_stop
        self.n_jobs = n_jobs

    def _config(self):
        return SegConfig(block_size_max=self.block_size, block_size_min=self.min_block_size,
                         num_bases=self.n_bases, eps1=self.eps1, eps2=self.eps2,
                         eps3=self.eps3, eps4=self.eps4, rho=self.rho,
                         admm_iterations=self.max_iter, enable_chroma_refine=self.chroma_refine,
                         admm_early_stop=self.early_stop)

    def _segment(self, image):
        self.telemetry_ = Telemetry()
        return segment_image(image, self.config_, threads=self.n_jobs or 1,
                             telemetry=self.telemetry_)


class DjvuSegmenter(_Segmenter):
    """Hierarchical two-means clustering baseline."""

    def __init__(self, block_size=64, min_block_size=8):
        self.block_size = block_size
        self.min_block_size = min_block_size

    def _config(self):
        return SegConfig(block_size_max=self.block_size, block_size_min=self.min_block_size,
                         num_bases=1)

    def _segment(self, image):
        return djvu_segment(image, self.config_)


class SpecSegmenter(_Segmenter):
    """Color-counting baseline with shape-primitive refinement of pictorial blocks."""

    def __init__(self, block_size=16, color_threshold=32, primitive_size=50,
                 color_distance=10.0):
        self.block_size = block_size
        self.color_threshold = color_threshold
        self.primitive_size = primitive_size
        self.color_distance = color_distance

    def _config(self):
        return SegConfig(spec_block_size=self.block_size,
                         spec_color_threshold=self.color_threshold,
                         spec_primitive_size=self.primitive_size,
                         spec_color_distance=self.color_distance)

    def _segment(self, image):
        return spec_segment(image, self.config_)


ALGORITHMS = {"lad": LadSegmenter, "djvu": DjvuSegmenter, "spec": SpecSegmenter}
