"""Screen content segmentation into a smooth background layer and a text/graphics layer."""

from .core import (BlockRegion, BoundsError, DimensionMismatchError, InvalidConfigError,
                   PixelPlane, ScsegError, SegConfig, SegmentationMask, SmoothModel,
                   YCbCrImage, unvectorize_block, vectorize_block)
from .dictionary import Dictionary, basis_value, build_dictionary, zigzag_frequencies
from .solvers import (FitResult, lad_fit_admm, lad_fit_irls_oracle, least_squares_fit,
                      soft_threshold)
from .pipeline import (BlockDecision, DecisionKind, Layer, NeighborContext, Telemetry,
                       chroma_refine, segment_block, segment_image)
from .baselines import djvu_segment, kmeans2, spec_segment
from .synth import SynthSpec, generate
from .evaluation import EvalReport, evaluate, evaluate_corpus
from .io import load_image, load_mask, rgb_to_ycbcr, write_mask
from .estimators import DjvuSegmenter, LadSegmenter, SpecSegmenter

__version__ = "0.1.0"

__all__ = [
    "BlockRegion", "BoundsError", "DimensionMismatchError", "InvalidConfigError", "PixelPlane",
    "ScsegError", "SegConfig", "SegmentationMask", "SmoothModel", "YCbCrImage",
    "unvectorize_block", "vectorize_block",
    "Dictionary", "basis_value", "build_dictionary", "zigzag_frequencies",
    "FitResult", "lad_fit_admm", "lad_fit_irls_oracle", "least_squares_fit", "soft_threshold",
    "BlockDecision", "DecisionKind", "Layer", "NeighborContext", "Telemetry", "chroma_refine",
    "segment_block", "segment_image",
    "djvu_segment", "kmeans2", "spec_segment",
    "SynthSpec", "generate", "EvalReport", "evaluate", "evaluate_corpus",
    "load_image", "load_mask", "rgb_to_ycbcr", "write_mask",
    "DjvuSegmenter", "LadSegmenter", "SpecSegmenter",
]
