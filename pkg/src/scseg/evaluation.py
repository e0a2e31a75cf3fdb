"""Pixel precision/recall of foreground masks, per image and pooled."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .core import DimensionMismatchError, SegmentationMask


def _ratio(num, den):
    return num / den if den > 0 else None


@dataclass
class EvalReport:
    """Confusion counts with foreground as the positive class.

    `precision` and `recall` are the pooled (micro) values and are None when
    undefined. For a corpus, `macro_precision`/`macro_recall` average the
    per-image values that are defined.
    """

    true_pos: int
    false_pos: int
    false_neg: int
    true_neg: int
    precision: Optional[float]
    recall: Optional[float]
    macro_precision: Optional[float] = None
    macro_recall: Optional[float] = None
    name: Optional[str] = None
    per_image: List["EvalReport"] = field(default_factory=list)

    @classmethod
    def from_counts(cls, tp, fp, fn, tn, name=None):
        p, r = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
        return cls(int(tp), int(fp), int(fn), int(tn), p, r, p, r, name=name)

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _labels(mask):
    return mask.labels if isinstance(mask, SegmentationMask) else np.asarray(mask, dtype=bool)


def evaluate(pred, gt, name=None) -> EvalReport:
    p, g = _labels(pred), _labels(gt)
    if p.shape != g.shape:
        raise DimensionMismatchError(
            f"prediction {p.shape[::-1]} and ground truth {g.shape[::-1]} differ"
            + (f" for {name}" if name else ""))
    tp = np.count_nonzero(p & g)
    fp = np.count_nonzero(p & ~g)
    fn = np.count_nonzero(~p & g)
    tn = p.size - tp - fp - fn
    return EvalReport.from_counts(tp, fp, fn, tn, name=name)


def evaluate_corpus(pairs, names=None) -> EvalReport:
    """Pool counts over (pred, gt) pairs; macro averages skip undefined images."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("evaluate_corpus needs at least one pair")
    names = list(names) if names is not None else [f"#{i}" for i in range(len(pairs))]
    reports = [evaluate(p, g, name=n) for (p, g), n in zip(pairs, names)]
    tp = sum(r.true_pos for r in reports)
    fp = sum(r.false_pos for r in reports)
    fn = sum(r.false_neg for r in reports)
    tn = sum(r.true_neg for r in reports)
    precs = [r.precision for r in reports if r.precision is not None]
    recs = [r.recall for r in reports if r.recall is not None]
    return EvalReport(tp, fp, fn, tn, _ratio(tp, tp + fp), _ratio(tp, tp + fn),
                      float(np.mean(precs)) if precs else None,
                      float(np.mean(recs)) if recs else None,
                      per_image=reports)
