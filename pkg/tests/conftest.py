import numpy as np
import pytest
from scipy.optimize import linprog

from scseg import PixelPlane, YCbCrImage, build_dictionary


def gray_image(luma, cb=None, cr=None):
    luma = np.asarray(luma, dtype=np.uint8)
    if cb is None and cr is None:
        return YCbCrImage.from_gray(luma)
    neutral = np.full(luma.shape, 128, np.uint8)
    cb = neutral if cb is None else np.asarray(cb, dtype=np.uint8)
    cr = neutral if cr is None else np.asarray(cr, dtype=np.uint8)
    return YCbCrImage(PixelPlane(luma), PixelPlane(cb), PixelPlane(cr))


def lp_lad(d, f):
    """L1 regression solved as a linear program: min sum(t) s.t. -t <= f - P a <= t."""
    P = d.matrix
    n, k = P.shape
    c = np.r_[np.zeros(k), np.ones(n)]
    A = np.block([[P, -np.eye(n)], [-P, -np.eye(n)]])
    res = linprog(c, A_ub=A, b_ub=np.r_[f, -f],
                  bounds=[(None, None)] * k + [(0, None)] * n, method="highs")
    assert res.success
    return res.x[:k], res.fun


def median_objective(f):
    f = np.asarray(f, dtype=np.float64)
    return float(np.abs(f - np.median(f)).sum())


def smooth_block(d, rng, dc=(400.0, 1600.0), ac=50.0):
    alpha = np.r_[rng.uniform(*dc), rng.uniform(-ac, ac, d.num_bases - 1)]
    return alpha, d.matrix @ alpha


@pytest.fixture
def dict8():
    return build_dictionary(8, 10)


@pytest.fixture
def dict64():
    return build_dictionary(64, 10)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
