import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from scseg import DjvuSegmenter, LadSegmenter, SpecSegmenter
from scseg.core import InvalidConfigError
from scseg.estimators import check_image
from scseg.synth import generate, page_spec


def test_get_params_and_clone():
    seg = LadSegmenter(eps1=12.0, max_iter=50)
    params = seg.get_params()
    assert params["eps1"] == 12.0 and params["max_iter"] == 50 and params["block_size"] == 64
    twin = clone(seg)
    assert twin.get_params() == params
    seg.set_params(eps4=0.7)
    assert seg.eps4 == 0.7


@pytest.mark.parametrize("cls", [LadSegmenter, DjvuSegmenter, SpecSegmenter])
def test_predict_requires_fit(cls):
    with pytest.raises(NotFittedError):
        cls().predict(np.zeros((8, 8), np.uint8))


def test_fit_validates_parameters():
    with pytest.raises(InvalidConfigError):
        LadSegmenter(eps4=1.5).fit()
    with pytest.raises(InvalidConfigError):
        LadSegmenter(block_size=48).fit()


def test_predict_accepts_gray_rgb_and_image():
    img, gt = generate(page_spec(0, width=64, height=64))
    seg = LadSegmenter().fit()
    from_image = seg.predict(img)
    from_gray = seg.predict(img.y.samples)
    from_rgb = seg.predict(np.repeat(img.y.samples[:, :, None], 3, axis=2))
    assert from_image.dtype == bool and from_image.shape == (64, 64)
    assert np.array_equal(from_image, from_gray) and np.array_equal(from_gray, from_rgb)
    assert seg.telemetry_.decisions


def test_fit_predict_matches_baselines():
    img, _ = generate(page_spec(1, width=64, height=64))
    for seg in (DjvuSegmenter(), SpecSegmenter()):
        assert seg.fit_predict(img).shape == (64, 64)


def test_check_image_rejects_bad_input():
    with pytest.raises(ValueError):
        check_image(np.zeros((4, 4, 2)))
    with pytest.raises(ValueError):
        check_image(np.full((4, 4), 300))
    with pytest.raises(ValueError):
        check_image(np.full((4, 4), 1.5))


def test_n_jobs_does_not_change_output():
    img, _ = generate(page_spec(4, width=128, height=128, fg_coverage=0.3))
    a = LadSegmenter(n_jobs=1).fit_predict(img)
    b = LadSegmenter(n_jobs=3).fit_predict(img)
    assert np.array_equal(a, b)
