import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from obr.errors import MalformedHeader, TruncatedBody
from obr.raster import GrayImage, RasterRGB, load_pnm, rgb_to_gray, save_pnm
from oracles import gray_reference


def test_load_smallest_pgm():
    img = load_pnm(b"P5\n1 1\n255\n\x00")
    assert isinstance(img, GrayImage)
    assert (img.width, img.height) == (1, 1)
    assert img.data[0, 0] == 0


def test_load_single_red_pixel():
    img = load_pnm(b"P6\n1 1\n255\n\xff\x00\x00")
    assert isinstance(img, RasterRGB)
    assert tuple(img.data[0, 0]) == (255, 0, 0)


def test_truncated_body():
    with pytest.raises(TruncatedBody):
        load_pnm(b"P5\n2 1\n255\n\x07")


@pytest.mark.parametrize("buf", [
    b"P4\n1 1\n255\n\x00",
    b"P5\n0 1\n255\n",
    b"P5\n1 x\n255\n\x00",
    b"P5\n1 1\n65535\n\x00\x00",
    b"P5\n1 1\n",
    b"P51 1 255\n\x00",
    b"",
])
def test_malformed_header(buf):
    with pytest.raises(MalformedHeader):
        load_pnm(buf)


def test_comments_are_skipped():
    img = load_pnm(b"P5\n# scanner v2\n2 # width\n1\n255\n\x01\x02")
    assert img.data.tolist() == [[1, 2]]


def test_save_gray_header():
    assert save_pnm(GrayImage([[0]])) == b"P5\n1 1\n255\n\x00"


def test_save_rgb_body():
    img = RasterRGB([[[1, 2, 3], [4, 5, 6]]])
    assert save_pnm(img) == b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06"


def test_random_roundtrip(rng):
    img = GrayImage(rng.integers(0, 256, (8, 8), dtype=np.uint8))
    assert load_pnm(save_pnm(img)) == img


@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9), st.just(3))))
def test_rgb_roundtrip(data):
    img = RasterRGB(data)
    back = load_pnm(save_pnm(img))
    assert back == img
    assert save_pnm(back) == save_pnm(img)


def test_images_are_immutable():
    img = GrayImage([[1, 2]])
    with pytest.raises(ValueError):
        img.data[0, 0] = 9


@pytest.mark.parametrize("rgb, gray", [
    ((255, 255, 255), 255),
    ((0, 0, 0), 0),
    ((100, 150, 200), 141),
])
def test_gray_examples(rgb, gray):
    assert rgb_to_gray(RasterRGB([[rgb]])).data[0, 0] == gray


def test_gray_of_neutral_pixels_exhaustive():
    v = np.arange(256, dtype=np.uint8)
    out = rgb_to_gray(RasterRGB(np.stack([v, v, v], axis=-1)[None])).data[0].astype(int)
    assert np.all((out == v) | (out == v.astype(int) - 1))


@given(st.tuples(*[st.integers(0, 255)] * 3), st.integers(0, 2), st.integers(1, 255))
def test_gray_monotone_and_exact(rgb, channel, bump):
    raised = list(rgb)
    raised[channel] = min(255, raised[channel] + bump)
    a = int(rgb_to_gray(RasterRGB([[rgb]])).data[0, 0])
    b = int(rgb_to_gray(RasterRGB([[raised]])).data[0, 0])
    assert a == gray_reference(*rgb)
    assert b >= a
