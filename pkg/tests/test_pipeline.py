import numpy as np
import pytest

from obr import grid, synth
from obr.codec import BrailleCell
from obr.errors import InsufficientDots
from obr.pipeline import STAGE_NAMES, PipelineConfig, StageFailure, run_pipeline
from obr.raster import GrayImage, RasterRGB

P300 = grid.mm_to_px(2.5, 300)


def test_stages_in_order(en):
    img, _ = synth.render_page(synth.encode_text("ab", en), synth.SynthConfig())
    res = run_pipeline(img)
    assert tuple(res.stages) == STAGE_NAMES
    assert set(np.unique(res.stages["06-binary"].data)) <= {0, 255}
    assert res.text == "ab"


def test_rgb_input(en):
    img, _ = synth.render_page(synth.encode_text("cab", en), synth.SynthConfig(noise_sigma=4))
    rgb = RasterRGB(np.repeat(img.data[..., None], 3, axis=2))
    assert run_pipeline(rgb).text == "cab"


@pytest.mark.parametrize("data", [np.full((80, 120), 230), None])
def test_blank_page_fails_in_grid(data, rng):
    if data is None:
        data = np.clip(230 + rng.normal(0, 6, (80, 120)), 0, 255)
    with pytest.raises(StageFailure) as exc:
        run_pipeline(GrayImage(data))
    assert exc.value.stage == "grid"
    assert isinstance(exc.value.cause, InsufficientDots)
    assert "InsufficientDots" in str(exc.value)


def test_fixed_threshold(en):
    img, _ = synth.render_page(synth.encode_text("hello", en), synth.SynthConfig())
    assert run_pipeline(img, PipelineConfig(threshold=128)).text == "hello"


def test_erasure_and_unknown_diagnostics(ml):
    lines = [[BrailleCell(1), BrailleCell(63), BrailleCell.from_bits("001111")]]
    img, _ = synth.render_page(lines, synth.SynthConfig())
    res = run_pipeline(img, PipelineConfig(table=ml))
    assert res.text == "അ⠿?"
    kinds = [d.kind for d in res.document.diagnostics]
    assert kinds == ["erasure", "unknown-code"]


def test_speckle_is_filtered(en):
    img, _ = synth.render_page(synth.encode_text("go", en), synth.SynthConfig(noise_sigma=3))
    data = img.data.copy()
    data[5, 5] = data[6, 6] = 0  # isolated dark specks in the margin
    res = run_pipeline(GrayImage(data))
    assert res.text == "go"


def test_blank_lines_survive(en):
    text = "one\n\nthree"
    img, _ = synth.render_page(synth.encode_text(text, en), synth.SynthConfig(noise_sigma=5, seed=2))
    assert run_pipeline(img).text == text
    assert run_pipeline(img, PipelineConfig(lattice_mode="auto")).text == text


def test_other_dpi_calibrated(en):
    cfg = synth.SynthConfig(dpi=200, noise_sigma=6, jitter=0.1 * grid.mm_to_px(2.5, 200), seed=4)
    img, _ = synth.render_page(synth.encode_text("relief map", en), cfg)
    assert run_pipeline(img, PipelineConfig(dpi=200)).text == "relief map"


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(lattice_mode="magic")
    assert PipelineConfig().dpi == 300
    assert PipelineConfig(lattice_mode="auto").dpi is None
