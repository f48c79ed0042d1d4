import os
import subprocess
import sys

import pytest

from obr import cli
from obr.raster import load_pnm, read_pnm


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_then_decode(tmp_path, capsys):
    page = tmp_path / "abc.pgm"
    code, _, err = run(["synth", "--string", "a b c", "--noise", "8", "--jitter", "0.1",
                        "-o", str(page)], capsys)
    assert code == 0 and "x" in err
    code, out, _ = run(["decode", str(page)], capsys)
    assert (code, out) == (0, "a b c\n")


def test_synth_single_dot_with_truth(tmp_path, capsys):
    page, truth = tmp_path / "a.pgm", tmp_path / "a.txt"
    assert run(["synth", "--string", "a", "-o", str(page), "--truth", str(truth)], capsys)[0] == 0
    img = read_pnm(page)
    lines = truth.read_text().splitlines()
    assert len(lines) == 1
    x, y, area = lines[0].split()
    assert int(area) == int((img.data < 128).sum())


def test_synth_malayalam(tmp_path, capsys):
    page = tmp_path / "ml.pgm"
    assert run(["synth", "--string", "അആഇ", "--lang", "ml", "-o", str(page)], capsys)[0] == 0
    code, out, _ = run(["decode", "--lang", "ml", str(page)], capsys)
    assert (code, out) == (0, "അആഇ\n")


def test_synth_from_file(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("dot\nline\n", encoding="utf-8")
    page = tmp_path / "p.pgm"
    assert run(["synth", "--text", str(src), "-o", str(page)], capsys)[0] == 0
    assert run(["decode", "--auto-grid", str(page)], capsys)[1] == "dot\nline\n"


def test_synth_unencodable(tmp_path, capsys):
    code, _, err = run(["synth", "--string", "ß", "-o", str(tmp_path / "x.pgm")], capsys)
    assert code == 1 and "UnencodableGrapheme" in err and "'ß'" in err and "position 1" in err


def test_decode_missing_file(tmp_path, capsys):
    code, out, err = run(["decode", str(tmp_path / "nope.pgm")], capsys)
    assert code == 1 and out == "" and "load" in err


def test_decode_bad_format(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P2\n1 1\n255\n0\n")
    assert run(["decode", str(bad)], capsys)[0] == 1


def test_decode_blank_page(tmp_path, capsys):
    blank = tmp_path / "blank.pgm"
    blank.write_bytes(b"P5\n40 30\n255\n" + bytes([235]) * 1200)
    code, out, err = run(["decode", str(blank)], capsys)
    assert code == 2 and "InsufficientDots" in err and "grid" in err


def test_decode_dump(tmp_path, capsys):
    page = tmp_path / "p.pgm"
    run(["synth", "--string", "dump", "--noise", "5", "-o", str(page)], capsys)
    dump = tmp_path / "stages"
    assert run(["decode", "--dump", str(dump), str(page)], capsys)[0] == 0
    names = sorted(p.name for p in dump.iterdir())
    assert names == ["01-gray.pgm", "02-mean.pgm", "03-stretch.pgm",
                     "04-complement.pgm", "05-dilate.pgm", "06-binary.pgm"]
    for p in dump.iterdir():
        raw = p.read_bytes()
        from obr.raster import save_pnm
        assert save_pnm(load_pnm(raw)) == raw
    assert (dump / "01-gray.pgm").read_bytes() == page.read_bytes()


def test_decode_multiple_files_in_order(tmp_path, capsys):
    paths = []
    for word in ["first", "second"]:
        p = tmp_path / f"{word}.pgm"
        run(["synth", "--string", word, "-o", str(p)], capsys)
        paths.append(str(p))
    code, out, _ = run(["decode", *paths, str(tmp_path / "missing.pgm")], capsys)
    assert code == 1 and out == "first\nsecond\n"


def test_decode_threshold_flag(tmp_path, capsys):
    page = tmp_path / "p.pgm"
    run(["synth", "--string", "flag", "-o", str(page)], capsys)
    assert run(["decode", "--threshold", "120", str(page)], capsys)[1] == "flag\n"


def test_tables_en(capsys):
    code, out, _ = run(["tables", "--lang", "en"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 26 and lines[0] == "100000 ⠁ a"


def test_tables_ml(capsys):
    code, out, _ = run(["tables", "--lang", "ml"], capsys)
    lines = out.splitlines()
    assert len(lines) == 12
    alias = [l for l in lines if "alias" in l]
    assert alias == ["010010 ⠒ ഐ (alias)"]


def test_tables_unknown(capsys):
    assert run(["tables", "--lang", "xx"], capsys)[0] == 1


def test_custom_table(tmp_path, capsys):
    t = tmp_path / "t.txt"
    t.write_text("# two symbols\n100000\tX\n110000\tY\n", encoding="utf-8")
    page = tmp_path / "p.pgm"
    assert run(["synth", "--table", str(t), "--string", "XY YX", "-o", str(page)], capsys)[0] == 0
    assert run(["decode", "--table", str(t), str(page)], capsys)[1] == "XY YX\n"
    code, out, _ = run(["tables", "--table", str(t)], capsys)
    assert out == "100000 ⠁ X\n110000 ⠃ Y\n"
    bad = tmp_path / "bad.txt"
    bad.write_text("1111\tZ\n", encoding="utf-8")
    assert run(["tables", "--table", str(bad)], capsys)[0] == 1


def test_default_lang_env(tmp_path):
    env = dict(os.environ, OBR_DEFAULT_LANG="ml")
    proc = subprocess.run([sys.executable, "-m", "obr", "tables"], env=env,
                          capture_output=True, text=True, encoding="utf-8")
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 12


def test_module_entry_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "obr", "decode", str(tmp_path / "none.pgm")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
