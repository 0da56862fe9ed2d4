import io

import numpy as np
import pytest

from cakelift.fileio import (
    FormatError,
    load_score,
    load_stack,
    read_header,
    read_pgm,
    read_tsv,
    save_score,
    save_stack,
    write_pgm,
    write_tsv,
)
from cakelift.transform import lift
from cakelift.wavelets import RadialProfileSpec, build_stack


def test_stack_round_trip(tmp_path):
    stack = build_stack(16, 12, 4, 2, RadialProfileSpec(0.9, "erf", 0.3))
    save_stack(tmp_path / "s.ost", stack, {"seed": 3})
    back = load_stack(tmp_path / "s.ost")
    assert np.array_equal(back.fourier_slices, stack.fourier_slices)
    assert (back.width, back.height, back.n, back.k, back.radial) == (16, 12, 4, 2, stack.radial)
    h = read_header(tmp_path / "s.ost")
    assert h["magic"] == "OST1" and h["role"] == "stack" and h["seed"] == "3"
    assert h["layout"] == "theta-major then row-major y then x"
    assert (tmp_path / "s.ost.raw").stat().st_size == 4 * 12 * 16 * 16


def test_score_round_trip(tmp_path, rng):
    stack = build_stack(16, 16, 4, 2)
    score = lift(rng.standard_normal((16, 16)), stack)
    save_score(tmp_path / "x.ost", score)
    back = load_score(tmp_path / "x.ost")
    assert np.array_equal(back.data, score.data)
    assert back.meta == score.meta
    with pytest.raises(FormatError):
        load_stack(tmp_path / "x.ost")


def test_payload_layout(tmp_path):
    stack = build_stack(8, 8, 2, 1, RadialProfileSpec(1.0))
    save_stack(tmp_path / "s.ost", stack)
    raw = np.frombuffer((tmp_path / "s.ost.raw").read_bytes(), dtype="<f8")
    # interleaved (re, im), theta-major, then y, then x
    assert raw[2 * (1 * 64 + 3 * 8 + 5)] == stack.fourier_slices[1, 3, 5].real
    assert raw[2 * (1 * 64 + 3 * 8 + 5) + 1] == 0.0


def test_bad_containers(tmp_path):
    p = tmp_path / "bad.ost"
    p.write_text("magic = NOPE\n")
    with pytest.raises(FormatError):
        read_header(p)
    stack = build_stack(8, 8, 2, 1, RadialProfileSpec(1.0))
    save_stack(tmp_path / "s.ost", stack)
    (tmp_path / "s.ost.raw").write_bytes(b"\0" * 10)
    with pytest.raises(FormatError, match="payload"):
        load_stack(tmp_path / "s.ost")


@pytest.mark.parametrize("bits", [8, 16])
def test_pgm_quantised(tmp_path, rng, bits):
    img = rng.standard_normal((9, 13))
    offset, scale = write_pgm(tmp_path / "a.pgm", img, bits=bits, sidecar=False)
    back = read_pgm(tmp_path / "a.pgm")
    assert back.shape == (9, 13)
    assert np.max(np.abs(back - img)) <= scale / 2 + 1e-12
    assert offset == img.min()


def test_pgm_sidecar_lossless(tmp_path, rng):
    img = rng.standard_normal((10, 10))
    write_pgm(tmp_path / "a.pgm", img)
    assert np.array_equal(read_pgm(tmp_path / "a.pgm"), img)
    assert not np.array_equal(read_pgm(tmp_path / "a.pgm", use_sidecar=False), img)


def test_pgm_errors(tmp_path):
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "a.pgm", np.zeros((2, 2)), bits=12)
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "a.pgm", np.zeros(4))
    (tmp_path / "b.pgm").write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "b.pgm")


def test_tsv_round_trip(tmp_path):
    rows = [(0.1, 1.0000000000000002), (0.2, 1.5)]
    write_tsv(tmp_path / "t.tsv", ["lambda", "ug"], rows, {"seed": 4})
    cols, arr, meta = read_tsv(tmp_path / "t.tsv")
    assert cols == ["lambda", "ug"] and meta == {"seed": "4"}
    assert np.array_equal(arr, np.array(rows))
    buf = io.StringIO()
    write_tsv(buf, ["a"], [(1.0,)])
    assert buf.getvalue() == "# a\n1.0\n"
