import subprocess
import sys

import numpy as np
import pytest

from cakelift.cli import main
from cakelift.fileio import read_pgm, read_tsv, save_stack
from cakelift.transform import lift
from cakelift.wavelets import CakeWaveletStack, build_stack, frequency_grid

STACK = ["--size", "64", "--orientations", "8", "--spline-order", "3", "--rho0", "0.8"]


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def test_wavelets_deterministic(tmp_path, capsys):
    for name in ("a.ost", "b.ost"):
        assert run(capsys, "wavelets", *STACK, "--out", tmp_path / name)[0] == 0
    assert (tmp_path / "a.ost.raw").read_bytes() == (tmp_path / "b.ost.raw").read_bytes()


def test_wavelets_bad_flag(tmp_path, capsys):
    code, _, err = run(capsys, "wavelets", "--orientations", "0", "--out", tmp_path / "x.ost")
    assert code == 2
    assert "--orientations" in err


def test_kernel_export_orientation(tmp_path, capsys):
    prefix = tmp_path / "k"
    code, out, _ = run(capsys, "wavelets", *STACK, "--out", tmp_path / "s.ost",
                       "--export-kernels", "1", "--kernel-prefix", prefix)
    assert code == 0
    kern = read_pgm(f"{prefix}_m1_re.pgm")
    assert kern.shape == (64, 64)
    assert "# offset" in open(f"{prefix}_m1_re.pgm", "rb").read(200).decode("ascii", "replace")
    # the real part pairs the wedge at theta = pi/8 with its mirror image
    stack = build_stack(64, 64, 8, 3)
    energy = np.sum(np.abs(lift(kern - kern.mean(), stack).data) ** 2, axis=(1, 2))
    assert int(np.argmax(energy)) in (1, 5)


def test_lift_and_reconstruct(tmp_path, capsys, rng):
    from cakelift.fileio import write_pgm

    write_pgm(tmp_path / "img.pgm", rng.standard_normal((64, 64)))
    run(capsys, "wavelets", *STACK, "--out", tmp_path / "s.ost")
    code, out, _ = run(capsys, "lift", tmp_path / "img.pgm", "--stack", tmp_path / "s.ost", "--out", tmp_path / "sc.ost")
    assert code == 0 and "discarded_energy_fraction" in out
    assert (tmp_path / "sc.ost.raw").stat().st_size == 8 * 64 * 64 * 16

    code, out, _ = run(capsys, "reconstruct", tmp_path / "sc.ost", "--reference", tmp_path / "img.pgm",
                       "--out", tmp_path / "rec.pgm")
    assert code == 0
    err = float(out.strip().splitlines()[-1].split("\t")[1])
    assert err < 1e-12

    code, out, err_text = run(capsys, "reconstruct", tmp_path / "sc.ost")
    assert code == 0 and "relative_l2_error" not in out and err_text == ""


def test_lift_shape_mismatch(tmp_path, capsys):
    from cakelift.fileio import write_pgm

    write_pgm(tmp_path / "img.pgm", np.zeros((32, 32)))
    run(capsys, "wavelets", *STACK, "--out", tmp_path / "s.ost")
    code, _, err = run(capsys, "lift", tmp_path / "img.pgm", "--stack", tmp_path / "s.ost")
    assert code == 2 and "shape" in err


def test_ug_table(tmp_path, capsys):
    code, out, _ = run(capsys, "ug", "--lambdas", "0.1,0.5", "--orders", "3,6", "--out", tmp_path / "ug.tsv")
    assert code == 0
    cols, arr, meta = read_tsv(tmp_path / "ug.tsv")
    assert cols == ["lambda", "UG_opt", "UG_gauss", "UG_cake_k3", "UG_cake_k6"]
    assert arr.shape == (2, 5) and np.all(arr[:, 1:] >= 1 - 1e-6)
    assert "quadrature" in meta


def test_ug_bad_lambda(capsys):
    code, _, err = run(capsys, "ug", "--lambdas", "0.1,-2")
    assert code == 2 and "--lambdas" in err


def test_profiles_and_bound(capsys):
    code, out, _ = run(capsys, "profiles", "--lambda", "0.2", "--samples", "64")
    assert code == 0 and "# phi\topt\tgauss\tcake_k3" in out
    code, out, _ = run(capsys, "bound", "--lambdas", "0.1,1.0")
    rows = [list(map(float, line.split("\t"))) for line in out.splitlines() if not line.startswith("#")]
    assert code == 0 and all(b >= g for _, b, g in rows)
    assert run(capsys, "bound", "--lambdas", "3")[0] == 2


def test_equivalence(capsys):
    code, out, _ = run(capsys, "equivalence", "--atoms", "5", *STACK, "--seed", "7")
    assert code == 0
    assert "# seed: 7" in out
    assert float(out.split("max_residual\t")[1]) < 1e-10
    assert run(capsys, "equivalence", "--atoms", "0", "--seed", "1")[0] == 2


def test_stability(tmp_path, capsys):
    code, out, _ = run(capsys, "stability", *STACK)
    delta, big, cond = map(float, out.split())
    assert code == 0 and delta > 0 and cond == pytest.approx(big / delta)
    code, out, _ = run(capsys, "stability", "--orientations", "1", "--spline-order", "0", "--rho0", "1")
    assert out.strip() == "1 1 1"


def test_stability_zeroed_annulus(tmp_path, capsys):
    s = build_stack(32, 32, 4, 2)
    w1, w2 = frequency_grid(32, 32)
    r = np.hypot(w1, w2) / np.pi
    data = np.where((r > 0.3) & (r < 0.5), 0.0, s.fourier_slices)
    save_stack(tmp_path / "z.ost", CakeWaveletStack(32, 32, 4, 2, s.radial, s.dc_policy, data))
    code, _, err = run(capsys, "stability", tmp_path / "z.ost")
    assert code == 1 and "unstable band" in err


def test_missing_file(capsys):
    assert run(capsys, "reconstruct", "/nonexistent.ost")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cakelift", "stability", "--size", "16", "--orientations", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and len(proc.stdout.split()) == 3
