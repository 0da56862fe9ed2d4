"""Command-line front end.

Exit codes: 0 success, 1 a numerical acceptance threshold was missed,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .fileio import (
    FormatError,
    load_score,
    load_stack,
    provenance,
    read_pgm,
    save_score,
    save_stack,
    write_pgm,
    write_tsv,
)
from .profiles import angular_profile_table
from .transform import TrainedKernelModel, disk_limit, equivalence_residual, lift, reconstruct_fast
from .uncertainty import (
    QuadratureConfig,
    WrappedGaussian,
    ug_convergence_table,
    ug_upper_bound_wrapped_gaussian,
    uncertainty_gap,
)
from .wavelets import RadialProfileSpec, UnstableBandError, build_stack, spatial_kernel, stability_report

log = logging.getLogger("cakelift")

EQUIVALENCE_THRESHOLD = 1e-8
DEFAULT_LAMBDAS = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1.0"


class UsageError(ValueError):
    pass


def _floats(text: str, flag: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma-separated list of numbers, got {text!r}")
    if not vals:
        raise UsageError(f"{flag}: empty list")
    return vals


def _ints(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma-separated list of integers, got {text!r}")


def _lambdas(text: str, flag: str = "--lambdas") -> list[float]:
    vals = _floats(text, flag)
    bad = [v for v in vals if not v > 0]
    if bad:
        raise UsageError(f"{flag}: lambda must be positive, got {bad[0]}")
    return vals


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _add_stack_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--size", type=int, default=64, help="image width and height")
    p.add_argument("--width", type=int, help="overrides --size")
    p.add_argument("--height", type=int, help="overrides --size")
    p.add_argument("--orientations", type=int, default=8)
    p.add_argument("--spline-order", type=int, default=3)
    p.add_argument("--rho0", type=float, default=0.8, help="disk radius as a fraction of Nyquist")
    p.add_argument("--taper", choices=("hard", "erf"), default="hard")
    p.add_argument("--taper-width", type=float, default=0.0)
    p.add_argument("--dc", default="split_uniform", choices=("split_uniform",))


def _stack_from_flags(args):
    width = args.width or args.size
    height = args.height or args.size
    _require(width >= 8, f"--size/--width: must be >= 8, got {width}")
    _require(height >= 8, f"--size/--height: must be >= 8, got {height}")
    _require(args.orientations >= 1, f"--orientations: must be >= 1, got {args.orientations}")
    _require(args.spline_order >= 0, f"--spline-order: must be >= 0, got {args.spline_order}")
    _require(0 < args.rho0 <= 1, f"--rho0: must lie in (0, 1], got {args.rho0}")
    radial = RadialProfileSpec(args.rho0, args.taper, args.taper_width)
    return build_stack(width, height, args.orientations, args.spline_order, radial, args.dc)


def cmd_wavelets(args) -> int:
    stack = _stack_from_flags(args)
    save_stack(args.out, stack, provenance(args.argv))
    print(f"wrote stack {args.out} ({stack.n} orientations, {stack.width}x{stack.height})")
    for m in _ints(args.export_kernels, "--export-kernels") if args.export_kernels else []:
        _require(0 <= m < stack.n, f"--export-kernels: index {m} out of range")
        kern = spatial_kernel(stack, m)
        for part, arr in (("re", kern.real), ("im", kern.imag)):
            path = f"{args.kernel_prefix}_m{m}_{part}.pgm"
            offset, scale = write_pgm(path, arr, bits=16, sidecar=False,
                                      comments=[f"kernel m={m} part={part}", f"cakelift {__version__}"])
            print(f"wrote {path} (offset {offset:.6g}, scale {scale:.6g})")
    return 0


def cmd_lift(args) -> int:
    stack = load_stack(args.stack)
    image = read_pgm(args.image)
    _require(image.shape == stack.shape,
             f"image shape {image.shape} does not match stack shape {stack.shape}")
    limited, frac = disk_limit(image, stack.radial)
    score = lift(limited, stack)
    save_score(args.out, score, provenance(args.argv))
    print(f"discarded_energy_fraction\t{frac!r}")
    print(f"wrote score {args.out}")
    return 0


def cmd_reconstruct(args) -> int:
    score = load_score(args.score)
    image = reconstruct_fast(score)
    if args.out:
        write_pgm(args.out, image, bits=16, sidecar=True)
        print(f"wrote {args.out}")
    if args.reference:
        ref = read_pgm(args.reference)
        _require(ref.shape == image.shape,
                 f"reference shape {ref.shape} does not match score shape {image.shape}")
        m = score.meta
        ref, _ = disk_limit(ref, RadialProfileSpec(m["rho0"], m["taper"], m["taper_width"]))
        denom = np.linalg.norm(ref)
        err = float(np.linalg.norm(image - ref) / denom if denom > 0 else np.linalg.norm(image))
        print(f"relative_l2_error\t{err!r}")
    return 0


def _output(path):
    return sys.stdout if path in (None, "-") else path


def cmd_ug(args) -> int:
    lambdas = _lambdas(args.lambdas)
    orders = _ints(args.orders, "--orders")
    _require(all(k >= 1 for k in orders), "--orders: spline orders must be >= 1")
    quad = QuadratureConfig(samples=args.samples)
    table = ug_convergence_table(orders, lambdas, quad)
    meta = {**provenance(args.argv), "quadrature": f"trapezoid M={quad.samples}; cake: Gauss {quad.gauss_nodes} nodes per knot interval", "rho": 1.0}
    write_tsv(_output(args.out), table.columns, table.rows, meta)
    return 0


def cmd_profiles(args) -> int:
    (lam,) = _lambdas(str(args.lam), "--lambda")
    orders = _ints(args.orders, "--orders")
    _require(all(k >= 1 for k in orders), "--orders: spline orders must be >= 1")
    names, table = angular_profile_table(lam, args.samples, orders)
    meta = {**provenance(args.argv), "lambda": lam, "normalisation": "peak 1"}
    write_tsv(_output(args.out), names, table, meta)
    return 0


def cmd_bound(args) -> int:
    lambdas = _lambdas(args.lambdas)
    _require(all(v <= 2 for v in lambdas), "--lambdas: the bound is only available for lambda <= 2")
    quad = QuadratureConfig(samples=args.samples)
    rows = [(lam, ug_upper_bound_wrapped_gaussian(lam), uncertainty_gap(WrappedGaussian(lam), quadrature=quad).ug)
            for lam in lambdas]
    write_tsv(_output(args.out), ["lambda", "bound", "UG_gauss"], rows, provenance(args.argv))
    return 0


def cmd_equivalence(args) -> int:
    _require(args.atoms >= 1, f"--atoms: must be >= 1, got {args.atoms}")
    _require(args.trials >= 1, f"--trials: must be >= 1, got {args.trials}")
    stack = _stack_from_flags(args)
    seed = args.seed
    if seed is None:
        seed = 0
        log.warning("no --seed given, using seed 0")
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(args.trials):
        rng = np.random.default_rng(child)
        model = TrainedKernelModel.random(rng, args.atoms, stack.shape, stack.radial.rho0)
        image, _ = disk_limit(rng.standard_normal(stack.shape), stack.radial)
        worst = max(worst, equivalence_residual(image, model, stack))
    print(f"# seed: {seed}")
    print(f"max_residual\t{worst!r}")
    if worst > EQUIVALENCE_THRESHOLD:
        print(f"residual exceeds {EQUIVALENCE_THRESHOLD}", file=sys.stderr)
        return 1
    return 0


def cmd_stability(args) -> int:
    stack = load_stack(args.stack) if args.stack else _stack_from_flags(args)
    try:
        rep = stability_report(stack)
    except UnstableBandError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(f"{rep.delta:.17g} {rep.big_m:.17g} {rep.cond_bound:.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cakelift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cakelift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wavelets", help="build a cake-wavelet stack")
    _add_stack_flags(p)
    p.add_argument("--out", default="stack.ost")
    p.add_argument("--export-kernels", default="", help="comma-separated orientation indices")
    p.add_argument("--kernel-prefix", default="kernel")
    p.set_defaults(func=cmd_wavelets)

    p = sub.add_parser("lift", help="disk-limit an image and lift it to an orientation score")
    p.add_argument("image")
    p.add_argument("--stack", required=True)
    p.add_argument("--out", default="score.ost")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("reconstruct", help="fast reconstruction from an orientation score")
    p.add_argument("score")
    p.add_argument("--out")
    p.add_argument("--reference", help="image to compare against after disk-limiting")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("ug", help="uncertainty gap table")
    p.add_argument("--lambdas", default=DEFAULT_LAMBDAS)
    p.add_argument("--orders", default="3,6,9,12")
    p.add_argument("--samples", type=int, default=8192)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_ug)

    p = sub.add_parser("profiles", help="peak-normalised angular profiles")
    p.add_argument("--lambda", dest="lam", type=float, default=0.2)
    p.add_argument("--orders", default="3,6,9,12")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("bound", help="closed-form UG bound for the wrapped Gaussian")
    p.add_argument("--lambdas", default=DEFAULT_LAMBDAS)
    p.add_argument("--samples", type=int, default=8192)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("equivalence", help="trained-kernel equivalence residual")
    _add_stack_flags(p)
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("stability", help="stability bounds of a stack")
    p.add_argument("stack", nargs="?", help="OST stack file; otherwise built from flags")
    _add_stack_flags(p)
    p.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = ["cakelift"] + argv
    try:
        return args.func(args)
    except (UsageError, FormatError, ValueError, FileNotFoundError) as exc:
        print(f"cakelift {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
