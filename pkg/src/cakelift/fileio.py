"""File formats: OST containers, PGM images and TSV tables.

OST container
    ``<name>``: UTF-8 ``key = value`` header lines, first line ``magic = OST1``.
    ``<name>.raw``: interleaved little-endian float64 ``(re, im)`` pairs,
    theta-major, then row-major (y, then x).

Stacks are stored with frequencies in numpy FFT order (``frequency_order =
fft``); scores are stored in the spatial domain.

PGM images are binary P5, 8- or 16-bit. Writers record the linear map from
pixel value to float (``# offset``/``# scale`` comments) and may add a raw
float64 sidecar ``<name>.f64`` for lossless round trips.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from . import __version__
from .transform import OrientationScore, stack_meta
from .wavelets import CakeWaveletStack, RadialProfileSpec

MAGIC = "OST1"
LAYOUT = "theta-major then row-major y then x"


class FormatError(ValueError):
    pass


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def payload_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".raw")


def write_ost(path, role: str, data: np.ndarray, meta: dict, provenance: dict | None = None) -> None:
    path = Path(path)
    header = {
        "magic": MAGIC,
        "role": role,
        **{k: meta[k] for k in ("W", "H", "N", "k", "rho0", "taper", "taper_width", "dc_policy", "base_angle")},
        "dtype": "complex128",
        "layout": LAYOUT,
        "endianness": "little",
        "frequency_order": "fft" if role == "stack" else "spatial",
        "payload": payload_path(path).name,
        "version": __version__,
    }
    for key, val in (provenance or {}).items():
        header[key] = val
    lines = [f"{key} = {_fmt(val)}" for key, val in header.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    arr = np.ascontiguousarray(data, dtype="<c16")
    payload_path(path).write_bytes(arr.tobytes())


def read_header(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    header = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"malformed header line: {line!r}")
        key, val = line.split("=", 1)
        header[key.strip()] = val.strip()
    if header.get("magic") != MAGIC:
        raise FormatError(f"{path}: not an OST container (magic {header.get('magic')!r})")
    if header.get("dtype") != "complex128" or header.get("endianness") != "little":
        raise FormatError(f"{path}: unsupported dtype/endianness")
    return header


def _meta_from_header(h: dict) -> dict:
    def opt_int(v):
        return None if v == "none" else int(v)

    return {
        "W": int(h["W"]),
        "H": int(h["H"]),
        "N": int(h["N"]),
        "k": opt_int(h["k"]),
        "rho0": float(h["rho0"]),
        "taper": h["taper"],
        "taper_width": float(h["taper_width"]),
        "dc_policy": h["dc_policy"],
        "base_angle": float(h["base_angle"]),
    }


def read_ost(path) -> tuple[dict, dict, np.ndarray]:
    """Returns ``(header, meta, data)`` with ``data`` of shape ``(N, H, W)``."""
    path = Path(path)
    header = read_header(path)
    meta = _meta_from_header(header)
    raw = (path.parent / header.get("payload", payload_path(path).name)).read_bytes()
    expected = meta["N"] * meta["H"] * meta["W"] * 16
    if len(raw) != expected:
        raise FormatError(f"{path}: payload has {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<c16").reshape(meta["N"], meta["H"], meta["W"]).astype(complex)
    return header, meta, data


def save_stack(path, stack: CakeWaveletStack, provenance: dict | None = None) -> None:
    write_ost(path, "stack", stack.fourier_slices, stack_meta(stack), provenance)


def load_stack(path) -> CakeWaveletStack:
    header, meta, data = read_ost(path)
    if header["role"] != "stack":
        raise FormatError(f"{path}: expected role 'stack', found {header['role']!r}")
    radial = RadialProfileSpec(meta["rho0"], meta["taper"], meta["taper_width"])
    data.setflags(write=False)
    return CakeWaveletStack(meta["W"], meta["H"], meta["N"], meta["k"], radial, meta["dc_policy"], data, meta["base_angle"])


def save_score(path, score: OrientationScore, provenance: dict | None = None) -> None:
    write_ost(path, "score", score.data, score.meta, provenance)


def load_score(path) -> OrientationScore:
    header, meta, data = read_ost(path)
    if header["role"] != "score":
        raise FormatError(f"{path}: expected role 'score', found {header['role']!r}")
    return OrientationScore(data, meta)


# PGM


def _sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".f64")


def write_pgm(path, image: np.ndarray, bits: int = 16, sidecar: bool = True, comments: Sequence[str] = ()) -> tuple[float, float]:
    """Write a real image, linearly rescaled onto ``0..maxval``.

    Returns ``(offset, scale)`` with ``value ~= offset + scale * pixel``.
    """
    if bits not in (8, 16):
        raise ValueError("PGM bit depth must be 8 or 16")
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError("PGM images must be 2D")
    maxval = (1 << bits) - 1
    lo, hi = float(image.min()), float(image.max())
    scale = (hi - lo) / maxval if hi > lo else 1.0
    pix = np.rint((image - lo) / scale).clip(0, maxval)
    dtype = ">u2" if bits == 16 else "u1"
    h, w = image.shape
    lines = ["P5", f"# offset {lo!r}", f"# scale {scale!r}"] + [f"# {c}" for c in comments]
    lines += [f"{w} {h}", str(maxval)]
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        fh.write(pix.astype(dtype).tobytes())
    if sidecar:
        _sidecar(path).write_bytes(np.ascontiguousarray(image, dtype="<f8").tobytes())
    return lo, scale


def read_pgm(path, use_sidecar: bool = True) -> np.ndarray:
    """Read a P5 PGM as float64, preferring a matching float64 sidecar."""
    raw = Path(path).read_bytes()
    tokens: list[str] = []
    comments: dict[str, float] = {}
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            end = raw.index(b"\n", pos)
            parts = raw[pos + 1:end].decode("ascii", "replace").split()
            if len(parts) == 2 and parts[0] in ("offset", "scale"):
                comments[parts[0]] = float(parts[1])
            pos = end + 1
            continue
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode("ascii"))
    pos += 1  # single whitespace byte before the raster
    if tokens[0] != "P5":
        raise FormatError(f"{path}: only binary P5 PGM is supported")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    side = _sidecar(path)
    if use_sidecar and side.exists() and side.stat().st_size == w * h * 8:
        return np.frombuffer(side.read_bytes(), dtype="<f8").reshape(h, w).astype(float)
    dtype = ">u2" if maxval > 255 else "u1"
    n_bytes = w * h * np.dtype(dtype).itemsize
    pix = np.frombuffer(raw[pos:pos + n_bytes], dtype=dtype).reshape(h, w).astype(float)
    return comments.get("offset", 0.0) + comments.get("scale", 1.0) * pix


# TSV


def write_tsv(
    out: IO[str] | str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[float]],
    meta: dict | None = None,
) -> None:
    """``#``-prefixed ``key: value`` lines, a ``#``-prefixed column row, then
    tab-separated values at full precision."""
    lines = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    lines.append("# " + "\t".join(columns))
    for row in rows:
        lines.append("\t".join(repr(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def read_tsv(path) -> tuple[list[str], np.ndarray, dict]:
    meta, columns, rows = {}, [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "\t" in body:
                columns = body.split("\t")
            elif ":" in body:
                k, v = body.split(":", 1)
                meta[k.strip()] = v.strip()
        elif line.strip():
            rows.append([float(x) for x in line.split("\t")])
    return columns, np.array(rows), meta


def provenance(argv: Sequence[str] | None = None, seed: int | None = None) -> dict:
    argv = sys.argv if argv is None else argv
    out = {"version": __version__, "command": " ".join(argv)}
    if seed is not None:
        out["seed"] = seed
    return out
