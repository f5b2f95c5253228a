"""Command-line front end.

Subcommands: ``pvar`` (variation curves over a p-grid, optionally with the
homogeneous lifted norm for p in [2,3)), ``solve`` (forward pass of a
controlled difference equation driven by a weight file), ``certify``
(stability certificates for a pair of inputs), and ``embed`` (turn a stack
of square layer matrices into a driver file via the state-augmentation
construction).

Exit codes: 0 success, 2 malformed input, 3 regime misuse, 4 certificate
or verification failure.  Output files are written in one shot after all
computation succeeds, so no command leaves partial output behind.  Floats
are emitted with ``repr`` (shortest 64-bit round-trip) for byte-stable
diffs.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import RegimeError, rough_stability, young_stability
from .cde import (VectorFieldSystem, embed_resnet, resnet_forward, solve,
                  tanh_matvec)
from .lift import homogeneous_norm, lift
from .pvar import pvar
from .series import TimeSeries

__all__ = [
    "WEIGHT_FORMAT",
    "load_weight_file",
    "save_weight_file",
    "main",
]

WEIGHT_FORMAT = "roughnet-weights/1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REGIME = 3
EXIT_VIOLATED = 4


class InputError(ValueError):
    """Malformed input file or flag value (exit 2)."""


# ---------------------------------------------------------------------------
# weight-file interchange format


def load_weight_file(path: str) -> tuple[TimeSeries, dict]:
    """Load and validate a weight file; returns (series, header dict)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read weight file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != WEIGHT_FORMAT:
        raise InputError(f"{path}: not a {WEIGHT_FORMAT} document")
    for key in ("N", "d", "series"):
        if key not in doc:
            raise InputError(f"{path}: missing field {key!r}")
    N, d = doc["N"], doc["d"]
    if not (isinstance(N, int) and N >= 1 and isinstance(d, int) and d >= 1):
        raise InputError(f"{path}: N and d must be positive integers")
    series = np.asarray(doc["series"], dtype=float)
    if series.shape != (N + 1, d):
        raise InputError(
            f"{path}: series has shape {series.shape}, expected {(N + 1, d)}")
    if not np.all(np.isfinite(series)):
        raise InputError(f"{path}: series contains non-finite entries")
    m = doc.get("m")
    if m is not None and not (isinstance(m, int) and m >= 1):
        raise InputError(f"{path}: m must be a positive integer when present")
    header = {"N": N, "d": d, "m": m, "meta": doc.get("meta", {})}
    return TimeSeries(series), header


def save_weight_file(path: str, series: TimeSeries, m: int | None = None,
                     meta: dict | None = None) -> None:
    doc = {
        "format": WEIGHT_FORMAT,
        "N": series.horizon,
        "d": series.dim,
        "series": [[float(v) for v in row] for row in series.points],
        "meta": meta or {},
    }
    if m is not None:
        doc["m"] = int(m)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# flag parsing helpers


def _parse_grid(spec: str) -> list[float]:
    try:
        a, b, step = (float(t) for t in spec.split(":"))
    except ValueError as exc:
        raise InputError(f"bad p-grid {spec!r}; expected A:B:STEP") from exc
    if step <= 0:
        raise InputError("p-grid STEP must be positive")
    if b < a:
        raise InputError("p-grid needs A <= B")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(count)]


def _parse_vector(spec: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in spec.split(",")], dtype=float)
    except ValueError as exc:
        raise InputError(f"bad vector {spec!r}") from exc


def _parse_interval(spec: str, N: int) -> tuple[int, int]:
    try:
        k, l = (int(t) for t in spec.split(","))
    except ValueError as exc:
        raise InputError(f"bad interval {spec!r}; expected k,l") from exc
    if not 0 <= k < l <= N:
        raise InputError(f"interval [{k},{l}] invalid for horizon {N}")
    return k, l


def _build_field(kind: str, dim: int, channels: int) -> VectorFieldSystem:
    """One activation field per driver channel, identity pre-map."""
    mats = np.broadcast_to(np.eye(dim), (channels, dim, dim)).copy()
    return VectorFieldSystem.activation(kind, mats)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pvar(args) -> int:
    w, _ = load_weight_file(args.input)
    grid = _parse_grid(args.p_grid)
    if grid and grid[0] < 1.0 and not args.allow_quasinorm:
        raise RegimeError(
            "p-grid enters the quasi-norm range p < 1; "
            "pass --allow-quasinorm to proceed")
    k, l = (0, w.horizon)
    if args.interval:
        k, l = _parse_interval(args.interval, w.horizon)
    lifted = lift(w) if args.lifted else None
    lines = ["p,value,norm_kind"]
    for p in grid:
        if lifted is not None and 2.0 <= p < 3.0:
            value = homogeneous_norm(lifted, p, k, l)
            kind = "homogeneous"
        else:
            value = pvar(w, p, k, l)
            kind = "pvar"
        lines.append(f"{p!r},{value!r},{kind}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_solve(args) -> int:
    w, _ = load_weight_file(args.input)
    x0 = _parse_vector(args.x0)
    f = _build_field(args.field, x0.size, w.dim)
    x = solve(f, w, x0)
    header = "k," + ",".join(f"x{i}" for i in range(x0.size))
    lines = [header]
    for k, row in enumerate(x.points):
        lines.append(f"{k}," + ",".join(repr(float(v)) for v in row))
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_certify(args) -> int:
    w, _ = load_weight_file(args.input)
    w_t, _ = load_weight_file(args.input2) if args.input2 else (w, None)
    if w_t.dim != w.dim or w_t.horizon != w.horizon:
        raise InputError("the two inputs must share dimension and horizon")
    x0 = (_parse_vector(args.x0) if args.x0 is not None
          else np.zeros(w.dim))
    x0_t = x0.copy()
    if args.perturb_x0:
        x0_t = x0_t + args.perturb_x0
    f = _build_field(args.field, x0.size, w.dim)
    p = args.p
    if 1.0 <= p < 2.0:
        cert = young_stability(f, (w, x0), (w_t, x0_t), p)
    elif 2.0 <= p < 3.0:
        cert = rough_stability(f, (lift(w), x0), (lift(w_t), x0_t), p)
    else:
        raise RegimeError(f"--p must lie in [1,3), got {p}")
    _write_text(args.output, cert.to_json() + "\n")
    return EXIT_OK if cert.holds else EXIT_VIOLATED


def _load_thetas(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read theta file {path}: {exc}") from exc
    raw = doc.get("thetas") if isinstance(doc, dict) else doc
    try:
        thetas = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: thetas are not numeric arrays") from exc
    if thetas.ndim != 3 or thetas.shape[1] != thetas.shape[2]:
        raise InputError(f"{path}: expected N square matrices, got shape "
                         f"{thetas.shape}")
    if not np.all(np.isfinite(thetas)):
        raise InputError(f"{path}: non-finite matrix entries")
    return thetas


def cmd_embed(args) -> int:
    thetas = _load_thetas(args.theta)
    m = thetas.shape[1]
    y0 = _parse_vector(args.y0)
    if y0.size != m:
        raise InputError(f"--y0 has length {y0.size}, matrices are {m}x{m}")
    f, w, x0 = embed_resnet(tanh_matvec, thetas, y0)
    x = solve(f, w, x0)
    reference = resnet_forward(tanh_matvec, thetas, y0)
    gap = float(np.max(np.abs(x.points[:, :m] - reference)))
    if gap > 1e-8:
        print(f"embedding verification failed: max projection discrepancy "
              f"{gap:g}", file=sys.stderr)
        return EXIT_VIOLATED
    meta = {
        "construction": "flattened-layer-matrices-plus-time-ramp",
        "sigma": args.sigma,
        "y0": [float(v) for v in y0],
        "max_projection_discrepancy": gap,
    }
    save_weight_file(args.output, w, m=m, meta=meta)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="roughnet",
        description="variation analysis and stability certificates for "
                    "discrete controlled systems")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pvar", help="variation norms over a p-grid")
    p.add_argument("--input", required=True)
    p.add_argument("--p-grid", required=True, metavar="A:B:STEP")
    p.add_argument("--interval", metavar="k,l")
    p.add_argument("--lifted", action="store_true",
                   help="use the homogeneous lifted norm for p in [2,3)")
    p.add_argument("--allow-quasinorm", action="store_true")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_pvar)

    p = sub.add_parser("solve", help="forward trajectory of the driven system")
    p.add_argument("--input", required=True)
    p.add_argument("--field", required=True,
                   choices=["tanh", "sigmoid", "linear", "softplus"])
    p.add_argument("--x0", required=True, metavar="VEC")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("certify", help="stability certificate for a pair")
    p.add_argument("--input", required=True)
    p.add_argument("--input2")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--field", required=True,
                   choices=["tanh", "sigmoid", "linear", "softplus"])
    p.add_argument("--x0", metavar="VEC")
    p.add_argument("--perturb-x0", type=float, default=0.0, metavar="EPS")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("embed", help="embed layer matrices into a driver file")
    p.add_argument("--theta", required=True)
    p.add_argument("--sigma", default="tanh-matvec", choices=["tanh-matvec"])
    p.add_argument("--y0", required=True, metavar="VEC")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_embed)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except RegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
