"""Command line interface, zero files and result serialization.

Commands::

    zetapair bounds      --kernel mt --b 1
    zetapair bounds      --kernel fejer --grid 0:4:0.2 --format json
    zetapair kernel-eval --kernel mt --b 1 --z 3+0.5j
    zetapair zeros       --t-max 1000
    zetapair paircorr    --zeros z.txt --T 2500 --alpha-grid 0.05:1:0.05
    zetapair paircorr    --zeros z.txt --x 10 --window 2500:5000
    zetapair verify      [--only kernels,bounds] [--tolerance 1e-30]

Exit codes: 0 success, 1 failure, 2 usage error, 3 zero-count mismatch,
4 corrupt cache file.  The cache directory defaults to
``~/.cache/zetapair`` and can be moved with ``ZETAPAIR_CACHE_DIR``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import logging
import math
import os
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import table
from .kernels import KernelId, TsangParams, kernel, kernel_hat, tsang_K
from .paircorr import F_pair_sum, PairSumSpec, calF_pair_sum, form_factor_curve
from .quadrature import QuadratureConfig
from .zeta_zeros import ZeroDataset, compute_zeros, n_of_T

__all__ = [
    "RunConfig",
    "ZeroFileError",
    "dumps_json",
    "format_csv",
    "main",
    "main_entry",
    "parse_grid",
    "parse_zero_file",
    "write_zero_file",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_COUNT_MISMATCH = 3
EXIT_CACHE_CORRUPT = 4

CACHE_ENV = "ZETAPAIR_CACHE_DIR"
POINTS_PER_GAP = 6.0


class ZeroFileError(ValueError):
    """A zero file could not be parsed."""


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- serialization


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {dumps_json(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return {None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV text with LF endings; floats use the shortest round-tripping form."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ------------------------------------------------------------------ zero files


def write_zero_file(ds: ZeroDataset, path: str | os.PathLike, header: dict | None = None) -> None:
    """Write ordinates, one per line with 12 significant digits, after '#' headers."""
    lines = [
        f"# source: {ds.source}",
        f"# t-range: {_fmt(ds.t_min)} {_fmt(ds.t_max)}",
        f"# build: zetapair {__version__}",
    ]
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {value}")
    body = [format(float(g), ".12g") for g in ds.gammas]
    for prev, cur in zip(body, body[1:]):
        if float(cur) <= float(prev):
            raise ValueError(f"ordinates {prev} and {cur} collide at 12 significant digits")
    text = "\n".join(lines + body) + "\n"
    Path(path).write_text(text, encoding="ascii", newline="\n")


def parse_zero_file(path: str | os.PathLike) -> ZeroDataset:
    """Read a zero file; all zeros are taken on the critical line and simple."""
    path = Path(path)
    if not path.is_file():
        raise ZeroFileError(f"{path}: no such file")
    gammas: list[float] = []
    t_range = None
    with path.open("r", encoding="ascii", errors="strict") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("t-range:"):
                    parts = body.split(":", 1)[1].split()
                    try:
                        t_range = (float(parts[0]), float(parts[1]))
                    except (IndexError, ValueError):
                        raise ZeroFileError(f"{path}:{lineno}: malformed t-range header") from None
                continue
            try:
                value = float(line)
            except ValueError:
                raise ZeroFileError(f"{path}:{lineno}: malformed ordinate {line!r}") from None
            if not (math.isfinite(value) and value > 0):
                raise ZeroFileError(f"{path}:{lineno}: ordinate must be finite and positive")
            if gammas and value <= gammas[-1]:
                raise ZeroFileError(
                    f"{path}:{lineno}: ordinate {line} does not exceed the previous one ({gammas[-1]!r})"
                )
            gammas.append(value)
    if not gammas:
        raise ZeroFileError(f"{path}: file contains no ordinates")
    lo, hi = gammas[0], gammas[-1]
    if t_range is not None:
        lo, hi = min(lo, t_range[0]), max(hi, t_range[1])
    return ZeroDataset(np.array(gammas), None, None, lo, hi, source="file", on_line=True)


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "zetapair")


def cache_path(t_min: float, t_max: float, points_per_gap: float = POINTS_PER_GAP) -> Path:
    key = f"{t_min!r}|{t_max!r}|{points_per_gap!r}|{__version__}"
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    return cache_dir() / f"zeros_{t_min:g}_{t_max:g}_{digest}.txt"


# --------------------------------------------------------------------- config


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not (math.isfinite(start) and math.isfinite(stop) and step > 0 and stop >= start):
            raise UsageError(f"invalid grid {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + k * step, 12) for k in range(n)]
    else:
        try:
            values = [float(p) for p in text.split(",") if p.strip()]
        except ValueError:
            raise UsageError(f"invalid grid {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise UsageError(f"grid {text!r} is empty or not finite")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"grid {text!r} is not strictly increasing")
    return values


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"window must be lo:hi, got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"window needs lo < hi, got {text!r}")
    return lo, hi


@dataclass
class RunConfig:
    command: str
    kernel: KernelId = KernelId.MONTGOMERY_TAYLOR
    b_values: list[float] = field(default_factory=list)
    T: float | None = None
    x: float | None = None
    alphas: list[float] = field(default_factory=list)
    window: tuple[float, float] | None = None
    zero_file: Path | None = None
    output_format: str = "csv"
    output: Path | None = None
    t_min: float = 10.0
    t_max: float | None = None
    use_cache: bool = True
    weight: str = "w"
    truncation_gap: float | None = None
    min_zeros: int = 500
    z: complex = 0j
    alpha: float | None = None
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=ns.command)
        if getattr(ns, "kernel", None) is not None:
            try:
                cfg.kernel = KernelId.parse(ns.kernel)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        if getattr(ns, "abs_tol", None) or getattr(ns, "rel_tol", None):
            cfg.quad = QuadratureConfig(
                abs_tol=ns.abs_tol or cfg.quad.abs_tol, rel_tol=ns.rel_tol or cfg.quad.rel_tol
            )
        cfg.output_format = getattr(ns, "format", None) or "csv"
        if ns.command == "bounds":
            if ns.b is not None:
                cfg.b_values = [ns.b]
            elif ns.grid is not None:
                cfg.b_values = parse_grid(ns.grid)
            else:
                raise UsageError("bounds needs --b or --grid")
            bad = [b for b in cfg.b_values if not (math.isfinite(b) and b >= 0)]
            if bad:
                raise UsageError(f"b must be >= 0, got {bad[0]!r}")
        elif ns.command == "zeros":
            cfg.t_min, cfg.t_max = ns.t_min, ns.t_max
            if not (10.0 <= cfg.t_min < cfg.t_max <= 1e6):
                raise UsageError("need 10 <= t-min < t-max <= 1e6")
            cfg.use_cache = not ns.no_cache
            cfg.output = Path(ns.out) if ns.out else None
        elif ns.command == "paircorr":
            if ns.x is not None:
                if not (math.isfinite(ns.x) and ns.x > 0):
                    raise UsageError("x > 0 required")
                cfg.x = ns.x
            if ns.T is not None:
                if not ns.T > 0:
                    raise UsageError("T > 0 required")
                cfg.T = ns.T
            if ns.alpha_grid is not None:
                cfg.alphas = parse_grid(ns.alpha_grid)
                if any(a <= 0 for a in cfg.alphas):
                    raise UsageError("alpha must be positive")
            if ns.window is not None:
                cfg.window = _parse_window(ns.window)
            if cfg.x is None and not cfg.alphas:
                raise UsageError("paircorr needs --x or --alpha-grid")
            if cfg.alphas and cfg.T is None:
                raise UsageError("--alpha-grid needs --T")
            if cfg.x is not None and cfg.window is None and cfg.T is None:
                raise UsageError("--x needs --window or --T")
            cfg.weight = ns.weight
            cfg.truncation_gap = ns.truncation_gap
            cfg.min_zeros = ns.min_zeros
            if ns.zeros is None:
                raise UsageError("paircorr needs --zeros FILE")
            cfg.zero_file = Path(ns.zeros)
            if not cfg.zero_file.is_file():
                raise UsageError(f"zero file {cfg.zero_file} does not exist")
            if ns.format is None:
                cfg.output_format = "csv" if cfg.alphas else "json"
        elif ns.command == "kernel-eval":
            if not (math.isfinite(ns.b) and ns.b >= 0):
                raise UsageError("b must be >= 0")
            cfg.b_values = [ns.b]
            try:
                cfg.z = complex(ns.z.replace(" ", ""))
            except ValueError:
                raise UsageError(f"invalid complex number {ns.z!r}") from None
            cfg.alpha = ns.alpha
            cfg.output_format = "json"
        return cfg


# ------------------------------------------------------------------- commands


def _emit(text: str, out=None) -> None:
    (out or sys.stdout).write(text if text.endswith("\n") else text + "\n")


def cmd_bounds(cfg: RunConfig, out=None) -> int:
    rows = table(cfg.kernel, cfg.b_values)
    records = [r.as_dict(clamp=True) for r in rows]
    if cfg.output_format == "json":
        _emit(dumps_json(records), out)
    else:
        header = ["kernel", "b", "c_b", "simple_coeff", "critical_coeff", "simple_critical_coeff"]
        _emit(format_csv(header, [[r[h] for h in header] for r in records]), out)
    return EXIT_OK


def cmd_kernel_eval(cfg: RunConfig, out=None) -> int:
    b = cfg.b_values[0]
    z = cfg.z
    params = TsangParams(b, cfg.kernel)
    k = tsang_K(params, z, cfg.quad)
    record = {
        "kernel": cfg.kernel.value,
        "b": b,
        "z_re": z.real,
        "z_im": z.imag,
        "K_re": k.real,
        "K_im": k.imag,
    }
    if cfg.alpha is not None:
        record["alpha"] = cfg.alpha
        record["j"] = float(kernel(cfg.kernel, cfg.alpha))
        record["j_hat"] = float(kernel_hat(cfg.kernel, cfg.alpha))
    _emit(dumps_json(record), out)
    return EXIT_OK


def _load_or_compute(t_min: float, t_max: float, use_cache: bool) -> tuple[ZeroDataset, Path, bool]:
    path = cache_path(t_min, t_max)
    if use_cache and path.exists():
        return parse_zero_file(path), path, True
    ds = compute_zeros(t_min, t_max, points_per_gap=POINTS_PER_GAP)
    if use_cache:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_zero_file(ds, path, {"points-per-gap": _fmt(POINTS_PER_GAP)})
    return ds, path, False


def cmd_zeros(cfg: RunConfig, out=None) -> int:
    try:
        ds, path, cached = _load_or_compute(cfg.t_min, cfg.t_max, cfg.use_cache)
    except ZeroFileError as exc:
        print(f"error: corrupt zero cache: {exc}", file=sys.stderr)
        return EXIT_CACHE_CORRUPT
    if cfg.output is not None:
        if cached:
            shutil.copyfile(path, cfg.output)
        else:
            write_zero_file(ds, cfg.output, {"points-per-gap": _fmt(POINTS_PER_GAP)})
    expected = n_of_T(cfg.t_max) - n_of_T(cfg.t_min)
    allowed = 2.0 + math.log(cfg.t_max)
    mismatch = abs(len(ds) - expected)
    report = {
        "t_min": cfg.t_min,
        "t_max": cfg.t_max,
        "n_zeros": len(ds),
        "n_of_T_difference": expected,
        "discrepancy": len(ds) - expected,
        "allowed": allowed,
        "consistent": mismatch <= allowed,
        "cached": cached,
        "file": str(cfg.output or path),
    }
    _emit(dumps_json(report), out)
    if mismatch > allowed:
        print("warning: zero count disagrees with N(T)", file=sys.stderr)
        return EXIT_COUNT_MISMATCH
    return EXIT_OK


def cmd_paircorr(cfg: RunConfig, out=None) -> int:
    ds = parse_zero_file(cfg.zero_file)
    if cfg.alphas:
        beyond = [a for a in cfg.alphas if a > 1]
        if beyond:
            print("note: alpha > 1 lies outside 1 <= x <= T; shown for display only", file=sys.stderr)
        points = form_factor_curve(ds, cfg.T, cfg.alphas, min_zeros=cfg.min_zeros, allow_beyond=True)
        if cfg.output_format == "json":
            _emit(dumps_json([p._asdict() for p in points]), out)
        else:
            _emit(format_csv(["alpha", "empirical", "theory"], [tuple(map(float, p)) for p in points]), out)
        return EXIT_OK

    lo, hi = cfg.window if cfg.window is not None else (cfg.T, 2.0 * cfg.T)
    spec = PairSumSpec(cfg.x, lo, hi, weight=cfg.weight, truncation_gap=cfg.truncation_gap)
    result = F_pair_sum(ds, spec) if cfg.weight == "w" else calF_pair_sum(ds, spec)
    record = result.as_dict()
    if cfg.output_format == "csv":
        _emit(format_csv(list(record), [list(record.values())]), out)
    else:
        _emit(dumps_json(record), out)
    return EXIT_OK


def cmd_verify(ns: argparse.Namespace, out=None) -> int:
    from .verify import run_suite

    only = [s.strip() for s in ns.only.split(",")] if ns.only else None
    try:
        return run_suite(only=only, tolerance=ns.tolerance, out=out or sys.stdout)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zetapair", description="Pair correlation of zeta zeros.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def tol_args(p):
        p.add_argument("--abs-tol", type=float, default=None)
        p.add_argument("--rel-tol", type=float, default=None)

    p = sub.add_parser("bounds", help="lower-bound coefficients 2 - C_b and 3 - 2 C_b")
    p.add_argument("--kernel", default="mt")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--b", type=float)
    g.add_argument("--grid", help="start:stop:step or comma list")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("kernel-eval", help="evaluate j, its transform and K_b")
    p.add_argument("--kernel", default="mt")
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--z", default="0", help="complex argument, e.g. 3+0.5j")
    p.add_argument("--alpha", type=float, help="also report j(alpha) and its transform at alpha")
    tol_args(p)

    p = sub.add_parser("zeros", help="compute (or load cached) zeros on the critical line")
    p.add_argument("--t-min", type=float, default=10.0)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--out", help="also write the zero file here")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("paircorr", help="pair sums and the form-factor curve")
    p.add_argument("--zeros", help="zero file")
    p.add_argument("--x", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--alpha-grid")
    p.add_argument("--window", help="lo:hi height window")
    p.add_argument("--weight", choices=("w", "W"), default="w")
    p.add_argument("--truncation-gap", type=float)
    p.add_argument("--min-zeros", type=int, default=500)
    p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", help="comma-separated groups")
    p.add_argument("--tolerance", type=float, help="override every comparison tolerance")
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    commands = {
        "bounds": cmd_bounds,
        "kernel-eval": cmd_kernel_eval,
        "zeros": cmd_zeros,
        "paircorr": cmd_paircorr,
    }
    try:
        if ns.command == "verify":
            return cmd_verify(ns, out)
        cfg = RunConfig.from_args(ns)
        return commands[ns.command](cfg, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
