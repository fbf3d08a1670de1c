"""Command-line front end.

    pwlcenter construct witness.json [--out DIR]
    pwlcenter decompose coeffs.json [--out DIR]
    pwlcenter analyze coeffs.json [--out DIR] [--csv] [--trace X]

Exit codes: 0 success (a decomposition with kind "none" included), 2 malformed
input or constant inner function, 3 non-simple zeros of b, 4 ambiguous tangency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .analysis import AnalysisConfig, center_classify
from .decompose import CompositionWitness, construct_from_witness, find_common_witness
from .errors import (BothZero, ConstantInner, IdenticallyZero, NonSimpleB, PwlError,
                     TangencyAmbiguous)
from .flow import QUAD_TOL, PwlOde, integrate
from .trigpoly import ROOT_TOL, TWO_PI, TrigPoly, zeros_on_period

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_NONSIMPLE = 3
EXIT_NUMERIC = 4


class MalformedInput(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    quad_tol: float = QUAD_TOL
    root_tol: float = ROOT_TOL
    center_tol: float = 1e-6
    grid: int = 41
    x_range: Optional[tuple] = None
    out: Optional[Path] = None
    csv: bool = False
    trace: Optional[float] = None

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "center_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.grid < 3:
            raise ValueError("grid must be at least 3")
        if self.x_range is not None and not self.x_range[0] < self.x_range[1]:
            raise ValueError("x-range needs LO < HI")

    def analysis_config(self) -> AnalysisConfig:
        return AnalysisConfig(quad_tol=self.quad_tol, root_tol=self.root_tol,
                              center_tol=self.center_tol, band_points=self.grid,
                              x_range=self.x_range)

    def tolerances(self) -> dict:
        return {"quad_tol": self.quad_tol, "root_tol": self.root_tol,
                "center_tol": self.center_tol}


# input parsing

def _trig(obj) -> TrigPoly:
    if not isinstance(obj, dict) or not set(obj) <= {"a0", "cos", "sin"}:
        raise MalformedInput(f"expected a trig object with keys a0, cos, sin; got {obj!r}")
    cos, sin = list(obj.get("cos", [])), list(obj.get("sin", []))
    if len(cos) != len(sin):
        raise MalformedInput("cos and sin arrays must have equal length")
    vals = [obj.get("a0", 0.0), *cos, *sin]
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
               for v in vals):
        raise MalformedInput("coefficients must be finite numbers")
    return TrigPoly.from_dict(obj)


def _load(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(str(exc)) from exc
    if not isinstance(data, dict):
        raise MalformedInput("top level must be a JSON object")
    return data


def load_coefficients(path: Path) -> tuple:
    data = _load(path)
    if set(data) != {"a", "b"}:
        raise MalformedInput('coefficient file needs exactly the keys "a" and "b"')
    return _trig(data["a"]), _trig(data["b"])


def load_witness(path: Path) -> CompositionWitness:
    data = _load(path)
    if set(data) != {"p", "q", "h"}:
        raise MalformedInput('witness file needs exactly the keys "p", "q" and "h"')
    for key in ("p", "q"):
        vals = data[key]
        if not isinstance(vals, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise MalformedInput(f"{key} must be a list of numbers")
    _trig(data["h"])
    return CompositionWitness.from_dict(data)


# output

def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else ("nan" if obj != obj else ("inf" if obj > 0 else "-inf"))
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(cfg: RunConfig, files: dict, summary: str):
    """Write ``files`` under ``--out``; without it the first file goes to stdout."""
    if cfg.out is None:
        name = next(iter(files))
        sys.stdout.write(files[name])
        return
    cfg.out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (cfg.out / name).write_text(text)
    print(summary)


# commands

def cmd_construct(cfg: RunConfig) -> int:
    w = load_witness(cfg.input)
    a, b = construct_from_witness(w.p, w.q, w.h)
    if b.is_zero():
        raise MalformedInput("the witness gives b identically zero")
    zeros = zeros_on_period(b, root_tol=cfg.root_tol)
    simple = all(z.simple for z in zeros)
    text = dumps({"a": a.to_dict(), "b": b.to_dict()})
    summary = (f"deg a = {a.degree}, deg b = {b.degree}, "
               f"{len(zeros)} zeros of b, all simple: {simple}")
    if cfg.out is None:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    else:
        _emit(cfg, {"coefficients.json": text}, summary)
    if not simple:
        print("warning: b has a non-simple zero; the analysis assumptions fail", file=sys.stderr)
        return EXIT_NONSIMPLE
    return EXIT_OK


def cmd_decompose(cfg: RunConfig) -> int:
    a, b = load_coefficients(cfg.input)
    outcome = find_common_witness(a, b)
    report = {"outcome": outcome.to_dict(), "tolerances": cfg.tolerances(),
              "input": {"a": a.to_dict(), "b": b.to_dict()}}
    _emit(cfg, {"report.json": dumps(report)}, f"kind = {outcome.kind}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    a, b = load_coefficients(cfg.input)
    ode = PwlOde(a, b)
    report = center_classify(ode, cfg.analysis_config())
    body = report.to_dict()
    body["tau0"] = report.shift
    body["input"] = {"a": a.to_dict(), "b": b.to_dict()}
    disp = _csv(("x", "displacement"), report.samples)
    files = {"report.json": dumps(body), "displacement.csv": disp}
    if cfg.trace is not None:
        files["trace.csv"] = trace_csv(ode.canonical(), cfg.trace, cfg.quad_tol)
    summary = (f"verdict = {report.verdict}, limit cycles = {len(report.limit_cycles)}, "
               f"max|displacement| = {report.max_abs_displacement:.3g}")
    _emit(cfg, files, summary)
    if cfg.csv:
        sys.stdout.write(disp)
    return EXIT_OK


def trace_csv(ode: PwlOde, x0: float, quad_tol: float = QUAD_TOL) -> str:
    tr = integrate(ode, 0.0, x0, TWO_PI, quad_tol)
    # slope is x' at a crossing and x'' at a touch
    rows = [("sample", t, x, s, "") for t, x, s in tr.sample()]
    rows += [("crossing", c.t, 0.0, "", c.slope) for c in tr.crossings]
    rows += [("touch", z.t, 0.0, "", z.curvature) for z in tr.touches]
    return _csv(("kind", "t", "x", "segment_sign", "slope"), rows)


COMMANDS = {"construct": cmd_construct, "decompose": cmd_decompose, "analyze": cmd_analyze}


def _x_range(text: str) -> tuple:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected LO:HI") from exc
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pwlcenter",
                                 description="Global centers of x' = a(t)|x| + b(t).")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", type=Path, help="JSON coefficient or witness file")
    ap.add_argument("--quad-tol", type=float, default=QUAD_TOL)
    ap.add_argument("--root-tol", type=float, default=ROOT_TOL)
    ap.add_argument("--center-tol", type=float, default=1e-6)
    ap.add_argument("--grid", type=int, default=41, help="displacement samples per band")
    ap.add_argument("--x-range", type=_x_range, default=None, metavar="LO:HI",
                    help="span of the outer-band displacement samples")
    ap.add_argument("--out", type=Path, default=None, help="output directory")
    ap.add_argument("--csv", action="store_true", help="also print displacement CSV")
    ap.add_argument("--trace", type=float, default=None, metavar="X",
                    help="write trace.csv for the solution with x(0) = X")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.command, args.input, args.quad_tol, args.root_tol,
                        args.center_tol, args.grid, args.x_range, args.out, args.csv,
                        args.trace)
        return COMMANDS[cfg.command](cfg)
    except (MalformedInput, ValueError, ConstantInner, BothZero, IdenticallyZero) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NonSimpleB as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONSIMPLE
    except TangencyAmbiguous as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PwlError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
