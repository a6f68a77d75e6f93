"""Command-line front end.

    lightning-pde --config problem.json [--out DIR] [--eval "x,y;..."]
                  [--grid NX NY] [--tol X] [--max-dof N] [--seed S] [--dump-config]

Writes ``convergence.csv``, ``certificate.json``, ``solution.csv`` (when
evaluation points are given) and ``field.pgm`` with its ``field.json``
sidecar (when ``--grid`` is given).  Exit status is 0 when the tolerance was
met, 2 when it was not, and 1 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import exprlang
from .basis import OutsideDomainWarning, PlaneWave, PointSource
from .geometry import INSIDE, OUTSIDE, Point, PolygonError, classify, make_polygon
from .solver import (HelmholtzProblem, LaplaceProblem, Schedule, solve_helmholtz_soundsoft,
                     solve_laplace_dirichlet)

log = logging.getLogger("lightning_pde.cli")

EXIT_CONVERGED = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2

COMMON_KEYS = {"type", "vertices", "tolerance", "max_dof", "sigma", "oversample", "center",
               "schedule", "eval_points", "grid"}
LAPLACE_KEYS = COMMON_KEYS | {"boundary_data"}
HELMHOLTZ_KEYS = COMMON_KEYS | {"incident", "k"}
DEFAULTS = {"laplace": {"tolerance": 1e-10, "max_dof": 1200},
            "helmholtz": {"tolerance": 1e-3, "max_dof": 1500}}


class ConfigError(ValueError):
    """Invalid problem definition; the message names the offending key."""

    def __init__(self, key: str, problem: str):
        super().__init__(f"config key {key!r}: {problem}")
        self.key = key


# ----------------------------------------------------------------- parsing

def eval_points_flag(spec: str) -> list[Point]:
    """Parse ``"x1,y1;x2,y2;..."`` into points."""
    points = []
    for i, pair in enumerate(spec.split(";")):
        parts = pair.split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed point #{i + 1} {pair!r}: expected 'x,y'")
        try:
            x, y = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"malformed point #{i + 1} {pair!r}: not a number") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"malformed point #{i + 1} {pair!r}: not finite")
        points.append(Point(x, y))
    return points


def _number(cfg: dict, key: str, *, positive: bool = False, integer: bool = False):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(key, f"must be finite, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(key, f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


def _pair(v, key: str) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        raise ConfigError(key, f"expected [x, y], got {v!r}")
    return complex(v[0], v[1])


def _schedule(v) -> Schedule:
    if not isinstance(v, dict):
        raise ConfigError("schedule", f"expected an object, got {v!r}")
    names = {f.name for f in fields(Schedule)}
    for extra in sorted(set(v) - names):
        log.warning("ignoring unknown key 'schedule.%s'", extra)
    kwargs = {}
    for name in sorted(names & set(v)):
        try:
            kwargs[name] = _number(v, name, positive=True, integer=name != "degree_per_step")
        except ConfigError as exc:
            raise ConfigError(f"schedule.{name}", str(exc).split(": ", 1)[1]) from None
    return Schedule(**kwargs)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON at line {exc.lineno} column {exc.colno}: "
                                    f"{exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return cfg


def build_problem(cfg: dict):
    """Validate a config dictionary and turn it into a solver problem."""
    kind = cfg.get("type")
    if kind not in ("laplace", "helmholtz"):
        raise ConfigError("type", f"expected 'laplace' or 'helmholtz', got {kind!r}")
    allowed = LAPLACE_KEYS if kind == "laplace" else HELMHOLTZ_KEYS
    for extra in sorted(set(cfg) - allowed):
        log.warning("ignoring unknown key %r", extra)

    if "vertices" not in cfg:
        raise ConfigError("vertices", "missing")
    verts = cfg["vertices"]
    if not isinstance(verts, list):
        raise ConfigError("vertices", f"expected a list of [x, y], got {verts!r}")
    try:
        poly = make_polygon([_pair(v, "vertices") for v in verts])
    except PolygonError as exc:
        raise ConfigError("vertices", str(exc)) from None

    opts = dict(DEFAULTS[kind])
    for key in ("tolerance", "max_dof", "sigma", "oversample"):
        if key in cfg:
            opts[key] = _number(cfg, key, positive=True, integer=key in ("max_dof", "oversample"))
    if "oversample" in opts and opts["oversample"] < 2:
        raise ConfigError("oversample", f"must be at least 2, got {opts['oversample']}")
    if "schedule" in cfg:
        opts["schedule"] = _schedule(cfg["schedule"])
    if "center" in cfg:
        c = _pair(cfg["center"], "center")
        if classify(poly, c) != INSIDE:
            raise ConfigError("center", f"{cfg['center']} is not inside the polygon")
        opts["center"] = c

    if kind == "laplace":
        src = cfg.get("boundary_data")
        if not isinstance(src, str):
            raise ConfigError("boundary_data", f"expected an expression string, got {src!r}")
        try:
            tree = exprlang.parse(src)
        except exprlang.ExprSyntaxError as exc:
            raise ConfigError("boundary_data", str(exc)) from None
        return LaplaceProblem(poly, exprlang.as_function(tree), **opts)

    if "k" not in cfg:
        raise ConfigError("k", "missing")
    k = _number(cfg, "k", positive=True)
    return HelmholtzProblem(poly, _incident(cfg.get("incident"), poly), k, **opts)


def _incident(v, poly):
    if not isinstance(v, dict):
        raise ConfigError("incident", f"expected an object, got {v!r}")
    kind = v.get("kind")
    if kind == "plane_wave":
        extra = set(v) - {"kind", "angle_degrees"}
        if "angle_degrees" not in v:
            raise ConfigError("incident.angle_degrees", "missing")
        try:
            angle = _number(v, "angle_degrees")
        except ConfigError as exc:
            raise ConfigError("incident.angle_degrees", str(exc).split(": ", 1)[1]) from None
        inc = PlaneWave.from_degrees(angle)
    elif kind == "point_source":
        extra = set(v) - {"kind", "z0"}
        if "z0" not in v:
            raise ConfigError("incident.z0", "missing")
        z0 = _pair(v["z0"], "incident.z0")
        if classify(poly, z0) != OUTSIDE:
            raise ConfigError("incident.z0", f"{v['z0']} is not strictly outside the scatterer")
        inc = PointSource(z0)
    else:
        raise ConfigError("incident.kind", f"expected 'plane_wave' or 'point_source', "
                                           f"got {kind!r}")
    for e in sorted(extra):
        log.warning("ignoring unknown key 'incident.%s'", e)
    return inc


# ----------------------------------------------------------------- writers

def write_convergence(path: Path, report) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["step", "N", "fit_residual", "validation_residual", "seconds"])
        for i, s in enumerate(report.steps, start=1):
            w.writerow([i, s.N, repr(s.fit_residual_sup), repr(s.validation_residual_sup),
                        f"{s.elapsed_seconds:.6f}"])


def write_certificate(path: Path, sol, report) -> None:
    cert = report.final_certificate
    doc = {"boundary_sup_residual": cert.boundary_sup_residual,
           "N_final": sol.spec.dof,
           "converged": report.converged,
           "validation_point_count": cert.validation_point_count,
           "statement": cert.statement}
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _field_values(sol, prob, z: np.ndarray) -> np.ndarray:
    """Laplace: u.  Helmholtz: total field (complex)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideDomainWarning)
        values = sol(z)
    if isinstance(prob, HelmholtzProblem):
        values = values + prob.incident(prob.k, z)
    return values


def _value_or_nan(sol, prob, z: complex) -> complex:
    try:
        return complex(_field_values(sol, prob, np.array([z]))[0])
    except ValueError:
        log.warning("evaluation point (%r, %r) is a singularity of the expansion",
                    float(z.real), float(z.imag))
        return complex(np.nan, np.nan)


def write_solution(path: Path, sol, prob, points: Sequence[Point]) -> None:
    z = np.array([p.x + 1j * p.y for p in points], dtype=complex)
    poly = prob.polygon if isinstance(prob, LaplaceProblem) else prob.scatterer
    wanted = INSIDE if isinstance(prob, LaplaceProblem) else OUTSIDE
    codes = classify(poly, z)
    for p, c in zip(points, codes):
        if c != wanted and c != 2:
            log.warning("evaluation point (%r, %r) lies outside the problem domain", p.x, p.y)
    try:
        values = _field_values(sol, prob, z)
    except ValueError:
        # some point sits on a singularity of the expansion; report it as nan
        values = np.array([_value_or_nan(sol, prob, zz) for zz in z])
    complex_out = isinstance(prob, HelmholtzProblem)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "y", "value", "value_imag"] if complex_out else ["x", "y", "value"])
        for p, v in zip(points, values):
            row = [repr(p.x), repr(p.y), repr(float(v.real))]
            if complex_out:
                row.append(repr(float(v.imag)))
            w.writerow(row)


def raster_box(prob) -> tuple[float, float, float, float]:
    """Raster extent ``(xmin, ymin, xmax, ymax)``: the polygon's box, or a box
    three times larger for scatterers."""
    poly = prob.polygon if isinstance(prob, LaplaceProblem) else prob.scatterer
    xmin, xmax, ymin, ymax = poly.bounding_box
    if isinstance(prob, HelmholtzProblem):
        w, h = xmax - xmin, ymax - ymin
        xmin, xmax, ymin, ymax = xmin - w, xmax + w, ymin - h, ymax + h
    return xmin, ymin, xmax, ymax


def write_field(pgm_path: Path, json_path: Path, sol, prob, nx: int, ny: int) -> None:
    """8-bit raster, row 0 at the top.  Valid pixels map linearly onto 1..255; 0 is blank."""
    xmin, ymin, xmax, ymax = raster_box(prob)
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymax, ymin, ny)
    z = xs[None, :] + 1j * ys[:, None]
    poly = prob.polygon if isinstance(prob, LaplaceProblem) else prob.scatterer
    wanted = INSIDE if isinstance(prob, LaplaceProblem) else OUTSIDE
    valid = classify(poly, z.ravel()).reshape(z.shape) == wanted
    if isinstance(prob, HelmholtzProblem) and isinstance(prob.incident, PointSource):
        valid &= z != prob.incident.z0
    gray = np.zeros(z.shape, dtype=np.uint8)
    lo = hi = None
    if valid.any():
        values = np.real(_field_values(sol, prob, z[valid]))
        lo, hi = float(values.min()), float(values.max())
        span = hi - lo
        scaled = (values - lo) / span if span > 0 else np.full(values.shape, 0.5)
        gray[valid] = 1 + np.rint(254 * scaled).astype(np.uint8)
    with open(pgm_path, "wb") as f:
        f.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        f.write(gray.tobytes())
    doc = {"min": lo, "max": hi, "nx": nx, "ny": ny,
           "bounding_box": {"xmin": xmin, "ymin": ymin, "xmax": xmax, "ymax": ymax},
           "quantity": "u" if isinstance(prob, LaplaceProblem) else "Re(total field)",
           "mapping": "gray = 1 + round(254 * (value - min) / (max - min))",
           "blank_value": 0,
           "blank_pixels": int((~valid).sum()),
           "blank_reason": "pixel lies outside the problem domain or on its boundary",
           "row_order": "top (y = max) to bottom (y = min)"}
    json_path.write_text(json.dumps(doc, indent=2) + "\n")


def effective_config(cfg: dict, args) -> dict:
    """The config with command-line overrides folded in."""
    out = dict(cfg)
    out.setdefault("tolerance", DEFAULTS.get(cfg.get("type"), {}).get("tolerance"))
    out.setdefault("max_dof", DEFAULTS.get(cfg.get("type"), {}).get("max_dof"))
    if args.tol is not None:
        out["tolerance"] = args.tol
    if args.max_dof is not None:
        out["max_dof"] = args.max_dof
    if args.eval is not None:
        out["eval_points"] = [[p.x, p.y] for p in eval_points_flag(args.eval)]
    if args.grid is not None:
        out["grid"] = list(args.grid)
    return out


# --------------------------------------------------------------------- run

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lightning-pde",
                                description="Lightning solver for Laplace and Helmholtz "
                                            "problems on polygons.")
    p.add_argument("--config", required=True, help="problem definition (JSON)")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--eval", metavar="X,Y;...", help="evaluation points for solution.csv")
    p.add_argument("--grid", nargs=2, type=int, metavar=("NX", "NY"),
                   help="write an NX by NY raster to field.pgm")
    p.add_argument("--tol", type=float, help="override the tolerance")
    p.add_argument("--max-dof", type=int, help="override max_dof")
    p.add_argument("--seed", type=int, help="reserved; runs are deterministic")
    p.add_argument("--dump-config", action="store_true",
                   help="write the effective configuration to config.json in --out")
    return p


def _eval_points(cfg: dict) -> Optional[list[Point]]:
    if "eval_points" not in cfg:
        return None
    pts = cfg["eval_points"]
    if not isinstance(pts, list):
        raise ConfigError("eval_points", f"expected a list of [x, y], got {pts!r}")
    return [Point(c.real, c.imag) for c in (_pair(p, "eval_points") for p in pts)]


def _grid(cfg: dict) -> Optional[tuple[int, int]]:
    if "grid" not in cfg:
        return None
    g = cfg["grid"]
    if (not isinstance(g, list) or len(g) != 2
            or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 2 for n in g)):
        raise ConfigError("grid", f"expected [nx, ny] with integers >= 2, got {g!r}")
    return g[0], g[1]


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(load_config(args.config), args)
        prob = build_problem(cfg)
        points = _eval_points(cfg)
        grid = _grid(cfg)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            msg = str(exc)
        elif args.eval is not None and "malformed point" in str(exc):
            msg = f"--eval: {exc}"
        else:
            msg = f"config key {_guess_key(exc)!r}: {exc}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.dump_config:
        dumped = dict(cfg)
        dumped.setdefault("sigma", prob.sigma)
        dumped.setdefault("oversample", prob.oversample)
        dumped.setdefault("schedule", asdict(prob.schedule))
        (out / "config.json").write_text(json.dumps(dumped, indent=2) + "\n")

    try:
        if isinstance(prob, LaplaceProblem):
            sol, report = solve_laplace_dirichlet(prob)
        else:
            sol, report = solve_helmholtz_soundsoft(prob)
    except ValueError as exc:
        key = "boundary_data" if "boundary data" in str(exc) else "max_dof"
        print(f"error: config key {key!r}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    write_convergence(out / "convergence.csv", report)
    write_certificate(out / "certificate.json", sol, report)
    if points:
        write_solution(out / "solution.csv", sol, prob, points)
    if grid:
        write_field(out / "field.pgm", out / "field.json", sol, prob, *grid)

    cert = report.final_certificate
    status = "converged" if report.converged else "did not converge"
    print(f"{status}: N={sol.spec.dof} boundary residual {cert.boundary_sup_residual:.3e}")
    return EXIT_CONVERGED if report.converged else EXIT_NOT_CONVERGED


def _guess_key(exc: Exception) -> str:
    text = str(exc)
    for key in ("tolerance", "max_dof", "oversample", "sigma", "k", "center"):
        if key in text:
            return key
    return "config"


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
