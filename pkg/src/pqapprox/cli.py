"""Command-line front end.

Exit codes: 0 success, 1 computation or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, corpus
from .convergence import (
    DEFAULT_GRID,
    default_workers,
    grid,
    make_sequence,
    run_bound_experiment,
    voronovskaja_table,
)
from .moments import StructureViolation, central_moment_pq, estimate_constants, lemma2_residual, lemma3_decompose
from .operators import apply, apply_grid, apply_higher, apply_higher_grid
from .pq_core import Mode, PQParams, parse_scalar

COMMANDS = ("eval", "moments", "recurrence-check", "converge", "voronovskaja", "constants")
SCHEMES = ("fixed", "one-minus-reciprocal")
EXACT_ONLY = ("moments", "recurrence-check")
FLOAT_ONLY = ("converge", "voronovskaja", "constants")
PLOTTABLE = ("eval", "converge", "voronovskaja", "constants")
CONFIG_KEYS = (
    "n", "n_list", "p", "q", "scheme", "r", "m", "function", "grid", "mode", "output", "out", "plot",
)  # fmt: skip

DEFAULTS = {
    "eval": {"n": "16", "p": "1", "q": "1/2", "r": 0, "function": "sin"},
    "moments": {"n": "4", "m": "3", "p": "1", "q": "1/2"},
    "recurrence-check": {"n": "2..6", "m": "1..4", "p": "3/4", "q": "1/2"},
    "converge": {"n": "16,32,64,128,256", "r": 0, "function": "sin"},
    "voronovskaja": {"n": "16,64,256", "function": "exp"},
    "constants": {"n": "128,256", "m": "1..5", "p": "1", "q": "9/10"},
}


class UsageError(Exception):
    pass


class ComputationError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_list: tuple
    p: Optional[str]
    q: Optional[str]
    scheme: Optional[str]
    r: int
    m_list: tuple
    function: Optional[str]
    grid_size: int
    mode: str
    output: str
    out_path: Optional[str]
    plot: bool

    def params(self) -> PQParams:
        mode = Mode(self.mode)
        return PQParams(parse_scalar(self.p, mode), parse_scalar(self.q, mode), mode)

    def echo(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["m_list"] = list(self.m_list)
        return d


@dataclass
class ResultTable:
    schema: list
    rows: list
    meta: dict = field(default_factory=dict)


def parse_int_list(text: str, key: str) -> tuple:
    """``"5"``, ``"2,3,4"`` or the inclusive range ``"2..6"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"--{key.replace('_', '-')}: cannot parse integer list {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pqapprox", description="Revised (p,q)-Bernstein operator experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with default values for the flags below")
        sp.add_argument("--n", help="degree, comma list, or lo..hi range")
        sp.add_argument("--n-list", dest="n_list", help="alias of --n taking a list")
        sp.add_argument("--p")
        sp.add_argument("--q")
        sp.add_argument("--scheme", choices=SCHEMES)
        sp.add_argument("--r", type=int)
        sp.add_argument("--m", help="moment order, comma list, or lo..hi range")
        sp.add_argument("--function", choices=sorted(corpus.CORPUS))
        sp.add_argument("--grid", type=int)
        sp.add_argument("--mode", choices=("float", "rational"))
        sp.add_argument("--output", choices=("csv", "json"))
        sp.add_argument("--out", help="output path (stdout when omitted)")
        sp.add_argument("--plot", action="store_true", default=None, help="also write a gnuplot script")
    return ap


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    for key in data:
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
    return data


def parse_config(argv: Sequence[str]) -> RunConfig:
    try:
        ns = _parser().parse_args(list(argv))
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line") from None
    cmd = ns.command
    values = dict(DEFAULTS[cmd])
    layers = [_load_config_file(ns.config)] if ns.config else []
    layers.append({k: v for k, v in vars(ns).items() if k not in ("command", "config") and v is not None})
    for layer in layers:
        if "n" in layer and "n_list" in layer:
            raise UsageError("give only one of n and n_list")
        if "n_list" in layer:
            layer["n"] = layer.pop("n_list")
        values.update(layer)

    mode = values.get("mode", "rational" if cmd in EXACT_ONLY else "float")
    if cmd in EXACT_ONLY and mode != "rational":
        raise UsageError(f"{cmd} checks exact identities; --mode must be rational")
    if cmd in FLOAT_ONLY and mode != "float":
        raise UsageError(f"{cmd} runs float experiments; --mode must be float")

    scheme = values.get("scheme")
    if cmd in ("converge", "voronovskaja"):
        if scheme is None:
            scheme = "fixed" if ("p" in values or "q" in values) else "one-minus-reciprocal"
        if scheme == "fixed" and not ("p" in values and "q" in values):
            raise UsageError("--scheme fixed needs --p and --q")
    elif scheme is not None:
        raise UsageError(f"--scheme is not used by {cmd}")

    p = values.get("p")
    q = values.get("q")
    if (p is None) != (q is None):
        raise UsageError("give both --p and --q")
    cfg = RunConfig(
        command=cmd,
        n_list=parse_int_list(values["n"], "n"),
        p=None if p is None else str(p),
        q=None if q is None else str(q),
        scheme=scheme,
        r=int(values.get("r", 0)),
        m_list=parse_int_list(values.get("m", "0"), "m") if "m" in values else (),
        function=values.get("function"),
        grid_size=int(values.get("grid", DEFAULT_GRID)),
        mode=mode,
        output=values.get("output", "csv"),
        out_path=values.get("out"),
        plot=bool(values.get("plot", False)),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if not cfg.n_list:
        raise UsageError("--n: empty list")
    if min(cfg.n_list) < 1:
        raise UsageError("--n: degrees must be >= 1")
    if cfg.scheme == "one-minus-reciprocal" and min(cfg.n_list) < 2:
        raise UsageError("--n: one-minus-reciprocal needs n >= 2")
    if cfg.grid_size < 64:
        raise UsageError("--grid must be at least 64")
    if cfg.r < 0:
        raise UsageError("--r must be nonnegative")
    if cfg.output not in ("csv", "json"):
        raise UsageError(f"--output: unknown format {cfg.output!r}")
    if cfg.p is not None:
        try:
            cfg.params()
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--p/--q: {exc}") from None
    if cfg.function is not None:
        bundle = corpus.get(cfg.function)
        if cfg.r > bundle.r_max:
            raise UsageError(f"--r {cfg.r} exceeds the derivatives available for {cfg.function} ({bundle.r_max})")
        if cfg.command == "voronovskaja" and bundle.r_max < 2:
            raise UsageError(f"--function {cfg.function} has no second derivative")
        if cfg.mode == "rational" and cfg.function not in ("one", "t", "t2", "t3"):
            raise UsageError(f"--function {cfg.function} cannot be evaluated exactly; use float mode")
    if cfg.command in ("moments", "recurrence-check", "constants"):
        if not cfg.m_list:
            raise UsageError("--m is required")
        if cfg.command == "recurrence-check" and min(cfg.m_list) < 1:
            raise UsageError("--m: recurrence orders must be >= 1")
        if min(cfg.m_list) < 0:
            raise UsageError("--m: orders must be nonnegative")
    if any(b < a for a, b in zip(cfg.n_list, cfg.n_list[1:])):
        raise UsageError("--n: list must be non-decreasing")
    if cfg.plot and (cfg.out_path is None or cfg.output != "csv"):
        raise UsageError("--plot needs --out and csv output")
    if cfg.plot and cfg.command not in PLOTTABLE:
        raise UsageError(f"--plot is not available for {cfg.command}")
    try:
        default_workers()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _sequence(cfg: RunConfig):
    if cfg.scheme == "fixed":
        params = cfg.params()
        return make_sequence("fixed", params.p, params.q)
    return make_sequence(cfg.scheme)


def _run_eval(cfg: RunConfig) -> ResultTable:
    bundle = corpus.get(cfg.function)
    params = cfg.params()
    n = cfg.n_list[0]
    rows = []
    if params.exact_mode:
        for i in range(cfg.grid_size + 1):
            x = Fraction(i, cfg.grid_size)
            fx = bundle.f(x)
            b0 = apply(bundle.f, n, params, x)
            br = apply_higher(bundle, cfg.r, n, params, x)
            rows.append([x, b0, br, fx, abs(br - fx)])
    else:
        xs = grid(cfg.grid_size)
        fx = np.broadcast_to(np.asarray(bundle.f(xs), dtype=np.float64), xs.shape)
        b0 = apply_grid(bundle.f, n, params, xs)
        br = apply_higher_grid(bundle, cfg.r, n, params, xs)
        rows = [[float(x), float(a), float(b), float(c), float(abs(b - c))] for x, a, b, c in zip(xs, b0, br, fx)]
    return ResultTable(["x", "Bf", "Brf", "f", "error"], rows)


def _run_moments(cfg: RunConfig) -> ResultTable:
    params = cfg.params()
    rows = []
    for n in cfg.n_list:
        for m in cfg.m_list:
            poly = central_moment_pq(n, m, params).poly
            for k, c in enumerate(poly.coeffs):
                rows.append([n, m, "moment_coeff", k, c])
            if m >= 2:
                try:
                    dec = lemma3_decompose(n, m, params)
                except StructureViolation as exc:
                    raise ComputationError(str(exc)) from None
                for k, b in enumerate(dec.b):
                    rows.append([n, m, "b", k, b])
    return ResultTable(["n", "m", "quantity", "k", "value"], rows)


def _run_recurrence(cfg: RunConfig) -> ResultTable:
    params = cfg.params()
    rows, failures = [], []
    for n in cfg.n_list:
        for m in cfg.m_list:
            res = lemma2_residual(n, m, params)
            verdict = "zero residual" if res.is_zero() else "nonzero residual"
            if not res.is_zero():
                failures.append((n, m))
            rows.append([n, m, params.p, params.q, verdict, res.degree])
    table = ResultTable(["n", "m", "p", "q", "verdict", "residual_degree"], rows)
    table.meta["failures"] = [f"n={n} m={m} p={params.p} q={params.q}" for n, m in failures]
    return table


def _run_converge(cfg: RunConfig) -> ResultTable:
    bundle = corpus.get(cfg.function)
    recs = run_bound_experiment(bundle, cfg.r, _sequence(cfg), list(cfg.n_list), cfg.grid_size)
    schema = ["n", "p_n", "q_n", "bracket_n", "sup_error", "omega", "bound", "ratio"]
    return ResultTable(schema, [[getattr(rec, c) for c in schema] for rec in recs])


def _run_voronovskaja(cfg: RunConfig) -> ResultTable:
    bundle = corpus.get(cfg.function)
    table = voronovskaja_table(bundle, _sequence(cfg), list(cfg.n_list), cfg.grid_size)
    schema = ["n", "p_n", "q_n", "bracket_n", "deviation"]
    return ResultTable(schema, [[getattr(row, c) for c in schema] for row in table])


def _run_constants(cfg: RunConfig) -> ResultTable:
    params = cfg.params()
    rows = []
    for m in cfg.m_list:
        est = estimate_constants(m, list(cfg.n_list), [params], grid_size=cfg.grid_size)
        rows.append([m, est.C_hat, est.K_hat])
    return ResultTable(["m", "C_hat", "K_hat"], rows)


RUNNERS = {
    "eval": _run_eval,
    "moments": _run_moments,
    "recurrence-check": _run_recurrence,
    "converge": _run_converge,
    "voronovskaja": _run_voronovskaja,
    "constants": _run_constants,
}


def run(cfg: RunConfig) -> ResultTable:
    table = RUNNERS[cfg.command](cfg)
    table.meta.update({"command": cfg.command, "config": cfg.echo(), "version": __version__, "mode": cfg.mode})
    table.meta["grid"] = f"x = i/{cfg.grid_size}"
    return table


def render(table: ResultTable, fmt: str) -> str:
    cells = [[format_value(v) for v in row] for row in table.rows]
    if fmt == "json":
        doc = {"meta": table.meta, "schema": list(table.schema), "rows": cells}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(table.meta, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.schema)
    writer.writerows(cells)
    return buf.getvalue()


def plot_script(table: ResultTable, csv_path: str) -> str:
    cmd = table.meta.get("command")
    col = {name: i + 1 for i, name in enumerate(table.schema)}
    lines = ["set datafile separator ','", "set key left top", f"# data: {csv_path}"]
    src = json.dumps(str(csv_path))
    if cmd == "converge":
        lines += ["set logscale xy", "set xlabel '[n]'", "set ylabel 'sup error'"]
        body = f"plot {src} every ::1 using {col['bracket_n']}:{col['sup_error']} with linespoints title 'sup error', \\\n     {src} every ::1 using {col['bracket_n']}:{col['bound']} with linespoints title 'bound'"
    elif cmd == "voronovskaja":
        lines += ["set logscale xy", "set xlabel 'n'", "set ylabel 'deviation'"]
        body = f"plot {src} every ::1 using {col['n']}:{col['deviation']} with linespoints title 'deviation'"
    elif cmd == "constants":
        lines += ["set xlabel 'm'"]
        body = f"plot {src} every ::1 using {col['m']}:{col['C_hat']} with linespoints title 'C', \\\n     {src} every ::1 using {col['m']}:{col['K_hat']} with linespoints title 'K'"
    else:
        lines += ["set xlabel 'x'"]
        body = f"plot {src} every ::1 using {col['x']}:{col['Brf']} with lines title 'B^[r] f', \\\n     {src} every ::1 using {col['x']}:{col['f']} with lines title 'f'"
    lines.append(body)
    return "\n".join(lines) + "\n"


def emit(table: ResultTable, fmt: str, path: Optional[str], plot: bool = False):
    text = render(table, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
        if plot:
            Path(str(path) + ".gp").write_text(plot_script(table, path))
    except OSError as exc:
        raise ComputationError(f"cannot write {path}: {exc}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"pqapprox: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        table = run(cfg)
        emit(table, cfg.output, cfg.out_path, cfg.plot)
    except ComputationError as exc:
        print(f"pqapprox: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError) as exc:
        where = f"n={list(cfg.n_list)} m={list(cfg.m_list)} p={cfg.p} q={cfg.q}"
        print(f"pqapprox: error ({where}): {exc}", file=sys.stderr)
        return 1
    failures = table.meta.get("failures")
    if failures:
        print("pqapprox: nonzero residual for " + "; ".join(failures), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
