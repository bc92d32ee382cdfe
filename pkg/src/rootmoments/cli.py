"""Command-line batch surface.

Every command takes ``--q`` (a prime, a comma list, or ``primes:LO:HI[:STEP]``)
and writes one CSV (or JSON) document.  CSV output starts with ``#`` header
lines carrying the package version, the resolved configuration, its hash and
the smoothing-spec digests; floats are printed with 17 significant digits and
complex numbers as two columns.  Output never contains timestamps, so equal
configurations give byte-identical files.

Exit codes: 0 success, 1 assertion failure, 2 usage error, 3 resource error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np
from sympy import isprime, primerange

from . import __version__
from .central import AfeParams, SmoothingSpec, central_family
from .characters import root_numbers
from .errors import (ConsistencyError, ConvergenceError, DomainError, PreconditionError, PrimalityError,
                     ResourceError)

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


# ---------------------------------------------------------------- parsing helpers

def parse_qgrid(text: str) -> list[int]:
    """``"101"``, ``"101,1009"`` or ``"primes:LO:HI[:STEP]"`` (every STEP-th prime in [LO, HI])."""
    text = text.strip()
    if text.startswith("primes:"):
        parts = text.split(":")[1:]
        if len(parts) not in (2, 3):
            raise PreconditionError(f"bad q-grid {text!r}; expected primes:LO:HI[:STEP]")
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        if step < 1:
            raise PreconditionError("q-grid step must be positive")
        grid = [p for p in primerange(max(lo, 3), hi + 1)][::step]
    else:
        grid = [int(t) for t in text.split(",") if t.strip()]
    if not grid:
        raise PreconditionError(f"q-grid {text!r} is empty")
    for q in grid:
        if q < 3 or not isprime(q):
            raise PrimalityError(f"q={q} is not an odd prime")
    return grid


def parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def parse_floats(text: str) -> list[float]:
    return [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


# ---------------------------------------------------------------- per-q tasks

def _params(cfg) -> AfeParams:
    return AfeParams(X=cfg.get("X", 1.0), target_abs_err=cfg["target_err"])


def task_angles(cfg, q):
    from .arith import get_context
    ctx = get_context(q)
    par = cfg["parity"]
    a = {"even": np.arange(2, q - 1, 2), "odd": np.arange(1, q - 1, 2), "all": np.arange(1, q - 1)}[par]
    if a.size == 0:
        return []
    eps, theta = root_numbers(ctx, a)
    return [[q, int(x), float(t), e.real, e.imag] for x, t, e in zip(a, theta, eps)]


def task_central(cfg, q):
    fam = central_family(q, cfg["parity"], _params(cfg))
    return [[q, int(a), float(t), v.real, v.imag, abs(v)] for a, t, v in zip(fam.a, fam.theta, fam.lval)]


def task_kloosterman(cfg, q):
    from .cache import cache_io
    from .kloosterman import correlation_diagnostics, kl_all
    from .arith import get_context
    k = cfg["k"]
    if cfg["cache_dir"]:
        ctx, table = cache_io(cfg["cache_dir"], q, k)
    else:
        ctx = get_context(q)
        table = kl_all(k, ctx)
    if not cfg["diagnostics"]:
        x = np.arange(1, q)
        return [[q, k, int(xi), v.real, v.imag, abs(v)] for xi, v in zip(x, table.values)]
    H = cfg["H"] or math.isqrt(q)
    N1 = cfg["N1"] or math.sqrt(q)
    N2 = cfg["N2"] or math.sqrt(q)
    r = correlation_diagnostics(ctx, k, cfg["c"], H, N1, N2, table=table)
    return [[q, k, r.c, H, N1, N2, r.V2, r.W, r.v2_ratio, r.w_ratio]]


def task_mollifier(cfg, q):
    from .mollifier import build_mollifier, g_asymptotic_check
    if cfg["g_check"]:
        rows = []
        for M in cfg["M"]:
            g = g_asymptotic_check(q, M)
            rows.append([q, M, float(g.direct), g.predicted, g.residual_ratio])
        return rows
    ms = build_mollifier(q, cfg["alpha"])
    if cfg["format"] == "json":
        return [ms.to_json()]
    return [[q, cfg["alpha"], ms.M, m, x.numerator, x.denominator, float(x)]
            for m, x in sorted(ms.coeffs.items())]


def task_moments(cfg, q):
    from .moments import (afe_decomposition, first_moment, mollified_first, mollified_second,
                          second_moment)
    fam = central_family(q, "even", _params(cfg))
    kind = cfg["kind"]
    rows = []
    if kind == "decomposition":
        from .arith import get_context
        from .kloosterman import kl_tables
        ctx = get_context(q)
        for k in cfg["k"]:
            tabs = kl_tables(ctx, [abs(k - 1), abs(k), abs(k + 1)])
            d = afe_decomposition(fam, cfg["m"], cfg["m2"], k, cfg["theta"], tabs)
            row = [q, cfg["m"], cfg["m2"], k, d.X]
            for z in (d.B1, d.B2, d.B3, d.B4, d.remainder, d.recombined, d.direct):
                row += [z.real, z.imag]
            rows.append(row)
        return rows
    ms = None
    if kind.startswith("mollified"):
        from .mollifier import build_mollifier
        ms = build_mollifier(q, cfg["alpha"])
    for k in cfg["k"]:
        if kind == "first":
            r = first_moment(fam, cfg["m"], k)
        elif kind == "second":
            r = second_moment(fam, cfg["m"], cfg["m2"], k)
        elif kind == "mollified-first":
            r = mollified_first(fam, ms, k)
        else:
            r = mollified_second(fam, ms, k)
        rows.append(r.row())
    return rows


def task_smoothed(cfg, q):
    from .bumps import BumpSpec
    from .mollifier import build_mollifier
    from .moments import smoothed_moments
    fam = central_family(q, "even", _params(cfg))
    ms = build_mollifier(q, cfg["alpha"])
    bump = BumpSpec.constant() if cfg["beta"] == 0 else BumpSpec(cfg["beta"], cfg["a"], cfg["b"])
    sm = smoothed_moments(fam, ms, bump, cfg["kmax"])
    return [sm.C.row(), sm.D.row()]


def task_nonvanish(cfg, q):
    from .nonvanish import nonvanishing_count, shrinking_sweep
    fam = central_family(q, "even", _params(cfg))
    if cfg["eta"] is not None:
        reps = shrinking_sweep(fam, cfg["eta"], cfg["centers"], cfg["epsilon"], cfg["C"])
    else:
        reps = [nonvanishing_count(fam, (cfg["a"], cfg["b"]), cfg["epsilon"])]
    return [r.row() for r in reps]


def task_verify(cfg, q):
    from .verify import run_verification
    return [[q, c.name, c.passed, c.value, c.tolerance] for c in run_verification(q)]


TASKS = {
    "angles": (task_angles, ["q", "a", "theta", "eps_re", "eps_im"]),
    "central": (task_central, ["q", "a", "theta", "L_re", "L_im", "L_abs"]),
    "kloosterman": (task_kloosterman, None),
    "mollifier": (task_mollifier, None),
    "moments": (task_moments, None),
    "smoothed": (task_smoothed, None),
    "nonvanish": (task_nonvanish, None),
    "verify": (task_verify, ["q", "check", "passed", "value", "tolerance"]),
}


def columns_for(command: str, cfg) -> list[str]:
    from .moments import REPORT_COLUMNS
    from .nonvanish import NonvanishReport
    fixed = TASKS[command][1]
    if fixed:
        return fixed
    if command == "kloosterman":
        if cfg["diagnostics"]:
            return ["q", "k", "c", "H", "N1", "N2", "V2", "W", "V2_over_log2q", "W_over_k2Hq"]
        return ["q", "k", "x", "Kl_re", "Kl_im", "Kl_abs"]
    if command == "mollifier":
        if cfg["g_check"]:
            return ["q", "M", "G_direct", "G_predicted", "residual_ratio"]
        return ["q", "alpha", "M", "m", "x_num", "x_den", "x_float"]
    if command == "moments" and cfg["kind"] == "decomposition":
        cols = ["q", "m1", "m2", "k", "X"]
        for n in ("B1", "B2", "B3", "B4", "remainder", "recombined", "direct"):
            cols += [n + "_re", n + "_im"]
        return cols
    if command in ("moments", "smoothed"):
        return list(REPORT_COLUMNS)
    if command == "nonvanish":
        return list(NonvanishReport.CSV_COLUMNS)
    raise AssertionError(command)


def _run_one(args):
    command, cfg, q = args
    return TASKS[command][0](cfg, q)


# ---------------------------------------------------------------- argument parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", required=True, help="prime, comma list, or primes:LO:HI[:STEP]")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", default=None, help="directory for table caches")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="processes used over the q-grid (results do not depend on it)")
    common.add_argument("--target-err", type=float, default=1e-11,
                        help="absolute truncation target for the AFE sums")

    p = argparse.ArgumentParser(prog="rootmoments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rootmoments {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("angles", parents=[common], help="root numbers and angles")
    s.add_argument("--parity", choices=("even", "odd", "all"), default="even")

    s = sub.add_parser("central", parents=[common], help="central values L(1/2, chi)")
    s.add_argument("--parity", choices=("even", "odd"), default="even")
    s.add_argument("--X", type=float, default=1.0, help="AFE balance parameter")

    s = sub.add_parser("kloosterman", parents=[common], help="hyper-Kloosterman tables and diagnostics")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--diagnostics", action="store_true", help="emit V2/W correlation summaries")
    s.add_argument("--c", type=int, default=1)
    s.add_argument("--H", type=int, default=0, help="shift length (default floor(sqrt q))")
    s.add_argument("--N1", type=float, default=0.0)
    s.add_argument("--N2", type=float, default=0.0)

    s = sub.add_parser("mollifier", parents=[common], help="mollifier coefficients or G asymptotic check")
    s.add_argument("--alpha", type=float, default=0.25)
    s.add_argument("--g-check", action="store_true")
    s.add_argument("--M", default="100,1000,10000", help="lengths for --g-check")

    s = sub.add_parser("moments", parents=[common], help="weighted and mollified moments")
    s.add_argument("--kind", default="first",
                   choices=("first", "second", "mollified-first", "mollified-second", "decomposition"))
    s.add_argument("--k", default="0", help="comma list of root-number powers")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--m2", type=int, default=1)
    s.add_argument("--alpha", type=float, default=0.2)
    s.add_argument("--theta", default="1/12", help="X = q^theta for the decomposition")

    s = sub.add_parser("smoothed", parents=[common], help="smoothed mollified moments")
    s.add_argument("--alpha", type=float, default=0.2)
    s.add_argument("--beta", type=float, default=0.1, help="edge fraction; 0 selects f = 1")
    s.add_argument("--a", type=float, default=0.0)
    s.add_argument("--b", type=float, default=0.5)
    s.add_argument("--kmax", type=int, default=None)

    s = sub.add_parser("nonvanish", parents=[common], help="restricted non-vanishing counts")
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--a", type=float, default=0.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--eta", type=float, default=None, help="shrinking windows of length C q^-eta")
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--centers", default="0.5")

    sub.add_parser("verify", parents=[common], help="property suite for each q")
    return p


def resolve_config(ns: argparse.Namespace) -> dict:
    """Validate and resolve every parameter before any computation starts."""
    cfg = {k: v for k, v in vars(ns).items()}
    cfg["q"] = parse_qgrid(ns.q)
    if cfg["workers"] < 1:
        raise PreconditionError("--workers must be at least 1")
    if not cfg["target_err"] > 0:
        raise PreconditionError("--target-err must be positive")
    c = ns.command
    if c in ("mollifier", "moments", "smoothed") and not 0 < cfg["alpha"] < 0.5:
        raise PreconditionError(f"alpha must lie in (0, 1/2), got {cfg['alpha']}")
    if c == "mollifier":
        cfg["M"] = parse_ints(ns.M)
        if any(M < 2 for M in cfg["M"]):
            raise PreconditionError("G check needs every M >= 2")
    if c == "moments":
        cfg["k"] = parse_ints(ns.k)
        cfg["theta"] = parse_floats(ns.theta)[0]
        for q in cfg["q"]:
            if cfg["m"] % q == 0 or cfg["m2"] % q == 0:
                raise DomainError(f"q={q} divides m or m2")
        if cfg["kind"] == "decomposition" and not 0 < cfg["theta"] <= 0.25:
            raise PreconditionError("decomposition needs 0 < theta <= 1/4")
    if c == "kloosterman":
        if cfg["k"] < 1:
            raise PreconditionError("--k must be at least 1")
        for q in cfg["q"]:
            if cfg["c"] % q == 0:
                raise DomainError("c must be coprime to q")
            if cfg["diagnostics"] and cfg["H"] > math.sqrt(q):
                raise PreconditionError(f"H={cfg['H']} exceeds sqrt(q) for q={q}")
    if c == "smoothed" and not 0 <= cfg["beta"] <= 1:
        raise PreconditionError("beta must lie in [0, 1]")
    if c == "nonvanish":
        cfg["centers"] = parse_floats(ns.centers)
        if cfg["epsilon"] <= 0:
            raise PreconditionError("epsilon must be positive")
        if cfg["eta"] is not None and not (0 <= cfg["eta"] and 480 * cfg["eta"] < 1):
            raise DomainError("eta must lie in [0, 1/480)")
        if cfg["eta"] is None and (cfg["b"] - cfg["a"]) % 1.0 == 0 and cfg["b"] - cfg["a"] != 1:
            raise DomainError("interval is empty")
    if c == "central" and cfg["X"] <= 0:
        raise PreconditionError("X must be positive")
    return cfg


def header_lines(cfg: dict) -> list[str]:
    shown = {k: v for k, v in cfg.items() if k != "out"}
    blob = json.dumps(shown, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(blob.encode()).hexdigest()[:16]
    specs = " ".join(f"{n}={SmoothingSpec.for_parity(d).digest()}" for n, d in (("even", 0), ("odd", 1)))
    return [f"rootmoments {__version__}", f"config: {blob}", f"config-hash: {digest}", f"smoothing-spec: {specs}"]


def render(cfg: dict, columns: list[str], rows: list) -> str:
    if cfg["format"] == "json":
        doc = {"header": header_lines(cfg), "columns": columns,
               "rows": [r if isinstance(r, dict) else [fmt(v) for v in r] for r in rows]}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    for line in header_lines(cfg):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def run(cfg: dict) -> tuple[int, str]:
    """Execute a resolved configuration; returns ``(exit status, document)``."""
    command = cfg["command"]
    jobs = [(command, cfg, q) for q in cfg["q"]]
    if cfg["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg["workers"], len(jobs))) as ex:
            parts = list(ex.map(_run_one, jobs))  # ordered by q
    else:
        parts = [_run_one(j) for j in jobs]
    rows = [r for part in parts for r in part]
    status = EXIT_OK
    if command == "verify":
        failed = [f"{r[0]}:{r[1]}" for r in rows if not r[2]]
        if failed:
            print("FAILED " + ",".join(failed), file=sys.stderr)
            status = EXIT_ASSERT
    return status, render(cfg, columns_for(command, cfg), rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve_config(ns)
        status, doc = run(cfg)
    except (PreconditionError, DomainError, PrimalityError) as exc:
        print(f"rootmoments: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, MemoryError) as exc:
        print(f"rootmoments: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConsistencyError, ConvergenceError) as exc:
        print(f"rootmoments: assertion failure: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    if cfg["out"] == "-":
        sys.stdout.write(doc)
    else:
        with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
    return status


if __name__ == "__main__":
    sys.exit(main())
