"""Command-line front end.

Reports go to standard output (JSON for structured results, CSV for grids,
sweeps and traces); diagnostics go to standard error.  Exit codes: 0 success,
1 malformed input file, 2 invalid parameters or unsupported request,
3 best-response dynamics did not converge, 4 verification mismatch.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import math
import os
import sys
import tempfile

from . import dynamics, equilibrium, oracle, response
from .core import GameParams
from .errors import CurveGameError, NonConvergence, ValidationError

EXIT_OK, EXIT_MALFORMED, EXIT_INVALID, EXIT_NONCONVERGENCE, EXIT_MISMATCH = 0, 1, 2, 3, 4
INSTANCE_KEYS = {"m", "alpha", "label"}
AXIS_KEYS = {"kind", "index", "lo", "hi", "step"}


class Malformed(Exception):
    pass


class Invalid(Exception):
    pass


def num(x: float) -> float:
    """Round to 12 significant digits for output."""
    if x is None or isinstance(x, bool):
        return x
    if math.isinf(x) or math.isnan(x):
        return None
    return float(f"{x:.12g}")


def csv_num(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


# -- input parsing -------------------------------------------------------------

def _no_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise Malformed(f"duplicate key {key!r}")
        out[key] = value
    return out


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh, object_pairs_hook=_no_duplicates)
    except OSError as exc:
        raise Malformed(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise Malformed(f"{path} is not valid JSON: {exc}") from None


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_instance(obj) -> tuple[GameParams, str | None]:
    if not isinstance(obj, dict):
        raise Malformed("instance must be a JSON object")
    extra = set(obj) - INSTANCE_KEYS
    if extra:
        raise Malformed(f"unknown instance keys: {sorted(extra)}")
    if "m" not in obj or "alpha" not in obj:
        raise Malformed("instance needs both 'm' and 'alpha'")
    if not _is_number(obj["m"]):
        raise Malformed("'m' must be a number")
    alpha = obj["alpha"]
    if not isinstance(alpha, list) or not all(_is_number(a) for a in alpha):
        raise Malformed("'alpha' must be a list of numbers")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise Malformed("'label' must be a string")
    try:
        return GameParams(tuple(alpha), obj["m"]), label
    except ValidationError as exc:
        raise Invalid(str(exc)) from None


def read_instance(path):
    return parse_instance(load_json(path))


def params_json(params: GameParams, label=None) -> dict:
    out = {"n": params.n, "m": num(params.m), "alpha": [num(a) for a in params.alpha]}
    if label is not None:
        out["label"] = label
    return out


def record_json(rec: equilibrium.EquilibriumRecord) -> dict:
    return {
        "kind": str(rec.kind),
        "profile": [num(x) for x in rec.efforts],
        "mean": num(rec.mean),
        "grades": [num(g.grade) for g in rec.grades],
        "utilities": [num(u) for u in rec.utilities],
        "marginal": rec.marginal,
    }


def emit_json(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, indent=2) + "\n")


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".curvegame-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- solve -----------------------------------------------------------------------

def cmd_solve(args):
    params, label = read_instance(args.instance)
    if params.n == 1:
        replies = equilibrium.solve_single_student(params.alpha[0], params.m)
        emit_json({
            "params": params_json(params, label),
            "cutoff": num(equilibrium.single_student_cutoff(params.alpha[0])),
            "replies": [num(r) for r in replies],
            "equilibria": [],
        })
        return EXIT_OK
    records = equilibrium.enumerate_equilibria(params)
    emit_json({"params": params_json(params, label), "equilibria": [record_json(r) for r in records]})
    return EXIT_OK


# -- best responses ------------------------------------------------------------

def br_rows(params, player, means):
    jump = response.jump_point(params, player)
    rows = []
    for xbar in means:
        br = response.best_response(params, player, xbar)
        rows.append((xbar, br.region.value, br.low, br.high, br.jump))
    return jump, rows


def br_csv(params, player, means) -> str:
    jump, rows = br_rows(params, player, means)
    buf = io.StringIO()
    buf.write(f"# player={player},jump={csv_num(jump)}\n")
    buf.write("xbar_minus_i,region,reply_low,reply_high,jump\n")
    for xbar, region, low, high, j in rows:
        buf.write(f"{csv_num(xbar)},{region},{csv_num(low)},{csv_num(high)},{csv_num(j)}\n")
    return buf.getvalue()


def grid_values(lo, hi, step):
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [float(f"{lo + k * step:.12g}") for k in range(count + 1)]


def cmd_br(args):
    params, _ = read_instance(args.instance)
    if params.n < 2:
        raise Invalid("best responses need at least two students")
    if not (0 <= args.player < params.n):
        raise Invalid(f"player {args.player} out of range for n={params.n}")
    if args.mean is not None:
        if not (0.0 <= args.mean <= 1.0):
            raise Invalid("--mean must lie in [0, 1]")
        means = [args.mean]
    else:
        if not (0.0 < args.grid <= 1.0):
            raise Invalid("--grid must lie in (0, 1]")
        means = grid_values(0.0, 1.0, args.grid)
    text = br_csv(params, args.player, means)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- sweeps ------------------------------------------------------------------------

def parse_sweep(obj):
    if not isinstance(obj, dict) or set(obj) != {"axes", "fixed"}:
        raise Malformed("sweep file needs exactly 'axes' and 'fixed'")
    base, _ = parse_instance(obj["fixed"])
    axes = obj["axes"]
    if not isinstance(axes, list) or len(axes) != 2:
        raise Malformed("'axes' must list exactly two axes")
    parsed = []
    for ax in axes:
        if not isinstance(ax, dict) or not set(ax) <= AXIS_KEYS or not {"kind", "lo", "hi", "step"} <= set(ax):
            raise Malformed(f"bad axis definition {ax!r}")
        kind = ax["kind"]
        if kind not in ("alpha", "m"):
            raise Malformed(f"axis kind must be 'alpha' or 'm', got {kind!r}")
        if not all(_is_number(ax[k]) for k in ("lo", "hi", "step")):
            raise Malformed("axis lo/hi/step must be numbers")
        index = ax.get("index")
        if kind == "alpha":
            if not isinstance(index, int) or isinstance(index, bool):
                raise Malformed("alpha axis needs an integer 'index'")
            if not (0 <= index < base.n):
                raise Invalid(f"alpha index {index} out of range for n={base.n}")
        lo, hi, step = float(ax["lo"]), float(ax["hi"]), float(ax["step"])
        if not (0 < lo < 1) or not (0 < hi <= 1) or lo > hi or step <= 0:
            raise Invalid(f"axis range must lie in (0, 1) with positive step: {ax!r}")
        values = [v for v in grid_values(lo, hi, step) if 0 < v < 1]
        name = "m" if kind == "m" else f"alpha_{index}"
        parsed.append((name, kind, index, values))
    if parsed[0][0] == parsed[1][0]:
        raise Invalid("the two sweep axes must differ")
    return base, parsed


def _cell_params(base, axes, values):
    alpha, m = list(base.alpha), base.m
    for (name, kind, index, _), v in zip(axes, values):
        if kind == "m":
            m = v
        else:
            alpha[index] = v
    return GameParams(tuple(alpha), m)


def _sweep_row(task):
    base, axes, v0 = task
    rows = []
    for v1 in axes[1][3]:
        params = _cell_params(base, axes, (v0, v1))
        kinds = {str(r.kind) for r in equilibrium.enumerate_equilibria(params)}
        rows.append((v0, v1, kinds))
    return rows


def sweep_csv(base, axes, workers=None) -> str:
    labels = ["no_curve"] + [f"k_dont_care:{k}" for k in range(base.n + 1)]
    tasks = [(base, axes, v0) for v0 in axes[0][3]]
    if workers is None:
        workers = int(os.environ.get("CURVEGAME_THREADS", "0") or 0) or (os.cpu_count() or 1)
    if workers > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_row, tasks))
    else:
        chunks = [_sweep_row(t) for t in tasks]
    buf = io.StringIO()
    buf.write(",".join([axes[0][0], axes[1][0]] + labels + ["count"]) + "\n")
    for chunk in chunks:
        for v0, v1, kinds in chunk:
            flags = ["1" if lab in kinds else "0" for lab in labels]
            buf.write(",".join([csv_num(v0), csv_num(v1)] + flags + [str(len(kinds))]) + "\n")
    return buf.getvalue()


def cmd_sweep(args):
    base, axes = parse_sweep(load_json(args.spec))
    if base.n < 2:
        raise Invalid("sweeps need at least two students")
    text = sweep_csv(base, axes)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- dynamics ----------------------------------------------------------------------

def trace_csv(steps) -> str:
    n = len(steps[0])
    buf = io.StringIO()
    buf.write(",".join(["step"] + [f"x_{i}" for i in range(n)]) + "\n")
    for k, prof in enumerate(steps):
        buf.write(",".join([str(k)] + [csv_num(x) for x in prof.efforts]) + "\n")
    return buf.getvalue()


def cmd_dynamics(args):
    params, _ = read_instance(args.instance)
    if params.n < 2:
        raise Invalid("dynamics need at least two students")
    if args.max_iter < 1:
        raise Invalid("--max-iter must be at least 1")
    try:
        traj = dynamics.iterate_extremal(params, args.which, tol=args.tol, max_iter=args.max_iter)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        emit_json({
            "which": args.which,
            "converged": False,
            "iterations": args.max_iter,
            "last_steps": [[num(x) for x in s.efforts] for s in exc.last_steps],
        })
        return EXIT_NONCONVERGENCE
    if args.trace:
        write_atomic(args.trace, trace_csv(traj.steps))
    emit_json({
        "which": traj.which,
        "limit": [num(x) for x in traj.limit.efforts],
        "iterations": traj.iterations,
        "converged": traj.converged,
    })
    return EXIT_OK


# -- verification ------------------------------------------------------------------

def br_spot_checks(params, br_step, means_step=0.01):
    """Compare grid argmax replies with the analytic correspondence on a mesh of
    opposing means.  Returns (checked, mismatches)."""
    checked, mismatches = 0, []
    tol = br_step * (1 + 1e-9) + 1e-12
    for i in range(params.n):
        jump = response.jump_point(params, i)
        for xbar in grid_values(0.0, 1.0, means_step):
            br = response.best_response(params, i, xbar)
            allowed = list(br.replies)
            if abs(xbar - jump) <= br_step:
                allowed = [response.low_critical_point(params.n, params.m, params.alpha[i], xbar), params.alpha[i]]
            got = oracle.grid_argmax(params, i, xbar, br_step)
            checked += 1
            if min(abs(got - r) for r in allowed) > tol:
                mismatches.append({"player": i, "xbar_minus_i": num(xbar), "grid": num(got), "analytic": [num(r) for r in br.replies]})
    return checked, mismatches


def cmd_verify(args):
    params, label = read_instance(args.instance)
    report = {"params": params_json(params, label)}
    ok = True
    if args.inflation is not None:
        if not (0 < args.inflation < 1):
            raise Invalid("--inflation ability index must lie in (0, 1)")
        inf = equilibrium.asymptotic_report(args.inflation, params.m, params.alpha)
        report["inflation"] = {
            "alpha_hat": num(inf.alpha_hat),
            "factor": num(inf.factor),
            "curved": inf.curved,
            "limit_efforts": [num(x) for x in inf.efforts],
            "limit_grades": [num(g) for g in inf.grades],
            "leisure_ratio": num(inf.leisure_ratio),
        }
    if params.n < 2:
        replies = equilibrium.solve_single_student(params.alpha[0], params.m)
        report["single_student"] = {"replies": [num(r) for r in replies]}
        report["ok"] = True
        emit_json(report)
        return EXIT_OK
    want_grid = args.grid_nash if args.grid_nash is not None else params.n in (2, 3)
    if want_grid and params.n not in (2, 3):
        raise Invalid(f"grid Nash search supports n in {{2, 3}}, got n={params.n}")
    checked, mismatches = br_spot_checks(params, args.br_step)
    report["best_responses"] = {"checked": checked, "step": args.br_step, "mismatches": mismatches}
    ok = ok and not mismatches
    if want_grid:
        step = args.step if args.step is not None else (1e-3 if params.n == 2 else 5e-3)
        records = equilibrium.enumerate_equilibria(params)
        clusters = oracle.grid_nash_search(params, step)
        match = oracle.match_clusters(clusters, [r.efforts for r in records], step * (1 + 1e-9) + 1e-12)
        report["grid_nash"] = {
            "step": step,
            "clusters": [[num(x) for x in c.representative] for c in clusters],
            "equilibria": [[num(x) for x in r.efforts] for r in records],
            "match": match,
        }
        ok = ok and match
    report["ok"] = ok
    emit_json(report)
    return EXIT_OK if ok else EXIT_MISMATCH


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvegame", description="Equilibria of the curved-exam game.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="enumerate all pure Nash equilibria")
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("br", help="best-response table for one player (CSV)")
    p.add_argument("instance")
    p.add_argument("--player", type=int, required=True, help="0-based player index")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mean", type=float, help="single opposing mean")
    g.add_argument("--grid", type=float, help="step of an opposing-mean grid over [0, 1]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_br)

    p = sub.add_parser("sweep", help="existence map over a 2-D parameter cross-section (CSV)")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dynamics", help="iterate extremal best responses")
    p.add_argument("instance")
    p.add_argument("--which", choices=(dynamics.GREATEST, dynamics.LEAST), default=dynamics.GREATEST)
    p.add_argument("--trace", help="write the trajectory as CSV")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("verify", help="compare analytic results with brute-force oracles")
    p.add_argument("instance")
    p.add_argument("--step", type=float, help="grid step for the Nash search")
    p.add_argument("--br-step", type=float, default=1e-3, help="grid step for best-reply checks")
    p.add_argument("--grid-nash", dest="grid_nash", action="store_true", default=None)
    p.add_argument("--no-grid-nash", dest="grid_nash", action="store_false")
    p.add_argument("--inflation", type=float, metavar="ALPHA_HAT", help="report the large-class grade-inflation factor")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (Invalid, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CurveGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
