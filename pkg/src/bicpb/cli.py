"""Command-line front end: ``bicpb check-metric | fixed-point | urysohn``.

Every run produces a RunReport.  ``--format json`` prints it in full (sorted
keys, so identical inputs give identical bytes once timing is omitted);
the default text format prints a short summary.

Exit codes: 0 success, 1 a check failed or no (common) fixed point was
certified, 2 unreadable input, schema errors or invalid parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import fpsolve, pbms, urysohn
from .errors import BicpbError, Diverged, NotFixed
from .schemas import validate

DEFAULT_SEED = 42


class InputError(Exception):
    """Input could not be read or parsed; maps to exit status 2."""


def bundled_fixtures() -> list[str]:
    root = resources.files("bicpb") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve_input(path: str) -> tuple[bytes, Path | None]:
    """Read ``path``, falling back to a bundled fixture of that name."""
    p = Path(path)
    if p.is_file():
        return p.read_bytes(), p
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    if len(p.parts) == 1 and name in bundled_fixtures():
        return (resources.files("bicpb") / "fixtures" / name).read_bytes(), None
    raise InputError(f"no such file or bundled fixture: {path}")


def _parse(raw: bytes) -> Any:
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _clean(obj: Any) -> Any:
    """Make results strict-JSON: non-finite floats become strings, numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


# -- subcommands --------------------------------------------------------------------


def cmd_check_metric(args: argparse.Namespace, data: Any) -> tuple[dict[str, Any], int]:
    validate(data, "finite-space")
    space = pbms.FiniteSpace.from_dict(data)
    kind = "generalized" if args.generalized else ("b-metric" if args.b_metric else "partial-b")
    report = pbms.check_axioms(space, args.s, kind=kind, with_minimal_s=args.min_s)
    results = {"axioms": report.to_dict(), "meta": space.meta}
    return results, 0 if report.holds else 1


def _load_solve_request(args: argparse.Namespace, data: Any, base: Path | None) -> dict[str, Any]:
    if "delta" in data:
        validate(data, "finite-space")
        if args.curlyvee is None or args.curlywedge is None:
            raise InputError("a bare space file needs --curlyvee and --curlywedge")
        data = {"space": data, "params": {"curlyvee": args.curlyvee, "curlywedge": args.curlywedge}}
    validate(data, "solve-request")
    req = dict(data)
    if isinstance(req["space"], str):
        raw, _ = resolve_input(str((base.parent / req["space"]) if base and not Path(req["space"]).is_absolute()
                                   else req["space"]))
        req["space"] = _parse(raw)
        validate(req["space"], "finite-space")
    params = dict(req["params"])
    for key in ("curlyvee", "curlywedge", "s"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    req["params"] = params
    return req


def cmd_fixed_point(args: argparse.Namespace, data: Any, base: Path | None) -> tuple[dict[str, Any], int]:
    req = _load_solve_request(args, data, base)
    space = pbms.FiniteSpace.from_dict(req["space"])
    params = fpsolve.ContractionParams.from_dict(req["params"])
    u_name, v_name = req.get("maps", ["U", "V"])
    for name in (u_name, v_name):
        if name not in space.maps:
            raise InputError(f"space defines no map named {name!r}")
    start = str(args.start if args.start is not None else req.get("start", space.points[0]))
    if start not in space.points:
        raise InputError(f"unknown start point {start!r}")
    tol = args.tol if args.tol is not None else float(req.get("tol", 1e-12))
    max_iter = args.max_iter if args.max_iter is not None else int(req.get("max_iter", 1000))

    results: dict[str, Any] = {"params": params.to_dict(), "start": start, "maps": [u_name, v_name]}
    failed = False
    if args.check_hypotheses:
        hyp: dict[str, Any] = {"contraction": fpsolve.check_rational_contraction(space, u_name, v_name, params).to_dict()}
        failed |= not hyp["contraction"]["holds"]
        if space.order is not None:
            hyp["weakly_increasing"] = fpsolve.check_weakly_increasing(space, u_name, v_name).to_dict()
            failed |= not hyp["weakly_increasing"]["holds"]
        else:
            hyp["weakly_increasing"] = None
        results["hypotheses"] = hyp

    trace = fpsolve.iterate_on_space(space, u_name, v_name, start, params, tol, max_iter)
    results["trace"] = trace.to_dict()
    tail = fpsolve.check_tail_bound(trace, space.metric, params, gap=lambda a, b: fpsolve.label_gap(space, a, b))
    results["tail_bound"] = {"holds": not tail,
                             "violations": [{"m": m, "n": n, "value": v, "bound": b} for m, n, v, b in tail]}
    try:
        cert = fpsolve.certify_fixed_point(space, u_name, v_name, trace.final, tol)
        results["certificate"] = cert.to_dict()
    except NotFixed as exc:
        results["certificate"] = None
        results["not_fixed"] = {"message": str(exc), "residual_U": exc.residual_u,
                                "residual_V": exc.residual_v, "self_gap": exc.self_gap}
        failed = True
    return results, 1 if failed else 0


def _random_grid_functions(grid: urysohn.Grid, components: int, rng: np.random.Generator, n: int,
                           scale: float = 3.0) -> list[urysohn.GridFunction]:
    base = rng.uniform(-scale, scale, size=(n, components, 1))
    slope = rng.uniform(0.0, scale, size=(n, components, 1))
    q = (np.asarray(grid.nodes) - grid.x) / grid.length
    return [urysohn.GridFunction((base[k] + slope[k] * q).T) for k in range(n)]


def cmd_urysohn(args: argparse.Namespace, data: Any) -> tuple[dict[str, Any], int]:
    validate(data, "urysohn-config")
    config = urysohn.UrysohnConfig.from_dict(data)
    if args.tol is not None:
        config.tol = args.tol
    if args.max_iter is not None:
        config.max_iter = args.max_iter
    results: dict[str, Any] = {"config": config.to_dict()}
    failed = False
    if args.check_hypotheses:
        rng = np.random.default_rng(args.seed)
        grid, b = config.grid, config.b_on(config.grid)
        samples = _random_grid_functions(grid, config.components, rng, args.samples)
        others = _random_grid_functions(grid, config.components, rng, args.samples)
        mono = urysohn.check_monotone_condition(config.G1, config.G2, b, grid, samples)
        lip = urysohn.check_lipschitz_condition(config.G1, config.G2, grid, list(zip(samples, others)))
        results["hypotheses"] = {"monotone": mono.to_dict(), "lipschitz": lip.to_dict()}
        failed |= not (mono.holds and lip.holds)
    try:
        sol = config.solve()
    except Diverged as exc:
        gaps = exc.trace.step_gap if exc.trace is not None else []
        results["solve"] = {"verdict": "diverged", "message": str(exc), "step_gap": list(gaps)}
        return results, 1
    results["solve"] = sol.to_dict()
    failed |= not sol.verdict
    if args.refine:
        rows = urysohn.refinement_study(config, args.refine)
        results["refinement"] = [{"intervals": r.intervals, "error": r.error, "ratio": r.ratio} for r in rows]
    return results, 1 if failed else 0


# -- driver -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None,
                        help=f"seed for randomized checks (default {DEFAULT_SEED}; BICPB_SEED overrides)")
    common.add_argument("--output", "-o", help="also write the JSON report to this file")
    common.add_argument("--omit-timing", action="store_true", help="leave wall time out of the report")

    parser = argparse.ArgumentParser(prog="bicpb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    cm = sub.add_parser("check-metric", parents=[common], help="check partial b-metric axioms on a finite space")
    cm.add_argument("path")
    cm.add_argument("--s", type=float, default=1.0)
    group = cm.add_mutually_exclusive_group()
    group.add_argument("--generalized", action="store_true", help="use the generalized triangularity")
    group.add_argument("--b-metric", action="store_true", help="check the b-metric axioms")
    cm.add_argument("--min-s", action="store_true", help="also report the minimal coefficient")

    fp = sub.add_parser("fixed-point", parents=[common], help="alternating iteration on a finite space")
    fp.add_argument("path")
    fp.add_argument("--start")
    fp.add_argument("--tol", type=float)
    fp.add_argument("--max-iter", type=int)
    fp.add_argument("--check-hypotheses", action="store_true")
    fp.add_argument("--curlyvee", type=float)
    fp.add_argument("--curlywedge", type=float)
    fp.add_argument("--s", type=float)

    ur = sub.add_parser("urysohn", parents=[common], help="solve a system of two Urysohn equations")
    ur.add_argument("path")
    ur.add_argument("--tol", type=float)
    ur.add_argument("--max-iter", type=int)
    ur.add_argument("--refine", type=int, default=0, metavar="K", help="error table over K halved meshes")
    ur.add_argument("--check-hypotheses", action="store_true")
    ur.add_argument("--samples", type=int, default=32, help="random samples for hypothesis checks")
    return parser


def effective_seed(flag: int | None) -> int:
    env = os.environ.get("BICPB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"BICPB_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED if flag is None else flag


def run(argv: Sequence[str]) -> tuple[dict[str, Any], int, argparse.Namespace]:
    """Parse ``argv`` and execute; returns the report, the exit status and the parsed flags."""
    args = build_parser().parse_args(list(argv))
    t0 = time.perf_counter()
    digest = None
    results: dict[str, Any] = {}
    error = None
    try:
        args.seed = effective_seed(args.seed)
        raw, path = resolve_input(args.path)
        digest = _digest(raw)
        data = _parse(raw)
        if args.command == "check-metric":
            results, status = cmd_check_metric(args, data)
        elif args.command == "fixed-point":
            results, status = cmd_fixed_point(args, data, path)
        else:
            results, status = cmd_urysohn(args, data)
    except (InputError, BicpbError, OSError, KeyError, TypeError, ValueError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        status = 2
    report: dict[str, Any] = {
        "command": list(argv),
        "input_digest": digest or _digest(b""),
        "results": _clean(results),
        "exit_status": status,
        "seed": args.seed if isinstance(args.seed, int) else DEFAULT_SEED,
    }
    if error is not None:
        report["error"] = error
    report["payload_digest"] = _digest(canonical(report).encode())
    if not args.omit_timing:
        report["wall_time_s"] = round(time.perf_counter() - t0, 6)
    return report, status, args


def _summary(report: dict[str, Any], command: str) -> str:
    lines = [f"{command}: exit {report['exit_status']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
        return "\n".join(lines)
    res = report["results"]
    if command == "check-metric":
        ax = res["axioms"]
        lines.append(f"kind {ax['kind']}, s = {ax['s']:g}: {'holds' if ax['holds'] else 'VIOLATED'}")
        for name, st in ax["status"].items():
            lines.append(f"  {name:20s} {st}")
        for v in ax["counterexamples"][:5]:
            lines.append(f"  counterexample {v['axiom']} at {v['points']}: {v['lhs']} vs {v['rhs']} ({v['relation']})")
        if len(ax["counterexamples"]) > 5:
            lines.append(f"  ... {len(ax['counterexamples']) - 5} more")
        if ax["nonzero_self_distances"]:
            lines.append(f"  nonzero self-distance at {ax['nonzero_self_distances']}")
        if ax["minimal_s"] is not None:
            lines.append(f"  minimal s: {ax['minimal_s']}")
    elif command == "fixed-point":
        tr = res["trace"]
        lines.append("iterates: " + " -> ".join(map(str, tr["iterates"])))
        lines.append(f"termination: {tr['termination']}, envelope ok: {all(tr['bound_ok'])}, "
                     f"tail bound ok: {res['tail_bound']['holds']}")
        for name, rep in (res.get("hypotheses") or {}).items():
            if rep is not None:
                lines.append(f"hypothesis {name}: {'holds' if rep['holds'] else 'VIOLATED'}")
        cert = res["certificate"]
        if cert:
            lines.append(f"certified common fixed point {cert['point']!r} (unique: {cert['unique']}, "
                         f"among {cert['unique_among']})")
        else:
            lines.append("no certified common fixed point: " + res["not_fixed"]["message"])
    else:
        sv = res["solve"]
        lines.append(f"verdict: {sv['verdict']}")
        if sv["verdict"] != "diverged":
            lines.append(f"residuals: {sv['residuals'][0]:.3e}, {sv['residuals'][1]:.3e}; steps: {sv['steps']}; "
                         f"contraction ratio: {sv['contraction_ratio']}")
            vals = [row[0] for row in sv["solution"]]
            lines.append(f"solution (first component) min {min(vals):.12g}, max {max(vals):.12g}")
        for name, rep in (res.get("hypotheses") or {}).items():
            lines.append(f"hypothesis {name}: {'holds' if rep['holds'] else 'VIOLATED'}"
                         + (f" ({rep['vacuous_count']} vacuous pairs)" if rep.get("vacuous_count") else ""))
        if "refinement" in res:
            lines.append("intervals  error         ratio")
            for row in res["refinement"]:
                ratio = "" if row["ratio"] is None else f"{row['ratio']:.3f}"
                lines.append(f"{row['intervals']:9d}  {row['error']:.6e}  {ratio}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    report, status, args = run(argv)
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    print(text if args.format == "json" else _summary(report, args.command))
    return status


if __name__ == "__main__":
    sys.exit(main())
