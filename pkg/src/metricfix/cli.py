"""Command-line front end.

Every command prints one JSON report ``{command, config, result, timing}``
(or just ``result`` with ``--raw``, or a short summary with
``--format text``). Exit codes: 0 success / found / holds, 1 a valid run with
a negative answer, 2 input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Callable

import numpy as np

from . import config
from .derived import chain_metric, geodesic, path_length, path_metric
from .errors import CapacityError, EvaluationError, InputError, MetricfixError, NoPathError
from .games import (
    best_response_i,
    best_response_map,
    certify_contractive,
    nash_enumerate,
    nash_via_dynamics,
)
from .generators import (
    curve_contraction,
    discoordination_game,
    quadratic_game,
    random_space,
    random_table_game,
)
from .hausdorff import as_view
from .io import game_from_doc, game_to_doc, map_from_doc, map_to_doc, read_json, space_from_doc, space_to_doc
from .metric import COMBINERS, check_metric_convexity, is_r_chainable, product_space, validate_metric
from .setvalued import (
    discrete_slope,
    fixed_points_exhaustive,
    global_modulus,
    is_shrinking,
    local_certificate,
    parse_neighborhood,
    periodic_point_search,
    pointwise_certificate,
    solve_fixed_point,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class Outcome:
    def __init__(self, result: Any, ok: bool = True, config: dict | None = None, summary: str = ""):
        self.result = result
        self.ok = ok
        self.config = config or {}
        self.summary = summary


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


def _metric_spec(text: str) -> tuple[str, float | None]:
    if text == "base":
        return "base", None
    kind, _, val = text.partition(":")
    if kind not in ("chain", "path") or not val:
        raise argparse.ArgumentTypeError("metric must be base, chain:<r> or path:<eps>")
    return kind, _positive(val)


def _neighborhood(text: str):
    try:
        return parse_neighborhood(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _build_view(space, spec: tuple[str, float | None]):
    kind, scale = spec
    if kind == "base":
        return as_view(space)
    return as_view(chain_metric(space, scale) if kind == "chain" else path_metric(space, scale))


def _fmt_metric(spec) -> str:
    kind, scale = spec
    return kind if scale is None else f"{kind}:{scale!r}"


def _load_valid_space(args):
    doc, base = read_json(args.input)
    space = space_from_doc(doc, base)
    _require_metric(space, args.tol)
    return space


def _require_metric(space, tol):
    report = validate_metric(space, tol)
    if not report.passed:
        v = report.violations[0]
        raise InputError(
            f"input is not a metric ({len(report.violations)} violation(s); first: {v.axiom} at "
            f"{[space.labels[i] for i in v.witness]}); run 'space check' for details"
        )


def _load_map(args):
    doc, base = read_json(args.input)
    F = map_from_doc(doc, base)
    _require_metric(F.space, args.tol)
    return F


def _load_game(args):
    doc, base = read_json(args.input)
    game = game_from_doc(doc, base)
    for s in game.strategy_spaces:
        _require_metric(s, args.tol)
    return game


# --- space -----------------------------------------------------------------


def cmd_space_check(args) -> Outcome:
    doc, base = read_json(args.input)
    space = space_from_doc(doc, base)
    report = validate_metric(space, args.tol)
    result = {"n": len(space), "validation": report.to_dict(space.labels)}
    if args.convexity:
        result["convexity"] = check_metric_convexity(space, args.tol).to_dict(space.labels)
    if args.r is not None:
        ok, comps = is_r_chainable(space, args.r)
        result["chainability"] = {
            "r": args.r,
            "r_chainable": ok,
            "components": [[space.labels[i] for i in c] for c in comps],
        }
    summary = f"{len(space)} points; metric {'valid' if report.passed else 'INVALID'} ({len(report.violations)} violations)"
    return Outcome(result, report.passed, {"tol": args.tol, "r": args.r}, summary)


def cmd_space_product(args) -> Outcome:
    doc, base = read_json(args.input)
    factors = doc.get("factors") if isinstance(doc, dict) else doc
    if not isinstance(factors, list) or not factors:
        raise InputError("space product needs {'factors': [space, ...]} or a list of spaces")
    combiner = args.combiner or (doc.get("combiner", "max") if isinstance(doc, dict) else "max")
    spaces = [space_from_doc(f, base) for f in factors]
    prod = product_space(spaces, combiner)
    return Outcome(space_to_doc(prod), True, {"combiner": combiner}, f"{len(prod)} profile points")


# --- metric ----------------------------------------------------------------


def cmd_metric_chain(args) -> Outcome:
    space = _load_valid_space(args)
    dm = chain_metric(space, args.r)
    reach = int(dm.reachable.sum())
    return Outcome(dm.to_dict(), True, {"r": args.r, "tol": args.tol}, f"chain metric at r={args.r}: {reach} reachable ordered pairs")


def cmd_metric_path(args) -> Outcome:
    space = _load_valid_space(args)
    dm = path_metric(space, args.eps)
    reach = int(dm.reachable.sum())
    return Outcome(dm.to_dict(), True, {"eps": args.eps, "tol": args.tol}, f"path metric at eps={args.eps}: {reach} reachable ordered pairs")


def cmd_metric_geodesic(args) -> Outcome:
    space = _load_valid_space(args)
    x, y = space.index(args.source), space.index(args.target)
    cfg = {"eps": args.eps, "from": args.source, "to": args.target, "tol": args.tol}
    try:
        p = geodesic(space, args.eps, x, y)
    except NoPathError as exc:
        return Outcome({"path": None, "length": None, "reason": str(exc)}, False, cfg, str(exc))
    length = path_length(space, p)
    labels = [space.labels[i] for i in p.waypoints]
    return Outcome({"path": labels, "length": length}, True, cfg, f"{' -> '.join(labels)} (length {length!r})")


# --- map -------------------------------------------------------------------


def cmd_map_analyze(args) -> Outcome:
    F = _load_map(args)
    view = _build_view(F.space, args.metric)
    labels = F.space.labels
    scale = args.metric[1]
    r = args.r if args.r is not None else scale
    nbhd = args.neighborhood or (("radius", scale) if scale is not None else ("knn", 1))
    h = args.h if args.h is not None else r
    certs = {
        "global": global_modulus(F, view),
        "shrinking": is_shrinking(F, view),
        "pointwise": pointwise_certificate(F, view, nbhd),
    }
    if r is not None:
        certs["local"] = local_certificate(F, view, r)
    result = {name: c.to_dict(labels) for name, c in certs.items()}
    if h is not None:
        slope = discrete_slope(F, view, h)
        result["slope"] = {"h": h, "values": {labels[i]: float(s) for i, s in enumerate(slope)}}
    ok = any(c.holds for c in certs.values())
    cfg = {
        "metric": _fmt_metric(args.metric),
        "neighborhood": f"{nbhd[0]}:{nbhd[1]!r}",
        "r": r,
        "h": h,
        "strict_tol": config.STRICT_TOL,
        "tol": args.tol,
    }
    summary = ", ".join(f"{k} {'holds' if c.holds else 'fails'} (beta={c.modulus:.6g})" for k, c in certs.items())
    return Outcome(result, ok, cfg, summary)


def cmd_map_fix(args) -> Outcome:
    F = _load_map(args)
    fixed = [F.space.labels[i] for i in fixed_points_exhaustive(F)]
    status = "found" if fixed else "none found"
    return Outcome({"status": status, "fixed_points": fixed}, bool(fixed), {"tol": args.tol}, f"{len(fixed)} fixed point(s): {', '.join(fixed)}")


def cmd_map_solve(args) -> Outcome:
    F = _load_map(args)
    view = _build_view(F.space, args.metric)
    trace = solve_fixed_point(F, view, F.space.index(args.x0), args.max_iter)
    cfg = {"x0": args.x0, "max_iter": args.max_iter, "metric": _fmt_metric(args.metric), "tol": args.tol}
    return Outcome(trace.to_dict(F.space.labels), trace.outcome == "fixed-point", cfg, f"{trace.outcome} after {trace.steps} step(s)")


def cmd_map_periodic(args) -> Outcome:
    F = _load_map(args)
    found = periodic_point_search(F, args.max_period)
    cfg = {"max_period": args.max_period, "tol": args.tol}
    if found is None:
        return Outcome({"point": None, "period": None}, False, cfg, f"no periodic point up to period {args.max_period}")
    x, period = found
    return Outcome({"point": F.space.labels[x], "period": period}, True, cfg, f"{F.space.labels[x]} has period {period}")


# --- game ------------------------------------------------------------------


def _profile_arg(game, text: str):
    return game.parse_profile(text.split(","))


def cmd_game_br(args) -> Outcome:
    game = _load_game(args)
    prof = _profile_arg(game, args.profile)
    per_player = []
    for i, s in enumerate(game.strategy_spaces):
        br = best_response_i(game, i, prof, args.tie_tol)
        per_player.append([s.labels[k] for k in sorted(br)])
    cfg = {"profile": args.profile, "tie_tol": args.tie_tol, "tol": args.tol}
    summary = "; ".join(f"BR_{i + 1} = {{{', '.join(b)}}}" for i, b in enumerate(per_player))
    return Outcome({"profile": game.profile_labels(prof), "best_responses": per_player}, True, cfg, summary)


def cmd_game_nash(args) -> Outcome:
    game = _load_game(args)
    cfg = {"mode": args.mode, "tie_tol": args.tie_tol, "combiner": game.combiner, "tol": args.tol}
    if args.mode == "enumerate":
        eq = [game.profile_labels(p) for p in nash_enumerate(game, args.tie_tol)]
        return Outcome({"equilibria": eq}, bool(eq), cfg, f"{len(eq)} equilibri{'um' if len(eq) == 1 else 'a'}")
    if args.x0 is None:
        raise InputError("--mode dynamics needs --x0")
    metric = "base" if args.metric[0] == "base" else ("path", args.metric[1])
    if args.metric[0] == "chain":
        raise InputError("game dynamics support base or path:eps metrics")
    cfg.update({"x0": args.x0, "max_iter": args.max_iter, "metric": _fmt_metric(args.metric)})
    trace = nash_via_dynamics(game, _profile_arg(game, args.x0), args.tie_tol, args.max_iter, metric)
    labels = game.profile_space.labels
    result = trace.to_dict(labels)
    result["equilibria"] = [] if trace.fixed_point is None else [game.profile_labels(game.profile_at(trace.fixed_point))]
    return Outcome(result, trace.outcome == "fixed-point", cfg, f"{trace.outcome} after {trace.steps} step(s)")


def cmd_game_certify(args) -> Outcome:
    game = _load_game(args)
    rep = certify_contractive(
        game, args.condition, r=args.r, eps=args.eps, neighborhood=args.neighborhood, tie_tol=args.tie_tol
    )
    cfg = {
        "condition": args.condition,
        "r": args.r,
        "eps": args.eps,
        "neighborhood": None if args.neighborhood is None else f"{args.neighborhood[0]}:{args.neighborhood[1]!r}",
        "tie_tol": args.tie_tol,
        "strict_tol": config.STRICT_TOL,
        "combiner": game.combiner,
        "tol": args.tol,
    }
    c = rep.certificate
    summary = f"condition ({args.condition}) {'holds' if rep.verdict else 'fails'}; BR modulus {c.modulus:.6g}"
    return Outcome(rep.to_dict(game.profile_space.labels), rep.verdict, cfg, summary)


# --- gen -------------------------------------------------------------------


def cmd_gen(args) -> Outcome:
    rng = np.random.default_rng(args.seed)
    cfg = {"seed": args.seed, "what": args.what, "n": args.n}
    if args.what == "space":
        cfg["dim"] = args.dim
        doc = space_to_doc(random_space(rng, args.n, args.dim))
    elif args.what == "map":
        cfg.update({"beta": args.beta, "kind": args.kind})
        inst = curve_contraction(rng, args.n, args.beta, kind=args.kind)
        doc = map_to_doc(inst.F)
        cfg["scale"] = inst.scale
    else:
        cfg["kind"] = args.kind
        if args.kind == "quadratic":
            game = quadratic_game()
        elif args.kind == "discoordination":
            game = discoordination_game()
        else:
            sizes = tuple(int(s) for s in args.sizes.split(","))
            cfg["sizes"] = list(sizes)
            game = random_table_game(rng, sizes)
        doc = game_to_doc(game)
    return Outcome(doc, True, cfg, f"generated {args.what} (seed {args.seed})")


# --- wiring ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        p.add_argument("--in", dest="input", default=None, help="input JSON file (default: stdin)")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--raw", action="store_true", help="print only the result payload")
    p.add_argument("--tol", type=_nonneg, default=config.TRIANGLE_TOL, help="metric-axiom tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metricfix", description=__doc__.splitlines()[0])
    verbs = parser.add_subparsers(dest="verb", required=True)

    space = verbs.add_parser("space").add_subparsers(dest="sub", required=True)
    p = space.add_parser("check", help="validate metric axioms")
    _common(p)
    p.add_argument("--r", type=_positive, default=None, help="also test r-chainability")
    p.add_argument("--convexity", action="store_true", help="include the metric-convexity diagnostic")
    p.set_defaults(func=cmd_space_check)
    p = space.add_parser("product", help="product of factor spaces")
    _common(p)
    p.add_argument("--combiner", choices=COMBINERS, default=None)
    p.set_defaults(func=cmd_space_product)

    metric = verbs.add_parser("metric").add_subparsers(dest="sub", required=True)
    p = metric.add_parser("chain", help="chain metric at scale r")
    _common(p)
    p.add_argument("--r", type=_positive, required=True)
    p.set_defaults(func=cmd_metric_chain)
    p = metric.add_parser("path", help="intrinsic path metric at scale eps")
    _common(p)
    p.add_argument("--eps", type=_positive, required=True)
    p.set_defaults(func=cmd_metric_path)
    p = metric.add_parser("geodesic", help="shortest eps-path between two points")
    _common(p)
    p.add_argument("--eps", type=_positive, required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.set_defaults(func=cmd_metric_geodesic)

    smap = verbs.add_parser("map").add_subparsers(dest="sub", required=True)
    p = smap.add_parser("analyze", help="contraction certificates")
    _common(p)
    p.add_argument("--metric", type=_metric_spec, default=("base", None))
    p.add_argument("--neighborhood", type=_neighborhood, default=None)
    p.add_argument("--r", type=_positive, default=None, help="ball radius for the local certificate")
    p.add_argument("--h", type=_positive, default=None, help="scale of the discrete slope")
    p.set_defaults(func=cmd_map_analyze)
    p = smap.add_parser("fix", help="all fixed points")
    _common(p)
    p.set_defaults(func=cmd_map_fix)
    p = smap.add_parser("solve", help="greedy fixed-point iteration")
    _common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--metric", type=_metric_spec, default=("base", None))
    p.set_defaults(func=cmd_map_solve)
    p = smap.add_parser("periodic", help="smallest-period periodic point")
    _common(p)
    p.add_argument("--max-period", type=int, required=True)
    p.set_defaults(func=cmd_map_periodic)

    game = verbs.add_parser("game").add_subparsers(dest="sub", required=True)
    p = game.add_parser("br", help="best responses at a profile")
    _common(p)
    p.add_argument("--profile", required=True, help="comma-separated strategy labels")
    p.add_argument("--tie-tol", type=_nonneg, default=config.TIE_TOL)
    p.set_defaults(func=cmd_game_br)
    p = game.add_parser("nash", help="pure-strategy Nash equilibria")
    _common(p)
    p.add_argument("--mode", choices=["enumerate", "dynamics"], default="enumerate")
    p.add_argument("--x0", default=None)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--metric", type=_metric_spec, default=("base", None))
    p.add_argument("--tie-tol", type=_nonneg, default=config.TIE_TOL)
    p.set_defaults(func=cmd_game_nash)
    p = game.add_parser("certify", help="contractive-game conditions (a), (b), (c)")
    _common(p)
    p.add_argument("--condition", choices=["a", "b", "c"], required=True)
    p.add_argument("--r", type=_positive, default=None)
    p.add_argument("--eps", type=_positive, default=None)
    p.add_argument("--neighborhood", type=_neighborhood, default=None)
    p.add_argument("--tie-tol", type=_nonneg, default=config.TIE_TOL)
    p.set_defaults(func=cmd_game_certify)

    p = verbs.add_parser("gen", help="seeded instance generators")
    _common(p, needs_input=False)
    p.add_argument("what", choices=["space", "map", "game"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--beta", type=float, default=0.7)
    p.add_argument("--kind", default=None, help="map: local|pointwise; game: table|quadratic|discoordination")
    p.add_argument("--sizes", default="3,3")
    p.set_defaults(func=cmd_gen)
    return parser


def _render_text(command: str, out: Outcome) -> str:
    lines = [f"{command}: {out.summary}"]
    lines += [f"  {k} = {v}" for k, v in sorted(out.config.items()) if v is not None]
    return "\n".join(lines)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    command = f"{args.verb} {args.sub}" if getattr(args, "sub", None) else f"{args.verb} {args.what}"
    if args.verb == "gen":
        if args.kind is None:
            args.kind = "local" if args.what == "map" else "table"
        valid = {"map": ("local", "pointwise"), "game": ("table", "quadratic", "discoordination")}
        if args.what in valid and args.kind not in valid[args.what]:
            print(f"error: --kind for gen {args.what} must be one of {valid[args.what]}", file=stderr)
            return EXIT_INPUT
    for name in ("max_iter", "max_period", "n"):
        if getattr(args, name, 1) < 1:
            print(f"error: --{name.replace('_', '-')} must be >= 1", file=stderr)
            return EXIT_INPUT
    started = time.perf_counter()
    try:
        out = args.func(args)
    except (InputError, CapacityError, EvaluationError, NoPathError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except MetricfixError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - started
    if args.format == "text":
        print(_render_text(command, out), file=stdout)
    elif args.raw:
        print(json.dumps(out.result, sort_keys=True, indent=2), file=stdout)
    else:
        report = {"command": command, "config": out.config, "result": out.result, "timing": {"seconds": elapsed}}
        print(json.dumps(report, sort_keys=True, indent=2), file=stdout)
    return EXIT_OK if out.ok else EXIT_NEGATIVE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
